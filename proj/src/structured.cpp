#include "fastjd/structured.hpp"

namespace fastjd {

BlockBandSet correlation_bands(const TransferBlocks& tb, double sigma2) {
    require(tb.phases() >= 1, "transfer blocks have no phases");
    BlockBandSet out;
    out.sigma2 = sigma2;
    out.bands.assign(static_cast<std::size_t>(tb.l + 1), CMatrix::Zero(tb.k, tb.k));
    for (int n = 0; n < tb.phases(); ++n) {
        for (int m = 0; m <= tb.l; ++m) {
            for (int i = 0; i + m <= tb.l; ++i) {
                out.bands[static_cast<std::size_t>(m)].noalias() +=
                    tb.block(n, i).adjoint() * tb.block(n, i + m);
            }
        }
    }
    out.bands[0] += sigma2 * CMatrix::Identity(tb.k, tb.k);
    // R_0 is Hermitian by construction; remove rounding asymmetry.
    out.bands[0] = (0.5 * (out.bands[0] + out.bands[0].adjoint())).eval();
    return out;
}

BlockSpectrum correlation_spectrum(const BlockBandSet& bands, int p, OpCounter* ops) {
    const int l = bands.l();
    const int k = bands.k();
    if (p < 2 * l + 1) {
        throw ConfigError("processing length too short: bands would alias (need p >= 2L+1)");
    }
    FftPlan plan(static_cast<std::size_t>(p));
    BlockSpectrum out;
    out.lambda.assign(static_cast<std::size_t>(p), CMatrix::Zero(k, k));
    std::vector<cplx> seq(static_cast<std::size_t>(p));
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
            std::fill(seq.begin(), seq.end(), cplx{});
            seq[0] = bands.bands[0](a, b);
            for (int m = 1; m <= l; ++m) {
                seq[static_cast<std::size_t>(m)] = bands.bands[static_cast<std::size_t>(m)](a, b);
                seq[static_cast<std::size_t>(p - m)] = std::conj(bands.bands[static_cast<std::size_t>(m)](b, a));
            }
            plan.forward(seq, ops);
            for (int f = 0; f < p; ++f) {
                out.lambda[static_cast<std::size_t>(f)](a, b) = seq[static_cast<std::size_t>(f)];
            }
        }
    }
    return out;
}

TransferSpectrum transfer_spectrum(const TransferBlocks& tb, int p, OpCounter* ops) {
    require(p >= tb.l + 1, "processing length shorter than the transfer block count");
    FftPlan plan(static_cast<std::size_t>(p));
    TransferSpectrum out;
    std::vector<cplx> seq(static_cast<std::size_t>(p));
    for (int n = 0; n < tb.phases(); ++n) {
        std::vector<CMatrix> bins(static_cast<std::size_t>(p), CMatrix::Zero(tb.sf, tb.k));
        for (int r = 0; r < tb.sf; ++r) {
            for (int c = 0; c < tb.k; ++c) {
                std::fill(seq.begin(), seq.end(), cplx{});
                for (int i = 0; i <= tb.l; ++i) {
                    seq[static_cast<std::size_t>(i)] = tb.stacked[static_cast<std::size_t>(n)](i * tb.sf + r, c);
                }
                plan.forward(seq, ops);
                for (int f = 0; f < p; ++f) {
                    bins[static_cast<std::size_t>(f)](r, c) = seq[static_cast<std::size_t>(f)];
                }
            }
        }
        out.lambda1.push_back(std::move(bins));
    }
    return out;
}

CMatrix dense_band_matrix(const BlockBandSet& bands, int n_blocks) {
    const int k = bands.k();
    CMatrix r = CMatrix::Zero(static_cast<Eigen::Index>(n_blocks) * k, static_cast<Eigen::Index>(n_blocks) * k);
    for (int i = 0; i < n_blocks; ++i) {
        for (int m = 0; m <= bands.l() && i + m < n_blocks; ++m) {
            const CMatrix& rm = bands.bands[static_cast<std::size_t>(m)];
            r.block((i + m) * k, i * k, k, k) = rm;
            if (m > 0) {
                r.block(i * k, (i + m) * k, k, k) = rm.adjoint();
            }
        }
    }
    return r;
}

CMatrix circulant_correlation(const BlockBandSet& bands, int p) {
    const int k = bands.k();
    if (p * k > kDenseGuardRows) {
        throw ConfigError("dense circulant extension refused: too many rows");
    }
    require(p >= 2 * bands.l() + 1, "circulant extension needs p >= 2L+1");
    CMatrix rc = CMatrix::Zero(p * k, p * k);
    for (int c = 0; c < p; ++c) {
        rc.block(c * k, c * k, k, k) += bands.bands[0];
        for (int m = 1; m <= bands.l(); ++m) {
            const int lower = (c + m) % p;
            rc.block(lower * k, c * k, k, k) += bands.bands[static_cast<std::size_t>(m)];
            rc.block(c * k, lower * k, k, k) += bands.bands[static_cast<std::size_t>(m)].adjoint();
        }
    }
    return rc;
}

CMatrix circulant_system(const TransferBlocks& tb, int phase, int p) {
    if (p * tb.sf > kDenseGuardRows) {
        throw ConfigError("dense circulant extension refused: too many rows");
    }
    require(p >= tb.l + 1, "circulant extension needs p >= L+1");
    CMatrix ac = CMatrix::Zero(p * tb.sf, p * tb.k);
    for (int c = 0; c < p; ++c) {
        for (int i = 0; i <= tb.l; ++i) {
            const int row = ((c + i) % p) * tb.sf;
            ac.block(row, c * tb.k, tb.sf, tb.k) += tb.block(phase, i);
        }
    }
    return ac;
}

}  // namespace fastjd
