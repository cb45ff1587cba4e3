#include "fastjd/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fastjd/fft.hpp"
#include "fastjd/jdfft.hpp"

namespace fastjd {

namespace {

// Lower Cholesky of a Hermitian K x K block; returns false on breakdown.
bool cholesky_block(const CMatrix& s, CMatrix& g, std::uint64_t& count) {
    const auto k = s.rows();
    g = CMatrix::Zero(k, k);
    const double tiny = 1e-14 * std::max(1.0, s.cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < k; ++j) {
        double d = s(j, j).real();
        for (Eigen::Index t = 0; t < j; ++t) {
            d -= std::norm(g(j, t));
        }
        if (!(d > tiny)) {
            return false;
        }
        const double gjj = std::sqrt(d);
        g(j, j) = gjj;
        for (Eigen::Index i = j + 1; i < k; ++i) {
            cplx acc = s(i, j);
            for (Eigen::Index t = 0; t < j; ++t) {
                acc -= g(i, t) * std::conj(g(j, t));
            }
            g(i, j) = acc / gjj;
        }
        count += static_cast<std::uint64_t>((j + 1) * (k - j));
    }
    return true;
}

// X with X G^H = S for lower-triangular G, i.e. G X^H = S^H.
CMatrix solve_right_adjoint(const CMatrix& g, const CMatrix& s, std::uint64_t& count) {
    const auto k = g.rows();
    CMatrix xh = g.triangularView<Eigen::Lower>().solve(s.adjoint());
    count += static_cast<std::uint64_t>(s.rows() * k * (k + 1) / 2);
    return xh.adjoint();
}

}  // namespace

CVector dense_mmse_oracle(const TransferBlocks& tb, const std::vector<CVector>& r, int n_symbols,
                          double sigma2) {
    require(static_cast<int>(r.size()) == tb.phases(), "oracle: phase count mismatch");
    const int dim = tb.k * n_symbols;
    if (dim > kOracleGuard) {
        throw ConfigError("dense oracle refused: K * n_symbols exceeds " + std::to_string(kOracleGuard));
    }
    CMatrix gram = sigma2 * CMatrix::Identity(dim, dim);
    CVector rhs = CVector::Zero(dim);
    for (int n = 0; n < tb.phases(); ++n) {
        const CVector& rn = r[static_cast<std::size_t>(n)];
        const CMatrix a = build_system_matrix(tb, n, n_symbols, static_cast<int>(rn.size()));
        gram.noalias() += a.adjoint() * a;
        rhs.noalias() += a.adjoint() * rn;
    }
    Eigen::LLT<CMatrix> llt(gram);
    if (llt.info() != Eigen::Success) {
        throw NumericError("dense oracle: matrix not positive definite");
    }
    return llt.solve(rhs);
}

BandedBlockFactor approx_block_cholesky(const BlockBandSet& bands, int n_blocks, int depth, OpCounter* ops) {
    const int l = bands.l();
    const int k = bands.k();
    require(n_blocks >= 1, "block Cholesky needs at least one block row");
    const int exact_rows = std::min(n_blocks, depth);
    require(exact_rows == n_blocks || exact_rows >= l + 1, "extension depth must be at least L + 1 block rows");

    BandedBlockFactor g;
    g.k = k;
    g.l = l;
    g.rows.assign(static_cast<std::size_t>(n_blocks), std::vector<CMatrix>(static_cast<std::size_t>(l + 1), CMatrix::Zero(k, k)));
    std::uint64_t count = 0;

    for (int i = 0; i < exact_rows; ++i) {
        auto& row = g.rows[static_cast<std::size_t>(i)];
        const int j0 = std::max(0, i - l);
        for (int j = j0; j <= i; ++j) {
            CMatrix s = bands.bands[static_cast<std::size_t>(i - j)];
            const auto& rj = g.rows[static_cast<std::size_t>(j)];
            for (int t = j0; t < j; ++t) {
                s.noalias() -= row[static_cast<std::size_t>(l - (i - t))] * rj[static_cast<std::size_t>(l - (j - t))].adjoint();
                count += static_cast<std::uint64_t>(k) * k * k;
            }
            if (j < i) {
                row[static_cast<std::size_t>(l - (i - j))] = solve_right_adjoint(rj[static_cast<std::size_t>(l)], s, count);
            } else {
                CMatrix gii;
                if (!cholesky_block(s, gii, count)) {
                    throw NumericError("block Cholesky breakdown at block row " + std::to_string(i), i);
                }
                row[static_cast<std::size_t>(l)] = std::move(gii);
            }
        }
    }
    for (int i = exact_rows; i < n_blocks; ++i) {
        g.rows[static_cast<std::size_t>(i)] = g.rows[static_cast<std::size_t>(exact_rows - 1)];
    }
    tally(ops, &OpCounter::cholesky, count);
    return g;
}

CVector banded_block_solve(const BandedBlockFactor& g, const CVector& v, OpCounter* ops) {
    const int k = g.k;
    const int l = g.l;
    const int nb = g.n_blocks();
    require(v.size() == static_cast<Eigen::Index>(k) * nb, "banded solve: rhs length mismatch");
    std::uint64_t count = 0;
    CVector y(v.size());
    for (int i = 0; i < nb; ++i) {
        const auto& row = g.rows[static_cast<std::size_t>(i)];
        CVector acc = v.segment(i * k, k);
        for (int m = 1; m <= std::min(l, i); ++m) {
            acc.noalias() -= row[static_cast<std::size_t>(l - m)] * y.segment((i - m) * k, k);
            count += static_cast<std::uint64_t>(k) * k;
        }
        y.segment(i * k, k) = row[static_cast<std::size_t>(l)].triangularView<Eigen::Lower>().solve(acc);
        count += static_cast<std::uint64_t>(k * (k + 1) / 2);
    }
    CVector x(v.size());
    for (int i = nb - 1; i >= 0; --i) {
        CVector acc = y.segment(i * k, k);
        for (int m = 1; m <= std::min(l, nb - 1 - i); ++m) {
            acc.noalias() -= g.rows[static_cast<std::size_t>(i + m)][static_cast<std::size_t>(l - m)].adjoint() *
                             x.segment((i + m) * k, k);
            count += static_cast<std::uint64_t>(k) * k;
        }
        x.segment(i * k, k) =
            g.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)].adjoint().triangularView<Eigen::Upper>().solve(acc);
        count += static_cast<std::uint64_t>(k * (k + 1) / 2);
    }
    tally(ops, &OpCounter::substitution, count);
    return x;
}

CVector jd_chol(const BlockBandSet& bands, const CVector& v, int n_blocks, int depth, OpCounter* ops) {
    if (depth <= 0) {
        depth = jd_chol_depth(bands.l());
    }
    return banded_block_solve(approx_block_cholesky(bands, n_blocks, depth, ops), v, ops);
}

ChipEqualizerModel make_chip_model(const std::vector<CVector>& h, const CodeSet& codes, double sigma2) {
    require(!h.empty(), "chip model needs at least one phase");
    const auto w = h.front().size();
    ChipEqualizerModel m;
    m.h = h;
    m.codes = codes.codes;
    m.sigma2 = sigma2;
    m.bands.assign(static_cast<std::size_t>(w), cplx{0.0, 0.0});
    for (const auto& hn : h) {
        require(hn.size() == w, "chip model: phases differ in length");
        for (Eigen::Index mm = 0; mm < w; ++mm) {
            cplx acc{0.0, 0.0};
            for (Eigen::Index u = 0; u + mm < w; ++u) {
                acc += std::conj(hn[u]) * hn[u + mm];
            }
            m.bands[static_cast<std::size_t>(mm)] += acc;
        }
    }
    m.bands[0] = cplx{m.bands[0].real() + sigma2, 0.0};
    return m;
}

CVector chip_matched_filter(const ChipEqualizerModel& model, const std::vector<CVector>& r, int n_chips,
                            OpCounter* ops) {
    require(r.size() == model.h.size(), "chip matched filter: phase count mismatch");
    CVector x = CVector::Zero(n_chips);
    std::uint64_t count = 0;
    for (std::size_t n = 0; n < r.size(); ++n) {
        const CVector& hn = model.h[n];
        const CVector& rn = r[n];
        for (int j = 0; j < n_chips; ++j) {
            const auto span = std::min<Eigen::Index>(hn.size(), rn.size() - j);
            cplx acc{0.0, 0.0};
            for (Eigen::Index u = 0; u < span; ++u) {
                acc += std::conj(hn[u]) * rn[j + u];
            }
            x[j] += acc;
            count += static_cast<std::uint64_t>(std::max<Eigen::Index>(span, 0));
        }
    }
    tally(ops, &OpCounter::matched_filter, count);
    return x;
}

CVector despread(const CVector& s, const CMatrix& codes, int n_symbols) {
    const auto sf = codes.rows();
    const auto k = codes.cols();
    require(s.size() >= sf * n_symbols, "despread: chip vector too short");
    CVector d(k * n_symbols);
    for (int i = 0; i < n_symbols; ++i) {
        d.segment(i * k, k) = codes.adjoint() * s.segment(i * sf, sf);
    }
    return d;
}

namespace {

// Scalar banded Cholesky of the Toeplitz chip matrix, exact for the first
// `depth` rows; later rows copy row depth - 1. g[i][b - m] = G(i, i - m).
std::vector<std::vector<cplx>> chip_cholesky(const std::vector<cplx>& bands, int n, int depth, std::uint64_t& count) {
    const int b = static_cast<int>(bands.size()) - 1;
    const int exact_rows = std::min(n, depth);
    require(exact_rows == n || exact_rows >= b + 1, "chip Cholesky depth must be at least w rows");
    std::vector<std::vector<cplx>> g(static_cast<std::size_t>(n), std::vector<cplx>(static_cast<std::size_t>(b + 1)));
    const double tiny = 1e-14 * std::abs(bands[0]);
    for (int i = 0; i < exact_rows; ++i) {
        auto& row = g[static_cast<std::size_t>(i)];
        const int j0 = std::max(0, i - b);
        for (int j = j0; j <= i; ++j) {
            const auto& rj = g[static_cast<std::size_t>(j)];
            cplx s = bands[static_cast<std::size_t>(i - j)];
            for (int t = j0; t < j; ++t) {
                s -= row[static_cast<std::size_t>(b - (i - t))] * std::conj(rj[static_cast<std::size_t>(b - (j - t))]);
            }
            count += static_cast<std::uint64_t>(j - j0 + 1);
            if (j < i) {
                row[static_cast<std::size_t>(b - (i - j))] = s / rj[static_cast<std::size_t>(b)].real();
            } else {
                if (!(s.real() > tiny)) {
                    throw NumericError("chip Cholesky breakdown at row " + std::to_string(i), i);
                }
                row[static_cast<std::size_t>(b)] = std::sqrt(s.real());
            }
        }
    }
    for (int i = exact_rows; i < n; ++i) {
        g[static_cast<std::size_t>(i)] = g[static_cast<std::size_t>(exact_rows - 1)];
    }
    return g;
}

}  // namespace

CVector sd_chol(const ChipEqualizerModel& model, const std::vector<CVector>& r, int n_symbols, int depth,
                OpCounter* ops) {
    const int sf = static_cast<int>(model.codes.rows());
    const int n = sf * n_symbols;
    const int b = model.w() - 1;
    if (depth <= 0) {
        depth = sd_chol_depth(model.w());
    }
    const CVector x = chip_matched_filter(model, r, n, ops);
    std::uint64_t fcount = 0;
    const auto g = chip_cholesky(model.bands, n, depth, fcount);
    tally(ops, &OpCounter::cholesky, fcount);

    std::uint64_t scount = 0;
    CVector y(n);
    for (int i = 0; i < n; ++i) {
        const auto& row = g[static_cast<std::size_t>(i)];
        cplx acc = x[i];
        for (int m = 1; m <= std::min(b, i); ++m) {
            acc -= row[static_cast<std::size_t>(b - m)] * y[i - m];
        }
        y[i] = acc / row[static_cast<std::size_t>(b)].real();
        scount += static_cast<std::uint64_t>(std::min(b, i) + 1);
    }
    CVector s(n);
    for (int i = n - 1; i >= 0; --i) {
        cplx acc = y[i];
        for (int m = 1; m <= std::min(b, n - 1 - i); ++m) {
            acc -= std::conj(g[static_cast<std::size_t>(i + m)][static_cast<std::size_t>(b - m)]) * s[i + m];
        }
        s[i] = acc / g[static_cast<std::size_t>(i)][static_cast<std::size_t>(b)].real();
        scount += static_cast<std::uint64_t>(std::min(b, n - 1 - i) + 1);
    }
    tally(ops, &OpCounter::substitution, scount);
    return despread(s, model.codes, n_symbols);
}

int sd_fft_length(int sf, int n_symbols, int w) {
    const int need = sf * n_symbols + w - 1;
    int n = 1;
    while (n < need) {
        n <<= 1;
    }
    return n;
}

CVector sd_fft(const ChipEqualizerModel& model, const std::vector<CVector>& r, int n_symbols, int nfft,
               OpCounter* ops) {
    require(r.size() == model.h.size(), "sd_fft: phase count mismatch");
    const int sf = static_cast<int>(model.codes.rows());
    if (nfft <= 0) {
        nfft = sd_fft_length(sf, n_symbols, model.w());
    }
    require(nfft >= sf * n_symbols && nfft >= model.w(), "sd_fft: transform shorter than the field");
    const FftPlan plan(static_cast<std::size_t>(nfft));
    CVector num = CVector::Zero(nfft);
    Eigen::VectorXd den = Eigen::VectorXd::Constant(nfft, model.sigma2);
    for (std::size_t n = 0; n < r.size(); ++n) {
        CVector rf = CVector::Zero(nfft);
        for (Eigen::Index t = 0; t < r[n].size(); ++t) {
            rf[t % nfft] += r[n][t];
        }
        CVector hf = CVector::Zero(nfft);
        hf.head(model.h[n].size()) = model.h[n];
        plan.forward({rf.data(), static_cast<std::size_t>(nfft)}, ops);
        plan.forward({hf.data(), static_cast<std::size_t>(nfft)}, ops);
        for (int f = 0; f < nfft; ++f) {
            num[f] += std::conj(hf[f]) * rf[f];
            den[f] += std::norm(hf[f]);
        }
    }
    const double tiny = 1e-12 * den.maxCoeff();
    for (int f = 0; f < nfft; ++f) {
        if (!(den[f] > tiny)) {
            throw NumericError("sd_fft: near-zero spectral bin " + std::to_string(f), f);
        }
        num[f] /= den[f];
    }
    plan.inverse({num.data(), static_cast<std::size_t>(nfft)}, ops);
    num /= static_cast<double>(nfft);
    return despread(num, model.codes, n_symbols);
}

CVector matched_filter_detector(const TransferBlocks& tb, const std::vector<CVector>& r, int n_symbols,
                                OpCounter* ops) {
    CVector v = matched_filter_direct(tb, r, n_symbols, ops);
    Eigen::VectorXd energy = Eigen::VectorXd::Zero(tb.k);
    for (const auto& st : tb.stacked) {
        energy += st.colwise().squaredNorm().transpose();
    }
    for (int i = 0; i < n_symbols; ++i) {
        for (int c = 0; c < tb.k; ++c) {
            v[i * tb.k + c] /= energy[c];
        }
    }
    return v;
}

}  // namespace fastjd
