#include "fastjd/jdfft.hpp"

#include <algorithm>
#include <cmath>

namespace fastjd {

FieldWindow extend_window(const std::vector<CVector>& rx, int field, const CVector& midamble,
                          const ChannelRealization& realization, const SlotConfig& config,
                          const JdfftOptions& options) {
    config.validate();
    require(field == 0 || field == 1, "field index must be 0 or 1");
    require(rx.size() == realization.h.size(), "received phases do not match the channel realization");
    const int p = options.processing_length(config);
    require(p >= config.n_s, "processing length must cover the data field");

    FieldWindow out;
    out.n_symbols = p;
    out.extended = options.window_extension;
    const int len = config.sf * p + (options.window_extension ? config.w - 1 : 0);
    const int start = config.field_start(field);
    const int mid_start = config.field_chips();

    for (std::size_t n = 0; n < rx.size(); ++n) {
        if (rx[n].size() < start + len) {
            throw ConfigError("received burst lacks the samples the detection window needs");
        }
        CVector win = rx[n].segment(start, len);
        if (midamble.size() > 0) {
            const CVector mc = convolve(midamble, realization.h[n]);
            const int lo = std::max(start, mid_start);
            const int hi = std::min<int>(start + len, mid_start + static_cast<int>(mc.size()));
            for (int b = lo; b < hi; ++b) {
                win[b - start] -= mc[b - mid_start];
            }
        }
        out.r.push_back(std::move(win));
    }
    return out;
}

CVector matched_filter_direct(const TransferBlocks& tb, const std::vector<CVector>& r, int n_symbols,
                              OpCounter* ops) {
    require(static_cast<int>(r.size()) == tb.phases(), "matched filter: phase count mismatch");
    CVector v = CVector::Zero(static_cast<Eigen::Index>(tb.k) * n_symbols);
    std::uint64_t macs = 0;
    for (int n = 0; n < tb.phases(); ++n) {
        const CMatrix& st = tb.stacked[static_cast<std::size_t>(n)];
        const CVector& rn = r[static_cast<std::size_t>(n)];
        const auto len = static_cast<int>(rn.size());
        for (int i = 0; i < n_symbols; ++i) {
            const int r0 = i * tb.sf;
            const int span = std::min(tb.response_length, len - r0);
            if (span <= 0) {
                continue;
            }
            for (int c = 0; c < tb.k; ++c) {
                cplx acc{0.0, 0.0};
                for (int t = 0; t < span; ++t) {
                    acc += std::conj(st(t, c)) * rn[r0 + t];
                }
                v[i * tb.k + c] += acc;
            }
            macs += static_cast<std::uint64_t>(span) * tb.k;
        }
    }
    tally(ops, &OpCounter::matched_filter, macs);
    return v;
}

CVector matched_filter_fft(const TransferSpectrum& ts, int sf, int k, const std::vector<CVector>& r,
                           OpCounter* ops) {
    require(r.size() == ts.lambda1.size(), "matched filter: phase count mismatch");
    const int p = ts.p();
    const int len = p * sf;
    CVector out = CVector::Zero(static_cast<Eigen::Index>(p) * k);
    for (std::size_t n = 0; n < r.size(); ++n) {
        CVector folded = CVector::Zero(len);
        for (Eigen::Index t = 0; t < r[n].size(); ++t) {
            folded[t % len] += r[n][t];
        }
        const CVector fr = block_dft(folded, sf, Direction::forward, ops);
        for (int f = 0; f < p; ++f) {
            out.segment(f * k, k).noalias() += ts.lambda1[n][static_cast<std::size_t>(f)].adjoint() * fr.segment(f * sf, sf);
        }
    }
    tally(ops, &OpCounter::matched_filter, static_cast<std::uint64_t>(r.size()) * p * sf * k);
    return out;
}

BinFactor BinFactor::factor(const CMatrix& lambda, BinSolveMode mode, int bin, OpCounter* ops) {
    const auto k = static_cast<int>(lambda.rows());
    require(lambda.cols() == k, "bin matrix must be square");
    const double scale = lambda.cwiseAbs().maxCoeff();
    const double tiny = 1e-12 * scale;
    BinFactor f;
    f.mode_ = mode;
    f.m_ = lambda;
    f.perm_.resize(static_cast<std::size_t>(k));
    CMatrix& a = f.m_;
    std::uint64_t count = 0;

    auto pivot_row = [&](int col) {
        int best = col;
        for (int i = col + 1; i < k; ++i) {
            if (std::abs(a(i, col)) > std::abs(a(best, col))) {
                best = i;
            }
        }
        if (!(std::abs(a(best, col)) > tiny)) {
            throw NumericError("singular or ill-conditioned frequency bin " + std::to_string(bin), bin);
        }
        return best;
    };

    if (mode == BinSolveMode::lu) {
        double pmin = INFINITY;
        double pmax = 0.0;
        for (int j = 0; j < k; ++j) {
            const int piv = pivot_row(j);
            f.perm_[static_cast<std::size_t>(j)] = piv;
            if (piv != j) {
                a.row(j).swap(a.row(piv));
            }
            const cplx d = a(j, j);
            pmin = std::min(pmin, std::abs(d));
            pmax = std::max(pmax, std::abs(d));
            for (int i = j + 1; i < k; ++i) {
                a(i, j) /= d;
                const cplx l = a(i, j);
                for (int c = j + 1; c < k; ++c) {
                    a(i, c) -= l * a(j, c);
                }
                count += static_cast<std::uint64_t>(k - j);
            }
        }
        f.rcond_ = pmin / pmax;
    } else {
        // In-place Gauss-Jordan; row interchanges are undone as column swaps.
        const double norm1 = lambda.cwiseAbs().colwise().sum().maxCoeff();
        for (int j = 0; j < k; ++j) {
            const int piv = pivot_row(j);
            f.perm_[static_cast<std::size_t>(j)] = piv;
            if (piv != j) {
                a.row(j).swap(a.row(piv));
            }
            const cplx inv = 1.0 / a(j, j);
            a(j, j) = 1.0;
            a.row(j) *= inv;
            count += static_cast<std::uint64_t>(k);
            for (int i = 0; i < k; ++i) {
                if (i == j) {
                    continue;
                }
                const cplx m = a(i, j);
                a(i, j) = 0.0;
                for (int c = 0; c < k; ++c) {
                    a(i, c) -= m * a(j, c);
                }
                count += static_cast<std::uint64_t>(k);
            }
        }
        for (int j = k - 1; j >= 0; --j) {
            const int piv = f.perm_[static_cast<std::size_t>(j)];
            if (piv != j) {
                a.col(j).swap(a.col(piv));
            }
        }
        f.rcond_ = 1.0 / (norm1 * a.cwiseAbs().colwise().sum().maxCoeff());
    }
    tally(ops, &OpCounter::bin_factor, count);
    return f;
}

CVector BinFactor::solve(const CVector& rhs, OpCounter* ops) const {
    const auto k = static_cast<int>(m_.rows());
    require(rhs.size() == k, "bin solve: rhs length mismatch");
    if (mode_ == BinSolveMode::explicit_inverse) {
        tally(ops, &OpCounter::bin_solve, static_cast<std::uint64_t>(k) * k);
        return m_ * rhs;
    }
    CVector x = rhs;
    for (int j = 0; j < k; ++j) {
        const int piv = perm_[static_cast<std::size_t>(j)];
        if (piv != j) {
            std::swap(x[j], x[piv]);
        }
    }
    for (int i = 0; i < k; ++i) {
        cplx acc = x[i];
        for (int j = 0; j < i; ++j) {
            acc -= m_(i, j) * x[j];
        }
        x[i] = acc;
    }
    for (int i = k - 1; i >= 0; --i) {
        cplx acc = x[i];
        for (int j = i + 1; j < k; ++j) {
            acc -= m_(i, j) * x[j];
        }
        x[i] = acc / m_(i, i);
    }
    tally(ops, &OpCounter::bin_solve, static_cast<std::uint64_t>(k) * k);
    return x;
}

CVector per_bin_solve(const CMatrix& lambda, const CVector& rhs, BinSolveMode mode, int bin, OpCounter* ops) {
    return BinFactor::factor(lambda, mode, bin, ops).solve(rhs, ops);
}

JdfftDetector::JdfftDetector(const TransferBlocks& tb, double sigma2, const SlotConfig& config,
                             JdfftOptions options, OpCounter* ops)
    : tb_(tb), config_(config), options_(options), p_(options.processing_length(config)) {
    config.validate();
    require(p_ >= config.n_s, "processing length must be >= n_s");
    bands_ = correlation_bands(tb_, sigma2);
    spectrum_ = correlation_spectrum(bands_, p_, ops);
    if (options_.matched_filter == MatchedFilterMode::fft) {
        transfer_ = transfer_spectrum(tb_, p_, ops);
    }
    factors_.reserve(static_cast<std::size_t>(p_));
    for (int f = 0; f < p_; ++f) {
        factors_.push_back(BinFactor::factor(spectrum_.lambda[static_cast<std::size_t>(f)], options_.bin_solve, f, ops));
    }
}

CVector JdfftDetector::solve_all(const FieldWindow& window, OpCounter* ops) const {
    require(window.n_symbols == p_, "window processing length differs from the detector's");
    const int k = tb_.k;
    CVector freq;
    if (options_.matched_filter == MatchedFilterMode::direct) {
        freq = block_dft(matched_filter_direct(tb_, window.r, p_, ops), k, Direction::forward, ops);
    } else {
        freq = matched_filter_fft(transfer_, tb_.sf, k, window.r, ops);
    }
    for (int f = 0; f < p_; ++f) {
        freq.segment(f * k, k) = factors_[static_cast<std::size_t>(f)].solve(freq.segment(f * k, k), ops);
    }
    return block_dft(freq, k, Direction::inverse, ops);
}

CVector JdfftDetector::solve(const FieldWindow& window, OpCounter* ops) const {
    return solve_all(window, ops).head(static_cast<Eigen::Index>(tb_.k) * config_.n_s);
}

std::vector<double> JdfftDetector::bin_rcond() const {
    std::vector<double> out;
    out.reserve(factors_.size());
    for (const auto& f : factors_) {
        out.push_back(f.rcond());
    }
    return out;
}

std::vector<CVector> group_multicode(const CVector& soft, const SlotConfig& config, int n_symbols) {
    require(soft.size() == static_cast<Eigen::Index>(config.k) * n_symbols, "group_multicode: length mismatch");
    std::vector<CVector> out;
    for (int u = 0; u < config.num_users(); ++u) {
        const auto codes = config.codes_of(u);
        CVector s(static_cast<Eigen::Index>(codes.size()) * n_symbols);
        Eigen::Index pos = 0;
        for (int c : codes) {
            for (int i = 0; i < n_symbols; ++i) {
                s[pos++] = soft[i * config.k + c];
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

void finalize_result(DetectionResult& result, const SlotConfig& config) {
    result.user_symbols = group_multicode(result.soft, config, config.n_s);
    result.user_bits.clear();
    for (const auto& s : result.user_symbols) {
        result.user_bits.push_back(qpsk_demap(s));
    }
}

DetectionResult detect(const std::vector<CVector>& rx, int field, const CVector& midamble,
                       const ChannelRealization& realization, const CodeSet& codes, double sigma2,
                       const SlotConfig& config, const JdfftOptions& options, OpCounter* ops) {
    require(sigma2 > 0.0, "detect requires a positive noise variance");
    const FieldWindow window = extend_window(rx, field, midamble, realization, config, options);
    const TransferBlocks tb = build_transfer_blocks(realization.h, codes, config);
    const JdfftDetector det(tb, sigma2, config, options, ops);
    DetectionResult result;
    result.soft = det.solve(window, ops);
    result.bin_rcond = det.bin_rcond();
    finalize_result(result, config);
    return result;
}

}  // namespace fastjd
