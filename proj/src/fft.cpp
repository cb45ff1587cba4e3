#include "fastjd/fft.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace fastjd {

FftPlan::FftPlan(std::size_t n) : n_(n), pow2_(is_power_of_two(n)) {
    require(n >= 1, "FFT length must be positive");
    twiddle_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        twiddle_[k] = {std::cos(ang), std::sin(ang)};
    }
    if (pow2_) {
        const int bits = std::countr_zero(n);
        bitrev_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (int b = 0; b < bits; ++b) {
                r |= ((i >> b) & 1u) << (bits - 1 - b);
            }
            bitrev_[i] = r;
        }
    }
}

std::uint64_t FftPlan::op_count() const noexcept {
    if (pow2_) {
        return static_cast<std::uint64_t>(n_) * static_cast<std::uint64_t>(std::countr_zero(n_));
    }
    return static_cast<std::uint64_t>(n_) * n_;
}

void FftPlan::radix2_inplace(cplx* x, bool inverse) const {
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j = bitrev_[i];
        if (i < j) {
            std::swap(x[i], x[j]);
        }
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t step = n_ / len;
        for (std::size_t base = 0; base < n_; base += len) {
            for (std::size_t j = 0; j < half; ++j) {
                const cplx w = inverse ? std::conj(twiddle_[j * step]) : twiddle_[j * step];
                const cplx t = w * x[base + j + half];
                x[base + j + half] = x[base + j] - t;
                x[base + j] += t;
            }
        }
    }
}

void FftPlan::direct(const cplx* in, cplx* out, bool inverse) const {
    for (std::size_t f = 0; f < n_; ++f) {
        cplx acc{0.0, 0.0};
        std::size_t idx = 0;
        for (std::size_t t = 0; t < n_; ++t) {
            const cplx w = inverse ? std::conj(twiddle_[idx]) : twiddle_[idx];
            acc += w * in[t];
            idx += f;
            if (idx >= n_) {
                idx -= n_;
            }
        }
        out[f] = acc;
    }
}

void FftPlan::transform(cplx* data, Direction dir, std::size_t stride, OpCounter* ops) const {
    const bool inv = dir == Direction::inverse;
    if (pow2_ && stride == 1) {
        radix2_inplace(data, inv);
    } else {
        std::vector<cplx> in(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            in[i] = data[i * stride];
        }
        if (pow2_) {
            radix2_inplace(in.data(), inv);
            for (std::size_t i = 0; i < n_; ++i) {
                data[i * stride] = in[i];
            }
        } else {
            std::vector<cplx> out(n_);
            direct(in.data(), out.data(), inv);
            for (std::size_t i = 0; i < n_; ++i) {
                data[i * stride] = out[i];
            }
        }
    }
    tally(ops, &OpCounter::fft, op_count());
}

CVector block_dft(const CVector& x, int k, Direction dir, OpCounter* ops) {
    require(k >= 1 && x.size() % k == 0, "block_dft: length must be a multiple of the block size");
    const auto p = static_cast<std::size_t>(x.size() / k);
    FftPlan plan(p);
    CVector y = x;
    for (int col = 0; col < k; ++col) {
        plan.transform(y.data() + col, dir, static_cast<std::size_t>(k), ops);
    }
    if (dir == Direction::inverse) {
        y /= static_cast<double>(p);
    }
    return y;
}

CMatrix block_dft_matrix(int p, int k) {
    CMatrix d = CMatrix::Zero(static_cast<Eigen::Index>(p) * k, static_cast<Eigen::Index>(p) * k);
    for (int r = 0; r < p; ++r) {
        for (int c = 0; c < p; ++c) {
            const double ang = 2.0 * std::numbers::pi * static_cast<double>((r * c) % p) / p;
            const cplx w{std::cos(ang), std::sin(ang)};
            for (int i = 0; i < k; ++i) {
                d(r * k + i, c * k + i) = w;
            }
        }
    }
    return d;
}

}  // namespace fastjd
