#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fastjd/types.hpp"

namespace fastjd {

enum class Direction { forward, inverse };

/// Scalar DFT of a fixed length. Powers of two use an iterative radix-2
/// decimation-in-time kernel; every other length falls back to a direct
/// O(n^2) sum over a precomputed twiddle table.
///
/// forward computes X[f] = sum_t x[t] exp(-j 2 pi f t / n); inverse uses the
/// conjugate kernel and is NOT scaled by 1/n.
class FftPlan {
public:
    explicit FftPlan(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    bool radix2() const noexcept { return pow2_; }

    /// In-place transform of `size()` samples spaced `stride` elements apart.
    void transform(cplx* data, Direction dir, std::size_t stride = 1,
                   OpCounter* ops = nullptr) const;

    void forward(std::span<cplx> x, OpCounter* ops = nullptr) const {
        transform(x.data(), Direction::forward, 1, ops);
    }
    void inverse(std::span<cplx> x, OpCounter* ops = nullptr) const {
        transform(x.data(), Direction::inverse, 1, ops);
    }

    /// Complex operations one transform costs in this plan
    /// (n log2 n butterfly outputs for radix-2, n^2 MACs otherwise).
    std::uint64_t op_count() const noexcept;

private:
    void radix2_inplace(cplx* x, bool inverse) const;
    void direct(const cplx* in, cplx* out, bool inverse) const;

    std::size_t n_;
    bool pow2_;
    std::vector<cplx> twiddle_;  // exp(-j 2 pi k / n), k < n
    std::vector<std::size_t> bitrev_;
};

/// Block DFT over `x.size() / k` consecutive blocks of `k` elements:
/// forward applies D^H (k independent P-point FFTs over stride-k
/// subsequences); inverse applies D and scales by 1/P so that
/// inverse(forward(x)) == x.
CVector block_dft(const CVector& x, int k, Direction dir, OpCounter* ops = nullptr);

/// Dense (P*k x P*k) block-DFT matrix with block (r, c) = exp(+j 2 pi r c / P) I_k.
/// Oracle use only.
CMatrix block_dft_matrix(int p, int k);

}  // namespace fastjd
