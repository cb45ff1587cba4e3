#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fastjd {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Raised for inconsistent parameters, lengths or names supplied by the caller.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a factorization breaks down or a spectral bin is singular.
/// `index()` is the offending frequency bin or block row (-1 when not applicable).
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, int index = -1)
        : std::runtime_error(what), index_(index) {}
    int index() const noexcept { return index_; }

private:
    int index_;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) {
        throw ConfigError(msg);
    }
}

constexpr int ceil_div(int a, int b) { return (a + b - 1) / b; }

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Complex-operation tallies gathered from the numeric kernels. Every field
/// counts complex multiply-accumulates (or butterfly outputs for FFTs).
struct OpCounter {
    std::uint64_t matched_filter = 0;
    std::uint64_t fft = 0;
    std::uint64_t bin_factor = 0;
    std::uint64_t bin_solve = 0;
    std::uint64_t cholesky = 0;
    std::uint64_t substitution = 0;

    void reset() { *this = OpCounter{}; }
};

inline void tally(OpCounter* ops, std::uint64_t OpCounter::*field, std::uint64_t n) {
    if (ops != nullptr) {
        ops->*field += n;
    }
}

}  // namespace fastjd
