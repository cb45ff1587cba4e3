#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fastjd/types.hpp"

namespace fastjd {

inline constexpr int kMidambleChips = 512;
inline constexpr int kGuardChips = 96;

/// Burst-level parameters. Defaults are the Burst Type I downlink case
/// (SF 16, 61 symbols per data field, 57-chip channel).
struct SlotConfig {
    int sf = 16;
    int k = 8;
    int n_s = 61;
    int w = 57;
    int n_over = 1;
    int p = 61;
    /// code index -> user index (0-based). Empty means one user per code.
    std::vector<int> code_allocation;

    int n_c() const { return sf * n_s + w - 1; }
    /// Delay spread in symbols: transfer blocks B(0)..B(l()) may be nonzero.
    int l() const { return ceil_div(sf + w - 1, sf) - 1; }
    int response_length() const { return sf + w - 1; }
    int field_chips() const { return sf * n_s; }
    int burst_chips() const { return 2 * field_chips() + kMidambleChips + kGuardChips; }
    int field_start(int field) const { return field == 0 ? 0 : field_chips() + kMidambleChips; }
    int num_users() const;
    int user_of(int code) const;
    /// Codes owned by `user`, ascending.
    std::vector<int> codes_of(int user) const;

    /// Throws ConfigError when any invariant is violated.
    void validate() const;
};

/// Spreading codes as columns of an (sf x k) matrix; unit-modulus chips.
struct CodeSet {
    CMatrix codes;

    int sf() const { return static_cast<int>(codes.rows()); }
    int k() const { return static_cast<int>(codes.cols()); }
};

/// Walsh-Hadamard rows with a common chip-wise QPSK scrambling overlay.
/// Rows 1..k are used when k < sf (the all-ones row is skipped), rows
/// 0..sf-1 when k == sf. scramble_seed == 0 disables scrambling.
CodeSet generate_codes(int sf, int k, std::uint64_t scramble_seed);

/// Known midamble: pseudo-random unit-modulus QPSK chips.
CVector make_midamble(std::uint64_t seed, int length = kMidambleChips);

/// Gray-mapped QPSK: bit pair (b0, b1) -> ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2).
CVector qpsk_modulate(std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> qpsk_demap(const CVector& symbols);

/// Spreads one data field. `d` is code-major interleaved: symbol i of code k
/// sits at index i * K + k. Returns sf * n_symbols chips.
CVector spread_field(const CVector& d, const CodeSet& codes, int n_symbols);

/// Burst = [field 1 | midamble | field 2 | guard]. `frame` holds both data
/// fields back to back (2 * K * n_s symbols).
CVector spread_and_assemble(const CVector& frame, const CodeSet& codes, const CVector& midamble,
                            const SlotConfig& config);

/// Per oversampling phase, the stacked transfer blocks {B(0); ...; B(L)}.
/// Column k of phase n is conv(c_k, h_n) zero-padded to (L+1) * sf chips.
struct TransferBlocks {
    int sf = 0;
    int k = 0;
    int l = 0;
    int response_length = 0;
    std::vector<CMatrix> stacked;

    int phases() const { return static_cast<int>(stacked.size()); }
    auto block(int phase, int i) const { return stacked[phase].middleRows(i * sf, sf); }
};

TransferBlocks build_transfer_blocks(const std::vector<CVector>& h, const CodeSet& codes,
                                     const SlotConfig& config);

/// Dense block-Toeplitz system matrix of one phase. Block column j holds
/// B(0)..B(L) starting at chip row j * sf; rows beyond `n_rows` are cut.
/// n_rows < 0 means the full sf * n_symbols + w - 1 rows.
CMatrix build_system_matrix(const TransferBlocks& tb, int phase, int n_symbols, int n_rows = -1);

/// Linear convolution, full length a.size() + b.size() - 1.
CVector convolve(const CVector& a, const CVector& b);

/// Random QPSK frame for both data fields together with its bits
/// (two bits per symbol, in symbol order).
struct Frame {
    CVector symbols;
    std::vector<std::uint8_t> bits;
};
Frame random_frame(int n_symbols_total, std::mt19937_64& rng);

/// Deterministic 64-bit seed derivation (splitmix64 over the inputs).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

}  // namespace fastjd
