#pragma once

#include <vector>

#include "fastjd/channel.hpp"
#include "fastjd/signal_model.hpp"
#include "fastjd/structured.hpp"
#include "fastjd/types.hpp"

namespace fastjd {

enum class MatchedFilterMode { direct, fft };
enum class BinSolveMode { lu, explicit_inverse };

struct JdfftOptions {
    /// Processing length in symbols; 0 means SlotConfig::p.
    int p = 0;
    MatchedFilterMode matched_filter = MatchedFilterMode::direct;
    BinSolveMode bin_solve = BinSolveMode::lu;
    bool window_extension = true;

    int processing_length(const SlotConfig& config) const { return p > 0 ? p : config.p; }
};

/// Per-phase received samples of one data field as seen by the detector.
/// Holds sf * n_symbols chips, plus w - 1 trailing chips when extended;
/// n_symbols >= n_s counts the zero-transmission slots of a longer
/// processing length.
struct FieldWindow {
    std::vector<CVector> r;
    int n_symbols = 0;
    bool extended = false;
};

/// Cuts the window of data field `field` (0 or 1) out of the received burst
/// and removes the known midamble's channel-convolved contribution from every
/// chip of the window it touches. With window_extension the window gains the
/// w - 1 chips following the processing length, covering the multipath tail
/// of the last symbols.
FieldWindow extend_window(const std::vector<CVector>& rx, int field, const CVector& midamble,
                          const ChannelRealization& realization, const SlotConfig& config,
                          const JdfftOptions& options);

/// v = sum_n A_n^H r_n over `n_symbols` symbol columns (K * n_symbols).
/// Only the sf + w - 1 chip support of each column is visited, and chips
/// past the window end are skipped.
CVector matched_filter_direct(const TransferBlocks& tb, const std::vector<CVector>& r, int n_symbols,
                              OpCounter* ops = nullptr);

/// Frequency-domain matched filter sum_n Lambda1_n,f^H [F(r_n)]_f per bin,
/// returned in block-DFT layout (P blocks of K). Samples past p * sf are
/// folded onto the start of the window, which makes the result equal to
/// block_dft(A_c^H r) for the wrapped model.
CVector matched_filter_fft(const TransferSpectrum& ts, int sf, int k, const std::vector<CVector>& r,
                           OpCounter* ops = nullptr);

/// One factored K x K frequency bin.
class BinFactor {
public:
    /// Partial-pivoted LU (lu) or Gauss-Jordan inverse (explicit_inverse).
    /// Throws NumericError(bin) when a pivot falls below 1e-12 * max|Lambda|.
    static BinFactor factor(const CMatrix& lambda, BinSolveMode mode, int bin, OpCounter* ops = nullptr);

    CVector solve(const CVector& rhs, OpCounter* ops = nullptr) const;
    /// Reciprocal condition estimate: exact 1-norm value for the inverse
    /// mode, pivot-magnitude ratio for LU.
    double rcond() const noexcept { return rcond_; }
    BinSolveMode mode() const noexcept { return mode_; }

private:
    BinSolveMode mode_ = BinSolveMode::lu;
    CMatrix m_;
    std::vector<int> perm_;
    double rcond_ = 0.0;
};

/// Solves lambda x = rhs for one bin.
CVector per_bin_solve(const CMatrix& lambda, const CVector& rhs, BinSolveMode mode, int bin = -1,
                      OpCounter* ops = nullptr);

/// Block-FFT joint detector for one burst: spectra and bin factors are
/// computed once and reused for both data fields.
class JdfftDetector {
public:
    JdfftDetector(const TransferBlocks& tb, double sigma2, const SlotConfig& config, JdfftOptions options,
                  OpCounter* ops = nullptr);

    /// Soft estimates for all p symbol slots (K * p).
    CVector solve_all(const FieldWindow& window, OpCounter* ops = nullptr) const;
    /// Soft estimates of the n_s data symbols (K * n_s).
    CVector solve(const FieldWindow& window, OpCounter* ops = nullptr) const;

    int p() const noexcept { return p_; }
    const BlockBandSet& bands() const noexcept { return bands_; }
    const BlockSpectrum& spectrum() const noexcept { return spectrum_; }
    std::vector<double> bin_rcond() const;

private:
    TransferBlocks tb_;
    SlotConfig config_;
    JdfftOptions options_;
    int p_;
    BlockBandSet bands_;
    BlockSpectrum spectrum_;
    TransferSpectrum transfer_;
    std::vector<BinFactor> factors_;
};

struct DetectionResult {
    CVector soft;
    std::vector<CVector> user_symbols;
    std::vector<std::vector<std::uint8_t>> user_bits;
    std::vector<double> bin_rcond;
};

/// Per-user symbol streams: a user's codes in ascending index order, each
/// contributing its n_symbols consecutive symbols.
std::vector<CVector> group_multicode(const CVector& soft, const SlotConfig& config, int n_symbols);

/// Fills user_symbols/user_bits of a result from its soft vector.
void finalize_result(DetectionResult& result, const SlotConfig& config);

/// Full single-field pipeline: window, spectra, matched filter, per-bin
/// solves, inverse block DFT, truncation to n_s symbols, grouping, demapping.
DetectionResult detect(const std::vector<CVector>& rx, int field, const CVector& midamble,
                       const ChannelRealization& realization, const CodeSet& codes, double sigma2,
                       const SlotConfig& config, const JdfftOptions& options, OpCounter* ops = nullptr);

}  // namespace fastjd
