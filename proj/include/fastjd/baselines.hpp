#pragma once

#include <vector>

#include "fastjd/signal_model.hpp"
#include "fastjd/structured.hpp"
#include "fastjd/types.hpp"

namespace fastjd {

/// Largest K * n_symbols the dense oracle accepts.
inline constexpr int kOracleGuard = 1024;

/// Dense MMSE reference: (sum_n A_n^H A_n + sigma2 I) d = sum_n A_n^H r_n,
/// with A_n cut to the length of r_n. Hermitian Cholesky solve.
CVector dense_mmse_oracle(const TransferBlocks& tb, const std::vector<CVector>& r, int n_symbols,
                          double sigma2);

/// Lower block-banded factor G with R ~= G G^H. Row i holds blocks
/// G(i, i-L) .. G(i, i) in rows[i][0..L] (index L is the diagonal).
struct BandedBlockFactor {
    int k = 0;
    int l = 0;
    std::vector<std::vector<CMatrix>> rows;
    int n_blocks() const { return static_cast<int>(rows.size()); }
};

/// Exact block Cholesky of the first `depth` block rows; every later row
/// copies row depth - 1. depth >= n_blocks gives the exact factor.
/// Throws NumericError(block row) on a non-positive pivot.
BandedBlockFactor approx_block_cholesky(const BlockBandSet& bands, int n_blocks, int depth,
                                        OpCounter* ops = nullptr);

/// Solves G G^H x = v by banded forward and backward substitution.
CVector banded_block_solve(const BandedBlockFactor& g, const CVector& v, OpCounter* ops = nullptr);

/// Default extension depth L + 2.
inline int jd_chol_depth(int l) { return l + 2; }

/// Joint detector with approximate block Cholesky. depth <= 0 selects L + 2.
CVector jd_chol(const BlockBandSet& bands, const CVector& v, int n_blocks, int depth = 0,
                OpCounter* ops = nullptr);

/// Chip-level downlink model: one channel per phase shared by all codes.
/// bands[m] = sum_n sum_u conj(h_n[u]) h_n[u+m] for m < w, plus sigma2 on
/// bands[0]; this is the lower band of the Toeplitz sum_n H_n^H H_n + sigma2 I.
struct ChipEqualizerModel {
    std::vector<CVector> h;
    CMatrix codes;
    std::vector<cplx> bands;
    double sigma2 = 0.0;
    int w() const { return static_cast<int>(bands.size()); }
};

ChipEqualizerModel make_chip_model(const std::vector<CVector>& h, const CodeSet& codes, double sigma2);

/// x_j = sum_n sum_u conj(h_n[u]) r_n[j+u] for the first n_chips chips.
CVector chip_matched_filter(const ChipEqualizerModel& model, const std::vector<CVector>& r, int n_chips,
                            OpCounter* ops = nullptr);

/// Despreads chip estimates: d[i*K + k] = sum_c conj(codes(c, k)) s[i*sf + c].
CVector despread(const CVector& s, const CMatrix& codes, int n_symbols);

/// Default chip-level extension depth (w - 1) + 2.
inline int sd_chol_depth(int w) { return w + 1; }

/// Chip-level MMSE by approximate banded Cholesky, then despreading.
/// depth <= 0 selects (w - 1) + 2.
CVector sd_chol(const ChipEqualizerModel& model, const std::vector<CVector>& r, int n_symbols, int depth = 0,
                OpCounter* ops = nullptr);

/// Smallest power of two >= sf * n_symbols + w - 1.
int sd_fft_length(int sf, int n_symbols, int w);

/// Chip-level circulant MMSE: S_f = sum_n conj(H_n,f) R_n,f / (sum_n |H_n,f|^2 + sigma2)
/// on an nfft-point grid (samples beyond nfft fold onto the start), inverse
/// FFT, first sf * n_symbols chips despread. nfft <= 0 selects sd_fft_length.
/// Throws NumericError(bin) when a denominator falls below 1e-12 of the largest.
CVector sd_fft(const ChipEqualizerModel& model, const std::vector<CVector>& r, int n_symbols, int nfft = 0,
               OpCounter* ops = nullptr);

/// Correlator bank normalized by the per-code energy diag(sum_n A_n^H A_n).
CVector matched_filter_detector(const TransferBlocks& tb, const std::vector<CVector>& r, int n_symbols,
                                OpCounter* ops = nullptr);

}  // namespace fastjd
