#pragma once

#include <vector>

#include "fastjd/fft.hpp"
#include "fastjd/signal_model.hpp"
#include "fastjd/types.hpp"

namespace fastjd {

/// Bands {R_0, ..., R_L} of the Hermitian banded block-Toeplitz matrix
/// R = sum_n A_n^H A_n + sigma2 I. Block (i, j) of R is R_{i-j} for
/// 0 <= i-j <= L and R_{j-i}^H above the diagonal. sigma2 is already
/// folded into R_0.
struct BlockBandSet {
    std::vector<CMatrix> bands;
    double sigma2 = 0.0;

    int l() const { return static_cast<int>(bands.size()) - 1; }
    int k() const { return static_cast<int>(bands.front().rows()); }
};

/// Per-bin K x K blocks Lambda_f, f = 0..p-1, of the block-circulant extension.
struct BlockSpectrum {
    std::vector<CMatrix> lambda;
    int p() const { return static_cast<int>(lambda.size()); }
};

/// Per phase, per-bin sf x K blocks of the circulant extension of A.
struct TransferSpectrum {
    std::vector<std::vector<CMatrix>> lambda1;
    int p() const { return lambda1.empty() ? 0 : static_cast<int>(lambda1.front().size()); }
};

/// R_m = sum_n sum_i B_n(i)^H B_n(i+m), m = 0..L, plus sigma2 I on R_0.
BlockBandSet correlation_bands(const TransferBlocks& tb, double sigma2);

/// Lambda_f = R_0 + sum_m R_m e^{-j2pi f m/p} + R_m^H e^{+j2pi f m/p},
/// evaluated as K^2 scalar p-point FFTs of the two-sided band sequence.
/// Requires p >= 2L+1.
BlockSpectrum correlation_spectrum(const BlockBandSet& bands, int p, OpCounter* ops = nullptr);

/// Lambda1_f = sum_i B(i) e^{-j2pi f i/p} per phase (sf*K scalar FFTs). Requires p >= L+1.
TransferSpectrum transfer_spectrum(const TransferBlocks& tb, int p, OpCounter* ops = nullptr);

/// Dense (n_blocks*K)^2 banded block-Toeplitz R reconstructed from its bands.
CMatrix dense_band_matrix(const BlockBandSet& bands, int n_blocks);

/// Dense block-circulant extension R_c of size p*K. Test/oracle use only;
/// refuses more than kDenseGuardRows rows.
CMatrix circulant_correlation(const BlockBandSet& bands, int p);

/// Dense block-circulant extension A_c (p*sf x p*K) of one phase's system
/// matrix; rows beyond p*sf wrap to the top. Test/oracle use only.
CMatrix circulant_system(const TransferBlocks& tb, int phase, int p);

inline constexpr int kDenseGuardRows = 1024;

}  // namespace fastjd
