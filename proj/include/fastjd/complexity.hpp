#pragma once

#include <string>
#include <vector>

#include "fastjd/jdfft.hpp"
#include "fastjd/signal_model.hpp"

namespace fastjd {

enum class Detector { jdfft, jdchol, sdchol, sdfft, mf };

Detector parse_detector(const std::string& name);
std::string detector_name(Detector d);

/// Complex to real operation factor and burst-rate constants.
inline constexpr double kRealOpsPerComplex = 4.0;
inline constexpr double kOncePerBurst = 100.0;
inline constexpr double kTwicePerBurst = 200.0;

struct MropsEntry {
    std::string label;
    double count = 0.0;  // complex operations per execution
    double rate = 0.0;   // executions per second
    double mrops() const { return count * kRealOpsPerComplex * rate / 1e6; }
};

struct MropsReport {
    Detector detector = Detector::jdfft;
    std::vector<MropsEntry> entries;
    std::vector<std::string> notes;

    double total() const;
    /// Mrops of the first entry whose label matches, NaN when absent.
    double entry(const std::string& label) const;
    /// label,count,rate,mrops with a trailing total row.
    std::string csv() const;
    /// Aligned two-section table (once / twice per burst) with the total.
    std::string table() const;
};

/// Entry labels of the joint FFT detector.
namespace mrops_label {
inline constexpr const char* system_matrix = "Calculating A";
inline constexpr const char* gram = "Calculating A^H A";
inline constexpr const char* band_fft = "Calculating F(R_i)";
inline constexpr const char* bin_inverse = "Calculating inverse of Lambda(k)";
inline constexpr const char* bin_lu = "LU of Lambda(k)";
inline constexpr const char* transfer_fft = "Calculating Lambda1(k)";
inline constexpr const char* matched_filter = "Calculating A^H r";
inline constexpr const char* mf_fft = "Calculating F[A^H r]";
inline constexpr const char* rx_fft = "Calculating F(r)";
inline constexpr const char* mf_bins = "Calculating Lambda1(k)^H F(r)_k";
inline constexpr const char* bin_solve = "Calculating F(d)_k";
inline constexpr const char* inverse_fft = "Calculating inverse FFT of F(d)";
}  // namespace mrops_label

/// Closed-form operation counts per detector. Only the matched-filter and
/// bin-solve modes of `options` matter, plus its processing length.
MropsReport mrops(const SlotConfig& config, Detector detector, const JdfftOptions& options = {});

/// The A^H A count under the fractional n_max = min(N_s, (SF+W-1)/SF + 1)
/// with the Hermitian half taken on the first term.
double gram_count(const SlotConfig& config);
/// Same formula exactly as printed (no Hermitian half).
double gram_count_as_printed(const SlotConfig& config);

}  // namespace fastjd
