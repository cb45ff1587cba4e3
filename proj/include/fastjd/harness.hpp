#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fastjd/channel.hpp"
#include "fastjd/jdfft.hpp"
#include "fastjd/signal_model.hpp"

namespace fastjd {

/// Detector names accepted by run_scenario.
/// jdfft uses jdfft options as given; jdfft61 / jdfft64 force that length.
const std::vector<std::string>& known_detectors();

struct ScenarioConfig {
    SlotConfig slot;
    std::string channel = "case1";
    /// Used when channel == "custom"; empty delays keep the flat profile.
    std::vector<int> custom_delays;
    std::vector<double> custom_powers;
    double custom_speed_kmh = 3.0;
    double carrier_hz = kDefaultCarrierHz;
    /// Consecutive slots follow one fading process instead of independent draws.
    bool correlated = false;
    std::vector<double> snr_grid{6.0, 8.0, 10.0, 12.0};
    int n_slots = 100;
    std::vector<std::string> detectors{"jdfft", "jdchol", "sdchol", "sdfft", "mf"};
    JdfftOptions jdfft;
    std::uint64_t master_seed = 1;
    std::uint64_t scramble_seed = 0x5eed;
    std::uint64_t midamble_seed = 0xa11d;

    ChannelProfile profile() const;
    /// Throws ConfigError.
    void validate() const;
    /// Canonical key=value rendering; its hash identifies a run.
    std::string canonical() const;
};

/// Reads an INI-style file with sections [slot], [channel], [run], [jdfft].
/// Missing keys keep their defaults; unknown keys are rejected.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& text);

/// Parses "a:b:step" (inclusive) or a comma list.
std::vector<double> parse_snr_grid(const std::string& spec);
std::vector<std::string> split_list(const std::string& s);

/// What a detector sees for one data field. `window` carries the
/// midamble-cancelled samples with W-1 extension at processing length n_s.
struct FieldContext {
    int slot = 0;
    int field = 0;
    double snr_db = 0.0;
    double sigma2 = 0.0;
    const SlotConfig* config = nullptr;
    const TransferBlocks* tb = nullptr;
    const FieldWindow* window = nullptr;
    /// Transmitted symbols of this field (K * n_s), for instrumentation.
    const CVector* transmitted = nullptr;
};

/// Extra detector: returns K * n_s soft symbols for one field.
using CustomDetector = std::function<CVector(const FieldContext&)>;

struct BerPoint {
    std::string detector;
    double snr_db = 0.0;
    int slots = 0;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    double ber() const { return bits == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(bits); }
    /// Half-width of the exact (Clopper-Pearson) 95% interval.
    double ci95() const;
};

struct BerCurve {
    std::vector<BerPoint> points;
    /// slot_errors[detector][snr index][slot]
    std::map<std::string, std::vector<std::vector<std::uint32_t>>> slot_errors;
    std::vector<double> snr_grid;
    std::uint64_t bits_per_slot = 0;

    const BerPoint& point(const std::string& detector, double snr_db) const;
    /// Header detector,snr_db,slots,bits,errors,ber,ci95 then one row per point.
    std::string csv() const;
};

BerCurve run_scenario(const ScenarioConfig& config,
                      const std::vector<std::pair<std::string, CustomDetector>>& extra = {});

/// Paired per-slot comparison of two detectors over SNR points in
/// [snr_lo, snr_hi]: mean of BER_a - BER_b per (slot, snr) pair and the
/// normal-approximation 95% half-width 1.96 sd / sqrt(n).
struct PairedDifference {
    double mean = 0.0;
    double ci95 = 0.0;
    std::size_t n = 0;
    bool significantly_greater() const { return mean > ci95; }
    bool within_ci() const { return std::abs(mean) <= ci95; }
};

PairedDifference paired_difference(const BerCurve& curve, const std::string& a, const std::string& b,
                                   double snr_lo, double snr_hi);

/// Manifest text: config hash, seeds, and the canonical configuration.
std::string run_manifest(const ScenarioConfig& config);
std::uint64_t config_hash(const ScenarioConfig& config);

/// Clopper-Pearson 95% interval [lo, hi] for `errors` out of `bits`.
std::pair<double, double> clopper_pearson(std::uint64_t errors, std::uint64_t bits);

}  // namespace fastjd
