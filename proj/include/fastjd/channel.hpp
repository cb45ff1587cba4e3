#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fastjd/signal_model.hpp"
#include "fastjd/types.hpp"

namespace fastjd {

struct Tap {
    int delay = 0;       // chips
    double power = 0.0;  // linear, fraction of the total
};

struct ChannelProfile {
    std::string name;
    std::vector<Tap> taps;
    double speed_kmh = 0.0;
    /// True for profiles whose tap table is a stand-in rather than a published one.
    bool stand_in = false;

    int max_delay() const { return taps.empty() ? 0 : taps.back().delay; }
    /// Throws ConfigError unless delays are strictly increasing, max delay < w,
    /// powers are non-negative and sum to one.
    void validate(int w) const;
};

/// Named profiles: case1, case2, case2mod, case3, custom (flat single tap).
ChannelProfile make_profile(const std::string& name);

ChannelProfile make_custom_profile(std::vector<int> delays, std::vector<double> powers, double speed_kmh,
                                   std::string name = "custom");

inline constexpr double kDefaultCarrierHz = 2.0e9;
inline constexpr double kBurstPeriodS = 0.01;

/// One block-fading draw: per-phase tap vectors of length w. Phase 0 is
/// chip-aligned; phase n samples the channel n / n_over chips later through
/// a raised-cosine pulse (roll-off 0.22).
struct ChannelRealization {
    std::vector<CVector> h;
    std::vector<cplx> tap_gains;
    std::uint64_t seed = 0;
    std::int64_t burst_index = 0;
};

/// Tap gains follow a sum-of-sinusoids Rayleigh process evaluated at
/// t = burst_index * 10 ms, so consecutive bursts are Jakes-correlated and a
/// zero-speed profile is static. E|g_l|^2 = power_l.
ChannelRealization realize(const ChannelProfile& profile, const SlotConfig& config, double carrier_hz,
                           std::int64_t burst_index, std::uint64_t seed);

/// Realization with explicitly given chip-rate taps (length w), expanded to
/// all oversampling phases with the same pulse model as realize().
ChannelRealization realization_from_taps(const CVector& chip_taps, const SlotConfig& config);

/// Overall raised-cosine pulse (roll-off 0.22) used for fractional phases.
double raised_cosine(double t, double rolloff = 0.22);

/// Per-chip complex noise variance for a per-user Eb/N0 in dB, with
/// unit-energy QPSK symbols, unit-modulus chips and E||h||^2 = 1.
/// +inf yields 0.
double noise_variance(double ebn0_db, int sf);

struct Received {
    std::vector<CVector> r;  // per phase, length chips.size() + w - 1
    double sigma2 = 0.0;
};

Received propagate(const CVector& chips, const ChannelRealization& realization, const SlotConfig& config,
                   double snr_db, std::uint64_t noise_seed);

/// Adds CN(0, sigma2) samples to every phase in place; sigma2 == 0 is a no-op.
void add_noise(std::vector<CVector>& r, double sigma2, std::uint64_t noise_seed);

}  // namespace fastjd
