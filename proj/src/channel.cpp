#include "fastjd/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace fastjd {

namespace {

constexpr int kSinusoids = 32;
constexpr double kPulseSpan = 8.0;

CVector expand_phase(const std::vector<Tap>& taps, const std::vector<cplx>& gains, int w, double offset) {
    CVector h = CVector::Zero(w);
    if (offset == 0.0) {
        for (std::size_t l = 0; l < taps.size(); ++l) {
            h[taps[l].delay] += gains[l];
        }
        return h;
    }
    for (std::size_t l = 0; l < taps.size(); ++l) {
        for (int m = 0; m < w; ++m) {
            const double t = static_cast<double>(m) + offset - taps[l].delay;
            if (std::abs(t) <= kPulseSpan) {
                h[m] += gains[l] * raised_cosine(t);
            }
        }
    }
    return h;
}

}  // namespace

void ChannelProfile::validate(int w) const {
    require(!taps.empty(), "channel profile needs at least one tap");
    double total = 0.0;
    for (std::size_t i = 0; i < taps.size(); ++i) {
        require(taps[i].delay >= 0, "tap delays must be non-negative");
        require(taps[i].power >= 0.0, "tap powers must be non-negative");
        if (i > 0) {
            require(taps[i].delay > taps[i - 1].delay, "tap delays must be strictly increasing");
        }
        total += taps[i].power;
    }
    require(max_delay() + 1 <= w, "channel profile delay spread exceeds w");
    require(std::abs(total - 1.0) <= 1e-12, "tap powers must sum to one");
}

ChannelProfile make_profile(const std::string& name) {
    const double third = 1.0 / 3.0;
    if (name == "case1") {
        return {"case1", {{0, 0.5}, {4, 0.5}}, 3.0, true};
    }
    if (name == "case2") {
        return {"case2", {{1, third}, {5, third}, {47, 1.0 - 2.0 * third}}, 3.0, false};
    }
    if (name == "case2mod") {
        return {"case2mod", {{1, third}, {5, third}, {9, 1.0 - 2.0 * third}}, 3.0, false};
    }
    if (name == "case3") {
        return {"case3", {{0, 0.25}, {2, 0.25}, {4, 0.25}, {6, 0.25}}, 120.0, true};
    }
    if (name == "custom" || name == "flat") {
        return {name, {{0, 1.0}}, 0.0, false};
    }
    throw ConfigError("unknown channel profile: " + name);
}

ChannelProfile make_custom_profile(std::vector<int> delays, std::vector<double> powers, double speed_kmh,
                                   std::string name) {
    require(delays.size() == powers.size() && !delays.empty(), "custom profile needs matching delays/powers");
    ChannelProfile p;
    p.name = std::move(name);
    p.speed_kmh = speed_kmh;
    double total = 0.0;
    for (double v : powers) {
        total += v;
    }
    require(total > 0.0, "custom profile needs positive total power");
    for (std::size_t i = 0; i < delays.size(); ++i) {
        p.taps.push_back({delays[i], powers[i] / total});
    }
    return p;
}

double raised_cosine(double t, double rolloff) {
    if (t == 0.0) {
        return 1.0;
    }
    const double pit = std::numbers::pi * t;
    const double sinc = std::sin(pit) / pit;
    const double den = 1.0 - 4.0 * rolloff * rolloff * t * t;
    if (std::abs(den) < 1e-10) {
        return std::numbers::pi / 4.0 * sinc;
    }
    return sinc * std::cos(rolloff * pit) / den;
}

ChannelRealization realize(const ChannelProfile& profile, const SlotConfig& config, double carrier_hz,
                           std::int64_t burst_index, std::uint64_t seed) {
    profile.validate(config.w);
    const double doppler_hz = profile.speed_kmh / 3.6 / 299792458.0 * carrier_hz;
    const double t = static_cast<double>(burst_index) * kBurstPeriodS;

    ChannelRealization out;
    out.seed = seed;
    out.burst_index = burst_index;
    std::uniform_real_distribution<double> uni(0.0, 2.0 * std::numbers::pi);
    for (std::size_t l = 0; l < profile.taps.size(); ++l) {
        std::mt19937_64 rng(derive_seed(seed, 0x7A95ull, l));
        cplx g{0.0, 0.0};
        for (int n = 0; n < kSinusoids; ++n) {
            const double alpha = uni(rng);
            const double phi = uni(rng);
            const double arg = 2.0 * std::numbers::pi * doppler_hz * t * std::cos(alpha) + phi;
            g += cplx{std::cos(arg), std::sin(arg)};
        }
        g *= std::sqrt(profile.taps[l].power / kSinusoids);
        out.tap_gains.push_back(g);
    }
    for (int n = 0; n < config.n_over; ++n) {
        out.h.push_back(expand_phase(profile.taps, out.tap_gains, config.w,
                                     static_cast<double>(n) / config.n_over));
    }
    return out;
}

ChannelRealization realization_from_taps(const CVector& chip_taps, const SlotConfig& config) {
    require(chip_taps.size() == config.w, "chip taps must have length w");
    std::vector<Tap> taps;
    std::vector<cplx> gains;
    for (int m = 0; m < config.w; ++m) {
        if (chip_taps[m] != cplx{}) {
            taps.push_back({m, 0.0});
            gains.push_back(chip_taps[m]);
        }
    }
    ChannelRealization out;
    out.tap_gains = gains;
    out.h.push_back(chip_taps);
    for (int n = 1; n < config.n_over; ++n) {
        out.h.push_back(expand_phase(taps, gains, config.w, static_cast<double>(n) / config.n_over));
    }
    return out;
}

double noise_variance(double ebn0_db, int sf) {
    if (std::isinf(ebn0_db) && ebn0_db > 0) {
        return 0.0;
    }
    return static_cast<double>(sf) / (2.0 * std::pow(10.0, ebn0_db / 10.0));
}

void add_noise(std::vector<CVector>& r, double sigma2, std::uint64_t noise_seed) {
    if (sigma2 <= 0.0) {
        return;
    }
    const double sd = std::sqrt(sigma2 / 2.0);
    for (std::size_t n = 0; n < r.size(); ++n) {
        std::mt19937_64 rng(derive_seed(noise_seed, 0xA015Eull, n));
        std::normal_distribution<double> gauss(0.0, sd);
        for (Eigen::Index i = 0; i < r[n].size(); ++i) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            r[n][i] += cplx{re, im};
        }
    }
}

Received propagate(const CVector& chips, const ChannelRealization& realization, const SlotConfig& config,
                   double snr_db, std::uint64_t noise_seed) {
    require(static_cast<int>(realization.h.size()) == config.n_over, "realization phase count mismatch");
    require(chips.size() >= config.field_chips(), "chip sequence shorter than one data field");
    Received out;
    out.sigma2 = noise_variance(snr_db, config.sf);
    for (const auto& hn : realization.h) {
        out.r.push_back(convolve(chips, hn));
    }
    add_noise(out.r, out.sigma2, noise_seed);
    return out;
}

}  // namespace fastjd
