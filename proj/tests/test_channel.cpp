#include <doctest.h>

#include "fastjd/channel.hpp"
#include "oracles.hpp"

using namespace fastjd;

TEST_CASE("published profiles") {
    const ChannelProfile c2 = make_profile("case2");
    REQUIRE(c2.taps.size() == 3);
    CHECK(c2.taps[0].delay == 1);
    CHECK(c2.taps[1].delay == 5);
    CHECK(c2.taps[2].delay == 47);
    for (const auto& t : c2.taps) CHECK(t.power == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(c2.speed_kmh == 3.0);
    CHECK_FALSE(c2.stand_in);

    const ChannelProfile m = make_profile("case2mod");
    CHECK(m.taps[2].delay == 9);
    CHECK(make_profile("case3").speed_kmh == 120.0);
    CHECK(make_profile("case1").stand_in);
    CHECK_THROWS_AS(make_profile("case4"), ConfigError);
}

TEST_CASE("profile validation") {
    ChannelProfile p = make_profile("case2");
    CHECK_NOTHROW(p.validate(57));
    CHECK_THROWS_AS(p.validate(47), ConfigError);
    p.taps[1].delay = 1;
    CHECK_THROWS_AS(p.validate(57), ConfigError);
    p = make_profile("case1");
    p.taps[0].power = 0.4;
    CHECK_THROWS_AS(p.validate(57), ConfigError);
    const ChannelProfile c = make_custom_profile({0, 3}, {2.0, 2.0}, 30.0);
    CHECK(c.taps[1].power == 0.5);
    CHECK_NOTHROW(c.validate(4));
}

TEST_CASE("chip-rate phase has taps exactly at profile delays") {
    SlotConfig c;
    const ChannelRealization r = realize(make_profile("case2"), c, kDefaultCarrierHz, 0, 99);
    REQUIRE(r.h.size() == 1);
    for (int m = 0; m < 57; ++m) {
        const bool tap = m == 1 || m == 5 || m == 47;
        CHECK((std::abs(r.h[0][m]) > 0.0) == tap);
    }
}

TEST_CASE("flat fading has unit mean power") {
    SlotConfig c;
    c.w = 1;
    const ChannelProfile flat = make_profile("custom");
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        sum += std::norm(realize(flat, c, kDefaultCarrierHz, 0, static_cast<std::uint64_t>(i)).h[0][0]);
    }
    CHECK(sum / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("every profile has unit mean energy") {
    SlotConfig c;
    for (const char* name : {"case1", "case2", "case2mod", "case3"}) {
        double sum = 0.0;
        const int n = 20000;
        for (int i = 0; i < n; ++i) {
            sum += realize(make_profile(name), c, kDefaultCarrierHz, 0, static_cast<std::uint64_t>(i)).h[0].squaredNorm();
        }
        CHECK(sum / n == doctest::Approx(1.0).epsilon(0.03));
    }
}

TEST_CASE("zero Doppler is static, moving channel decorrelates") {
    SlotConfig c;
    const ChannelProfile still = make_custom_profile({0, 2}, {1, 1}, 0.0);
    CHECK(realize(still, c, kDefaultCarrierHz, 0, 5).h[0] == realize(still, c, kDefaultCarrierHz, 17, 5).h[0]);
    const ChannelProfile fast = make_profile("case3");
    CHECK(realize(fast, c, kDefaultCarrierHz, 0, 5).h[0] != realize(fast, c, kDefaultCarrierHz, 1, 5).h[0]);
}

TEST_CASE("noiseless propagation is linear convolution") {
    std::mt19937_64 rng(3);
    SlotConfig c;
    const ChannelRealization real = realize(make_profile("case1"), c, kDefaultCarrierHz, 0, 4);
    const CVector x = oracle::random_vector(c.burst_chips(), rng);
    const CVector y = oracle::random_vector(c.burst_chips(), rng);
    const Received rx = propagate(x, real, c, INFINITY, 0);
    CHECK(rx.sigma2 == 0.0);
    CHECK(oracle::rel(rx.r[0], oracle::convolve(x, real.h[0])) < 1e-12);
    const cplx a(0.3, 1.0), b(-2.0, 0.5);
    const Received lin = propagate(a * x + b * y, real, c, INFINITY, 0);
    CHECK(oracle::rel(lin.r[0], CVector(a * rx.r[0] + b * propagate(y, real, c, INFINITY, 0).r[0])) < 1e-12);
}

TEST_CASE("noise variance and whiteness") {
    CHECK(noise_variance(10.0, 16) == doctest::Approx(0.8));
    CHECK(noise_variance(INFINITY, 16) == 0.0);
    std::vector<CVector> r{CVector::Zero(1000000)};
    add_noise(r, 0.7, 21);
    const CVector& n = r[0];
    const double var = n.squaredNorm() / static_cast<double>(n.size());
    CHECK(var == doctest::Approx(0.7).epsilon(0.03));
    for (int lag = 1; lag <= 10; ++lag) {
        cplx acc{0.0, 0.0};
        for (Eigen::Index i = lag; i < n.size(); ++i) acc += n[i] * std::conj(n[i - lag]);
        CHECK(std::abs(acc) / (var * static_cast<double>(n.size())) < 0.02);
    }
}

TEST_CASE("oversampled phases") {
    SlotConfig c;
    c.n_over = 2;
    const ChannelRealization r = realize(make_profile("case2"), c, kDefaultCarrierHz, 0, 8);
    REQUIRE(r.h.size() == 2);
    CHECK(r.h[0] != r.h[1]);
    // Half-chip phase is the pulse-interpolated tap set.
    CVector expect = CVector::Zero(57);
    const int delays[] = {1, 5, 47};
    for (int l = 0; l < 3; ++l) {
        for (int m = 0; m < 57; ++m) {
            const double t = m + 0.5 - delays[l];
            if (std::abs(t) <= 8.0) expect[m] += r.tap_gains[static_cast<std::size_t>(l)] * raised_cosine(t);
        }
    }
    CHECK(oracle::rel(r.h[1], expect) < 1e-14);
    const Received rx = propagate(CVector::Ones(c.burst_chips()), r, c, 10.0, 1);
    CHECK(rx.r.size() == 2);
    CHECK(raised_cosine(0.0) == 1.0);
    CHECK(std::abs(raised_cosine(3.0)) < 1e-15);
}
