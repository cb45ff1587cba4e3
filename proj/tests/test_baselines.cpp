#include <doctest.h>

#include "fastjd/baselines.hpp"
#include "fastjd/channel.hpp"
#include "fastjd/jdfft.hpp"
#include "oracles.hpp"

using namespace fastjd;

namespace {

SlotConfig small(int sf, int k, int n_s, int w) {
    SlotConfig c;
    c.sf = sf;
    c.k = k;
    c.n_s = n_s;
    c.p = n_s;
    c.w = w;
    return c;
}

// Dense chip MMSE with the Toeplitz convolution model, then despreading.
CVector dense_chip_mmse(const std::vector<CVector>& h, const std::vector<CVector>& r, const CMatrix& codes,
                        int n_symbols, double sigma2) {
    const int n = static_cast<int>(codes.rows()) * n_symbols;
    CMatrix g = sigma2 * CMatrix::Identity(n, n);
    CVector x = CVector::Zero(n);
    for (std::size_t p = 0; p < h.size(); ++p) {
        const CMatrix hm = oracle::convolution_matrix(h[p], n).topRows(r[p].size());
        g += hm.adjoint() * hm;
        x += hm.adjoint() * r[p];
    }
    return oracle::despreader(codes, n_symbols) * CVector(g.llt().solve(x));
}

struct Burst {
    SlotConfig config;
    CodeSet codes;
    CVector midamble;
    ChannelRealization real;
    Frame frame;
    Received rx;
    FieldWindow window;
    TransferBlocks tb;
};

Burst make_burst(const char* profile, double snr, std::uint64_t seed) {
    Burst b;
    b.codes = generate_codes(16, 8, 0x5eed);
    b.midamble = make_midamble(seed);
    b.real = realize(make_profile(profile), b.config, kDefaultCarrierHz, 0, seed);
    std::mt19937_64 rng(seed);
    b.frame = random_frame(2 * 8 * 61, rng);
    b.rx = propagate(spread_and_assemble(b.frame.symbols, b.codes, b.midamble, b.config), b.real, b.config, snr, seed + 9);
    b.window = extend_window(b.rx.r, 0, b.midamble, b.real, b.config, JdfftOptions{});
    b.tb = build_transfer_blocks(b.real.h, b.codes, b.config);
    return b;
}

}  // namespace

TEST_CASE("dense oracle: residual, matched-filter limit, noiseless limit, guard") {
    std::mt19937_64 rng(1);
    const SlotConfig c = small(4, 3, 6, 7);
    const CodeSet codes = generate_codes(4, 3, 1);
    const CVector h = oracle::random_vector(7, rng);
    const TransferBlocks tb = build_transfer_blocks({h}, codes, c);
    const CMatrix a = build_system_matrix(tb, 0, 6);
    const CVector r = oracle::random_vector(a.rows(), rng);
    const CVector d = dense_mmse_oracle(tb, {r}, 6, 0.5);
    const CMatrix gram = a.adjoint() * a + 0.5 * CMatrix::Identity(18, 18);
    CHECK((gram * d - a.adjoint() * r).norm() / (a.adjoint() * r).norm() <= 1e-10);

    const double big = 1e8;
    CHECK(oracle::rel(CVector(big * dense_mmse_oracle(tb, {r}, 6, big)), CVector(a.adjoint() * r)) < 1e-6);

    const CVector x = oracle::random_vector(18, rng);
    const CVector rx = a * x;
    const double e1 = oracle::rel(dense_mmse_oracle(tb, {rx}, 6, 1e-4), x);
    const double e2 = oracle::rel(dense_mmse_oracle(tb, {rx}, 6, 1e-6), x);
    CHECK(e1 < 1e-2);
    CHECK(e2 < e1 / 50.0);

    SlotConfig huge;
    huge.k = 16;
    huge.n_s = 70;
    huge.p = 70;
    const TransferBlocks tbh = build_transfer_blocks({CVector::Ones(57)}, generate_codes(16, 16, 1), huge);
    CHECK_THROWS_AS(dense_mmse_oracle(tbh, {CVector::Zero(huge.n_c())}, 70, 1.0), ConfigError);
}

TEST_CASE("jd_chol with L = 0 applies R_0^{-1} blockwise") {
    std::mt19937_64 rng(2);
    BlockBandSet b;
    b.bands = {oracle::random_hpd(4, rng)};
    const CVector v = oracle::random_vector(4 * 9, rng);
    const CVector d = jd_chol(b, v, 9);
    for (int i = 0; i < 9; ++i) {
        CHECK(oracle::rel(CVector(d.segment(i * 4, 4)), CVector(b.bands[0].llt().solve(v.segment(i * 4, 4)))) < 1e-12);
    }
}

TEST_CASE("jd_chol with full-depth factorization equals the dense oracle") {
    const Burst b = make_burst("case2", 8.0, 3);
    const BlockBandSet bands = correlation_bands(b.tb, b.rx.sigma2);
    const CVector v = matched_filter_direct(b.tb, b.window.r, 61);
    const CVector ref = dense_mmse_oracle(b.tb, b.window.r, 61, b.rx.sigma2);
    CHECK(oracle::rel(jd_chol(bands, v, 61, 61), ref) <= 1e-10);
}

TEST_CASE("approximate jd_chol converges towards the oracle as depth grows") {
    const Burst b = make_burst("case1", 10.0, 4);
    const BlockBandSet bands = correlation_bands(b.tb, b.rx.sigma2);
    const CVector v = matched_filter_direct(b.tb, b.window.r, 61);
    const CVector ref = dense_mmse_oracle(b.tb, b.window.r, 61, b.rx.sigma2);
    const int l = bands.l();
    double prev = INFINITY;
    for (const int depth : {l + 1, l + 2, l + 4, l + 8}) {
        const CVector d = jd_chol(bands, v, 61, depth);
        const double err = (d - ref).segment(l * 8, (61 - 2 * l) * 8).cwiseAbs().maxCoeff() /
                           ref.segment(l * 8, (61 - 2 * l) * 8).cwiseAbs().maxCoeff();
        MESSAGE("jd_chol depth " << depth << " max interior deviation " << err);
        CHECK(err <= prev);
        prev = err;
    }
    const CVector d = jd_chol(bands, v, 61);
    CHECK(oracle::rel(CVector(d.segment(l * 8, (61 - 2 * l) * 8)), CVector(ref.segment(l * 8, (61 - 2 * l) * 8))) <= 1e-3);
}

TEST_CASE("block Cholesky breakdown reports the block row") {
    BlockBandSet b;
    b.bands = {CMatrix::Identity(2, 2), 2.0 * CMatrix::Identity(2, 2)};
    try {
        approx_block_cholesky(b, 5, 5);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(e.index() == 1);
    }
}

TEST_CASE("chip model bands are the Toeplitz Gram bands") {
    std::mt19937_64 rng(5);
    const std::vector<CVector> h{oracle::random_vector(6, rng), oracle::random_vector(6, rng)};
    const ChipEqualizerModel m = make_chip_model(h, generate_codes(4, 2, 1), 0.3);
    CMatrix g = 0.3 * CMatrix::Identity(20, 20);
    for (const auto& hn : h) {
        const CMatrix hm = oracle::convolution_matrix(hn, 20);
        g += hm.adjoint() * hm;
    }
    for (int mm = 0; mm < 6; ++mm) CHECK(std::abs(m.bands[mm] - g(10 + mm, 10)) < 1e-12);
}

TEST_CASE("sd_chol: impulse channel and exact-depth dense oracle") {
    std::mt19937_64 rng(6);
    const CodeSet codes = generate_codes(8, 4, 2);
    const CVector d = oracle::random_vector(4 * 5, rng);
    const CVector r = spread_field(d, codes, 5);
    const ChipEqualizerModel flat = make_chip_model({CVector::Ones(1)}, codes, 0.25);
    CHECK(oracle::rel(sd_chol(flat, {r}, 5), CVector(8.0 * d / 1.25)) < 1e-12);
    CHECK(oracle::rel(sd_fft(flat, {r}, 5), sd_chol(flat, {r}, 5)) < 1e-12);

    const std::vector<CVector> h{oracle::random_vector(9, rng)};
    const ChipEqualizerModel m = make_chip_model(h, codes, 0.4);
    const CVector rx = oracle::random_vector(40 + 8, rng);
    CHECK(oracle::rel(sd_chol(m, {rx}, 5, 40), dense_chip_mmse(h, {rx}, codes.codes, 5, 0.4)) <= 1e-10);
}

TEST_CASE("sd_fft equals the dense circulant chip MMSE on a wrapped model") {
    std::mt19937_64 rng(7);
    const CodeSet codes = generate_codes(8, 5, 3);
    const int n = 8 * 8;
    const std::vector<CVector> h{oracle::random_vector(11, rng), oracle::random_vector(11, rng)};
    const ChipEqualizerModel m = make_chip_model(h, codes, 0.3);
    const CVector s = oracle::random_vector(n, rng);
    CMatrix g = 0.3 * CMatrix::Identity(n, n);
    CVector x = CVector::Zero(n);
    std::vector<CVector> r;
    for (const auto& hn : h) {
        const CMatrix c = oracle::circular_matrix(hn, n);
        r.push_back(c * s);
        g += c.adjoint() * c;
        x += c.adjoint() * r.back();
    }
    const CVector ref = oracle::despreader(codes.codes, 8) * CVector(g.llt().solve(x));
    CHECK(oracle::rel(sd_fft(m, r, 8, n), ref) < 1e-9);
    CHECK(sd_fft_length(16, 61, 57) == 2048);
}

TEST_CASE("approximate sd_chol stays close to the exact chip MMSE") {
    const Burst b = make_burst("case2", 10.0, 8);
    const ChipEqualizerModel m = make_chip_model(b.real.h, b.codes, b.rx.sigma2);
    const CVector exact = sd_chol(m, b.window.r, 61, 976);
    const CVector approx = sd_chol(m, b.window.r, 61);
    MESSAGE("sd_chol approximate vs exact rel diff " << oracle::rel(approx, exact));
    CHECK(oracle::rel(approx, exact) < 1e-2);
}

TEST_CASE("matched-filter detector: exact recovery and two-user MAI") {
    std::mt19937_64 rng(9);
    SlotConfig c = small(8, 4, 6, 1);
    const CodeSet codes = generate_codes(8, 4, 4);
    const TransferBlocks tb = build_transfer_blocks({CVector::Ones(1)}, codes, c);
    const CVector d = oracle::random_vector(24, rng);
    CHECK(oracle::rel(matched_filter_detector(tb, {spread_field(d, codes, 6)}, 6), d) < 1e-13);

    // Two users, one symbol: estimate = d_k + R0(k, j) d_j / R0(k, k).
    SlotConfig c2 = small(4, 2, 2, 3);
    const CVector h = oracle::random_vector(3, rng);
    const TransferBlocks tb2 = build_transfer_blocks({h}, generate_codes(4, 2, 6), c2);
    const CMatrix a = build_system_matrix(tb2, 0, 1);
    const CMatrix r0 = a.adjoint() * a;
    const CVector d2 = oracle::random_vector(2, rng);
    const CVector est = matched_filter_detector(tb2, {a * d2}, 1);
    CHECK(std::abs(est[0] - (d2[0] + r0(0, 1) * d2[1] / r0(0, 0).real())) < 1e-12);
    CHECK(std::abs(est[1] - (d2[1] + r0(1, 0) * d2[0] / r0(1, 1).real())) < 1e-12);
}

TEST_CASE("all detectors are linear in r at fixed model") {
    const Burst b = make_burst("case3", 8.0, 10);
    const cplx alpha(0.6, -0.8);
    std::vector<CVector> rs = b.window.r;
    for (auto& r : rs) r *= alpha;
    const BlockBandSet bands = correlation_bands(b.tb, b.rx.sigma2);
    const ChipEqualizerModel m = make_chip_model(b.real.h, b.codes, b.rx.sigma2);
    auto check = [&](const std::function<CVector(const std::vector<CVector>&)>& f) {
        CHECK(oracle::rel(f(rs), CVector(alpha * f(b.window.r))) < 1e-10);
    };
    check([&](const auto& r) { return jd_chol(bands, matched_filter_direct(b.tb, r, 61), 61); });
    check([&](const auto& r) { return sd_chol(m, r, 61); });
    check([&](const auto& r) { return sd_fft(m, r, 61); });
    check([&](const auto& r) { return matched_filter_detector(b.tb, r, 61); });
    const JdfftDetector det(b.tb, b.rx.sigma2, b.config, JdfftOptions{});
    check([&](const auto& r) {
        FieldWindow w = b.window;
        w.r = r;
        return det.solve(w);
    });
}
