#include "fastjd/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "fastjd/channel.hpp"
#include "fastjd/fft.hpp"
#include "fastjd/harness.hpp"
#include "fastjd/jdfft.hpp"
#include "fastjd/structured.hpp"

namespace fastjd {

namespace {

CVector random_vector(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = cplx(g(rng), g(rng));
    }
    return v;
}

std::string fmt(const char* label, double value) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s=%.3e", label, value);
    return buf;
}

struct Burst {
    SlotConfig config;
    CodeSet codes;
    CVector midamble;
    ChannelRealization real;
    Received rx;
};

Burst case1_burst(std::uint64_t seed, double snr_db) {
    Burst b;
    b.codes = generate_codes(b.config.sf, b.config.k, 0x5eed);
    b.midamble = make_midamble(0xa11d);
    b.real = realize(make_profile("case1"), b.config, kDefaultCarrierHz, 0, seed);
    std::mt19937_64 rng(seed);
    const Frame f = random_frame(2 * b.config.k * b.config.n_s, rng);
    b.rx = propagate(spread_and_assemble(f.symbols, b.codes, b.midamble, b.config), b.real, b.config, snr_db,
                     seed + 1);
    return b;
}

CheckResult parseval(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (const int p : {61, 64}) {
        const CVector x = random_vector(static_cast<Eigen::Index>(p) * 8, rng);
        const CVector fx = block_dft(x, 8, Direction::forward);
        worst = std::max(worst, std::abs(fx.squaredNorm() - p * x.squaredNorm()) / (p * x.squaredNorm()));
        worst = std::max(worst, (block_dft(fx, 8, Direction::inverse) - x).norm() / x.norm());
    }
    return {"parseval", worst <= 1e-10, fmt("rel_err", worst)};
}

CheckResult hermitian_bins(std::uint64_t seed) {
    const Burst b = case1_burst(seed, 10.0);
    const TransferBlocks tb = build_transfer_blocks(b.real.h, b.codes, b.config);
    const BlockSpectrum s = correlation_spectrum(correlation_bands(tb, b.rx.sigma2), b.config.p);
    double worst = 0.0;
    double min_eig = INFINITY;
    for (const auto& lam : s.lambda) {
        worst = std::max(worst, (lam - lam.adjoint()).norm() / lam.norm());
        Eigen::SelfAdjointEigenSolver<CMatrix> es(lam);
        min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
    return {"hermitian_bins", worst <= 1e-12 && min_eig >= b.rx.sigma2 * (1 - 1e-9),
            fmt("asym", worst) + " " + fmt("min_eig", min_eig)};
}

CheckResult lu_vs_inverse(std::uint64_t seed) {
    const Burst b = case1_burst(seed, 8.0);
    double worst = 0.0;
    for (const auto mf : {MatchedFilterMode::direct, MatchedFilterMode::fft}) {
        for (const int p : {61, 64}) {
            JdfftOptions lu{p, mf, BinSolveMode::lu, true};
            JdfftOptions inv{p, mf, BinSolveMode::explicit_inverse, true};
            for (int field = 0; field < 2; ++field) {
                const auto a = detect(b.rx.r, field, b.midamble, b.real, b.codes, b.rx.sigma2, b.config, lu);
                const auto c = detect(b.rx.r, field, b.midamble, b.real, b.codes, b.rx.sigma2, b.config, inv);
                worst = std::max(worst, (a.soft - c.soft).norm() / a.soft.norm());
            }
        }
    }
    return {"lu_equals_inverse", worst <= 1e-10, fmt("rel_diff", worst)};
}

CheckResult scaling(std::uint64_t seed) {
    const Burst b = case1_burst(seed, 10.0);
    const JdfftOptions opt;
    const TransferBlocks tb = build_transfer_blocks(b.real.h, b.codes, b.config);
    const JdfftDetector det(tb, b.rx.sigma2, b.config, opt);
    const FieldWindow w = extend_window(b.rx.r, 0, b.midamble, b.real, b.config, opt);
    const CVector d = det.solve(w);
    const cplx alpha(0.7, -1.9);

    // Linear in r at fixed channel and noise variance.
    FieldWindow ws = w;
    for (auto& r : ws.r) r *= alpha;
    const double lin = (det.solve(ws) - alpha * d).norm() / d.norm();

    // Invariant when channel and r scale by alpha and sigma2 by |alpha|^2.
    std::vector<CVector> h = b.real.h;
    for (auto& hn : h) hn *= alpha;
    const TransferBlocks tbs = build_transfer_blocks(h, b.codes, b.config);
    const JdfftDetector dets(tbs, std::norm(alpha) * b.rx.sigma2, b.config, opt);
    const double inv = (dets.solve(ws) - d).norm() / d.norm();
    return {"scaling", lin <= 1e-10 && inv <= 1e-10, fmt("linearity", lin) + " " + fmt("homogeneity", inv)};
}

CheckResult last_symbol_energy(std::uint64_t seed) {
    SlotConfig c;
    const CodeSet codes = generate_codes(c.sf, c.k, 0x5eed);
    const ChannelRealization real = realize(make_profile("case2"), c, kDefaultCarrierHz, 0, seed);
    const TransferBlocks tb = build_transfer_blocks(real.h, codes, c);
    auto mf_energy = [&](int symbol, bool extended) {
        CVector frame = CVector::Zero(2 * c.k * c.n_s);
        frame[symbol * c.k] = 1.0;
        const CVector burst = spread_and_assemble(frame, codes, CVector::Zero(kMidambleChips), c);
        const Received rx = propagate(burst, real, c, INFINITY, 0);
        JdfftOptions opt;
        opt.window_extension = extended;
        const FieldWindow w = extend_window(rx.r, 0, CVector::Zero(kMidambleChips), real, c, opt);
        return std::abs(matched_filter_direct(tb, w.r, c.n_s)[symbol * c.k]);
    };
    const double interior = mf_energy(c.n_s / 2, true);
    const double last = mf_energy(c.n_s - 1, true);
    const double truncated = mf_energy(c.n_s - 1, false);
    const double rel = std::abs(last - interior) / interior;
    return {"window_extension_last_symbol", rel <= 1e-10 && truncated < interior,
            fmt("rel_diff", rel) + " " + fmt("unextended_ratio", truncated / interior)};
}

CheckResult exact_circulance(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    SlotConfig c;
    c.sf = 4;
    c.k = 3;
    c.n_s = 8;
    c.p = 8;
    c.w = 7;
    const CodeSet codes = generate_codes(c.sf, c.k, 3);
    const TransferBlocks tb = build_transfer_blocks({random_vector(c.w, rng)}, codes, c);
    const CMatrix ac = circulant_system(tb, 0, c.p);
    const CVector d = random_vector(c.k * c.p, rng);
    FieldWindow w;
    w.r = {ac * d};
    w.n_symbols = c.p;
    const double sigma2 = 0.3;
    const CMatrix rc = ac.adjoint() * ac + sigma2 * CMatrix::Identity(c.k * c.p, c.k * c.p);
    const CVector ref = rc.llt().solve(ac.adjoint() * w.r[0]);
    JdfftOptions opt{c.p, MatchedFilterMode::fft, BinSolveMode::lu, false};
    const JdfftDetector det(tb, sigma2, c, opt);
    const double rel = (det.solve_all(w) - ref).norm() / ref.norm();
    return {"exact_circulance", rel <= 1e-9, fmt("rel_err", rel)};
}

CheckResult determinism(std::uint64_t seed) {
    ScenarioConfig sc;
    sc.n_slots = 3;
    sc.snr_grid = {4.0, 8.0};
    sc.channel = "case2";
    sc.detectors = {"jdfft", "jdchol", "sdfft"};
    sc.master_seed = seed;
    const std::string a = run_scenario(sc).csv();
    const std::string b = run_scenario(sc).csv();
    return {"determinism", a == b, a == b ? "csv identical" : "csv differs"};
}

}  // namespace

std::vector<CheckResult> run_selftest(std::uint64_t seed) {
    const std::vector<std::function<CheckResult(std::uint64_t)>> checks{
        parseval, hermitian_bins, lu_vs_inverse, scaling, last_symbol_energy, exact_circulance, determinism};
    std::vector<CheckResult> out;
    for (const auto& check : checks) {
        try {
            out.push_back(check(seed));
        } catch (const std::exception& e) {
            out.push_back({"exception", false, e.what()});
        }
    }
    return out;
}

}  // namespace fastjd
