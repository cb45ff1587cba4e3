#include <doctest.h>

#include <cmath>

#include "fastjd/complexity.hpp"

using namespace fastjd;
namespace lb = mrops_label;

namespace {

double round_to(double v, int digits) {
    const double s = std::pow(10.0, digits);
    return std::round(v * s) / s;
}

const JdfftOptions kInverseDirect{0, MatchedFilterMode::direct, BinSolveMode::explicit_inverse, true};

}  // namespace

TEST_CASE("report totals and rates") {
    for (const auto det : {Detector::jdfft, Detector::jdchol, Detector::sdchol, Detector::sdfft, Detector::mf}) {
        const MropsReport r = mrops(SlotConfig{}, det);
        double sum = 0.0;
        for (const auto& e : r.entries) {
            sum += e.count * 4.0 * e.rate / 1e6;
            CHECK((e.rate == 100.0 || e.rate == 200.0));
        }
        CHECK(std::abs(r.total() - sum) < 1e-9);
    }
}

TEST_CASE("joint FFT detector entries from the closed-form counts") {
    const MropsReport r = mrops(SlotConfig{}, Detector::jdfft, kInverseDirect);
    CHECK(round_to(r.entry(lb::band_fft), 2) == doctest::Approx(9.26));
    CHECK(round_to(r.entry(lb::bin_inverse), 3) == doctest::Approx(12.493));
    CHECK(round_to(r.entry(lb::matched_filter), 2) == doctest::Approx(28.11));
    CHECK(round_to(r.entry(lb::mf_fft), 4) == doctest::Approx(2.3154));
    CHECK(round_to(r.entry(lb::bin_solve), 4) == doctest::Approx(3.1232));
    CHECK(round_to(r.entry(lb::inverse_fft), 4) == doctest::Approx(2.3154));
    // K SF W = 7296 complex operations.
    CHECK(r.entry(lb::system_matrix) == doctest::Approx(2.9184));
    CHECK(std::abs(r.entry(lb::gram) - 4.4) / 4.4 <= 0.15);
}

TEST_CASE("gram count conventions") {
    const SlotConfig c;
    CHECK(gram_count_as_printed(c) == doctest::Approx(25605.0));
    CHECK(gram_count(c) == doctest::Approx(11794.5));
}

TEST_CASE("FFT matched filter lowers the total by about one MROPS") {
    const double direct = mrops(SlotConfig{}, Detector::jdfft, kInverseDirect).total();
    JdfftOptions fft = kInverseDirect;
    fft.matched_filter = MatchedFilterMode::fft;
    const double via_fft = mrops(SlotConfig{}, Detector::jdfft, fft).total();
    CHECK(std::abs((direct - via_fft) - 1.03) < 0.01);
}

TEST_CASE("LU lowers the total and counts (K^3 - K)/3 per bin") {
    JdfftOptions lu = kInverseDirect;
    lu.bin_solve = BinSolveMode::lu;
    const MropsReport r = mrops(SlotConfig{}, Detector::jdfft, lu);
    CHECK(r.entry(lb::bin_lu) == doctest::Approx(61.0 * 168.0 * 400.0 / 1e6));
    CHECK(r.total() < mrops(SlotConfig{}, Detector::jdfft, kInverseDirect).total());
}

TEST_CASE("fewer codes cost less") {
    SlotConfig one;
    one.k = 1;
    for (const auto det : {Detector::jdfft, Detector::jdchol, Detector::mf}) {
        CHECK(mrops(one, det).total() < mrops(SlotConfig{}, det).total());
    }
}

TEST_CASE("output formats") {
    const MropsReport r = mrops(SlotConfig{}, Detector::jdfft, kInverseDirect);
    const std::string csv = r.csv();
    CHECK(csv.rfind("label,count,rate,mrops\n", 0) == 0);
    CHECK(csv.find("\"total\"") != std::string::npos);
    const std::string table = r.table();
    CHECK(table.find("Functions executed once per burst") != std::string::npos);
    CHECK(table.find("Functions executed twice per burst") != std::string::npos);
    CHECK(table.find("note:") != std::string::npos);
    CHECK(parse_detector("sdfft") == Detector::sdfft);
    CHECK_THROWS_AS(parse_detector("zf"), ConfigError);
}
