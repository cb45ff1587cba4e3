// jdsim: BER simulation, complexity tables and the invariant self-test.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fastjd/complexity.hpp"
#include "fastjd/harness.hpp"
#include "fastjd/selftest.hpp"

namespace {

using namespace fastjd;

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw ConfigError("cannot write " + path.string());
    }
    os << text;
}

struct ComplexityRow {
    std::string name;
    SlotConfig config;
    Detector detector;
    JdfftOptions options;
};

std::string complexity_output(const std::vector<ComplexityRow>& rows, std::string& table) {
    std::ostringstream csv;
    csv << "variant,detector,label,count,rate,mrops\n";
    std::ostringstream tab;
    std::ostringstream summary;
    summary << "Technique                                   MROPS\n";
    char buf[256];
    for (const auto& row : rows) {
        const MropsReport rep = mrops(row.config, row.detector, row.options);
        for (const auto& e : rep.entries) {
            std::snprintf(buf, sizeof buf, "%s,%s,\"%s\",%.4f,%.0f,%.6f\n", row.name.c_str(),
                          detector_name(row.detector).c_str(), e.label.c_str(), e.count, e.rate, e.mrops());
            csv << buf;
        }
        std::snprintf(buf, sizeof buf, "%s,%s,\"total\",,,%.6f\n", row.name.c_str(), detector_name(row.detector).c_str(),
                      rep.total());
        csv << buf;
        tab << "[" << row.name << "] " << rep.table() << "\n";
        std::snprintf(buf, sizeof buf, "%-40s %8.2f\n", row.name.c_str(), rep.total());
        summary << buf;
    }
    table = tab.str() + summary.str();
    return csv.str();
}

std::vector<ComplexityRow> complexity_rows(const SlotConfig& base) {
    JdfftOptions inverse_direct{0, MatchedFilterMode::direct, BinSolveMode::explicit_inverse, true};
    JdfftOptions inverse_fft{0, MatchedFilterMode::fft, BinSolveMode::explicit_inverse, true};
    JdfftOptions lu_direct{0, MatchedFilterMode::direct, BinSolveMode::lu, true};
    SlotConfig twelve = base;
    twelve.k = 12;
    twelve.code_allocation.clear();
    return {
        {"jdfft inverse, direct A^H r", base, Detector::jdfft, inverse_direct},
        {"jdfft inverse, FFT A^H r", base, Detector::jdfft, inverse_fft},
        {"jdfft LU, direct A^H r", base, Detector::jdfft, lu_direct},
        {"jdchol", base, Detector::jdchol, {}},
        {"sdchol", base, Detector::sdchol, {}},
        {"sdfft", base, Detector::sdfft, {}},
        {"mf", base, Detector::mf, {}},
        {"jdchol, 12 codes", twelve, Detector::jdchol, {}},
        {"jdfft LU, 12 codes", twelve, Detector::jdfft, lu_direct},
    };
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint-detection link simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int slots = 0;
    std::string snr;
    std::string detectors;
    std::string channel;
    int p = 0;
    int oversample = 0;
    bool correlated = false;
    bool full = false;
    std::string mf_mode;
    std::string bin_solve;

    auto* ber = app.add_subcommand("ber", "Monte-Carlo BER curves");
    ber->add_option("--config", config_path, "INI scenario file")->check(CLI::ExistingFile);
    ber->add_option("--out", out_dir, "Output directory (CSV to stdout when omitted)");
    ber->add_option("--seed", seed, "Master seed");
    ber->add_option("--slots", slots, "Timeslots per SNR point")->check(CLI::PositiveNumber);
    ber->add_option("--snr", snr, "SNR grid a:b:step or list (dB)");
    ber->add_option("--detectors", detectors, "Comma list of detectors");
    ber->add_option("--channel", channel, "case1, case2, case2mod, case3 or custom");
    ber->add_option("--p", p, "JDFFT processing length")->check(CLI::IsMember({61, 64}));
    ber->add_option("--oversample", oversample, "Oversampling factor")->check(CLI::PositiveNumber);
    ber->add_option("--mf", mf_mode, "JDFFT matched filter")->check(CLI::IsMember({"direct", "fft"}));
    ber->add_option("--bin-solve", bin_solve, "JDFFT bin solve")->check(CLI::IsMember({"lu", "inverse"}));
    ber->add_flag("--correlated", correlated, "Burst-to-burst correlated fading");
    ber->add_flag("--full", full, "800 timeslots per point");

    auto* cx = app.add_subcommand("complexity", "Operation-count tables");
    cx->add_option("--config", config_path, "INI scenario file (slot section used)")->check(CLI::ExistingFile);
    cx->add_option("--out", out_dir, "Output directory (table to stdout when omitted)");

    auto* st = app.add_subcommand("selftest", "Invariant suite");
    st->add_option("--seed", seed, "Seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (ber->parsed()) {
            ScenarioConfig sc = config_path.empty() ? ScenarioConfig{} : load_scenario(config_path);
            if (ber->count("--seed")) sc.master_seed = seed;
            if (slots > 0) sc.n_slots = slots;
            if (full) sc.n_slots = 800;
            if (!snr.empty()) sc.snr_grid = parse_snr_grid(snr);
            if (!detectors.empty()) sc.detectors = split_list(detectors);
            if (!channel.empty()) sc.channel = channel;
            if (p > 0) sc.jdfft.p = p;
            if (oversample > 0) sc.slot.n_over = oversample;
            if (correlated) sc.correlated = true;
            if (!mf_mode.empty()) sc.jdfft.matched_filter = mf_mode == "fft" ? MatchedFilterMode::fft : MatchedFilterMode::direct;
            if (!bin_solve.empty()) sc.jdfft.bin_solve = bin_solve == "lu" ? BinSolveMode::lu : BinSolveMode::explicit_inverse;
            sc.validate();
            const BerCurve curve = run_scenario(sc);
            if (out_dir.empty()) {
                std::cout << curve.csv();
            } else {
                std::filesystem::create_directories(out_dir);
                write_file(std::filesystem::path(out_dir) / ("ber_" + sc.channel + ".csv"), curve.csv());
                write_file(std::filesystem::path(out_dir) / ("ber_" + sc.channel + ".manifest"), run_manifest(sc));
            }
        } else if (cx->parsed()) {
            const SlotConfig base = config_path.empty() ? SlotConfig{} : load_scenario(config_path).slot;
            std::string table;
            const std::string csv = complexity_output(complexity_rows(base), table);
            if (out_dir.empty()) {
                std::cout << table;
            } else {
                std::filesystem::create_directories(out_dir);
                write_file(std::filesystem::path(out_dir) / "complexity.csv", csv);
                write_file(std::filesystem::path(out_dir) / "complexity.txt", table);
            }
        } else if (st->parsed()) {
            const auto results = run_selftest(st->count("--seed") ? seed : 7);
            bool ok = true;
            for (const auto& r : results) {
                std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << "  " << r.detail << "\n";
                ok = ok && r.passed;
            }
            return ok ? 0 : 2;
        }
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
