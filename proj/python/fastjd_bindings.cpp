#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fastjd/baselines.hpp"
#include "fastjd/channel.hpp"
#include "fastjd/complexity.hpp"
#include "fastjd/harness.hpp"
#include "fastjd/jdfft.hpp"
#include "fastjd/selftest.hpp"
#include "fastjd/signal_model.hpp"
#include "fastjd/structured.hpp"

namespace py = pybind11;
using namespace fastjd;

namespace {

// Rx vectors arrive from numpy as a list of 1-D complex arrays (one per phase).
using Phases = std::vector<CVector>;

MatchedFilterMode parse_mf(const std::string& s) {
    if (s == "direct") return MatchedFilterMode::direct;
    if (s == "fft") return MatchedFilterMode::fft;
    throw ConfigError("matched_filter must be direct or fft");
}

BinSolveMode parse_bin(const std::string& s) {
    if (s == "lu") return BinSolveMode::lu;
    if (s == "inverse") return BinSolveMode::explicit_inverse;
    throw ConfigError("bin_solve must be lu or inverse");
}

py::dict counter_dict(const OpCounter& c) {
    py::dict d;
    d["matched_filter"] = c.matched_filter;
    d["fft"] = c.fft;
    d["bin_factor"] = c.bin_factor;
    d["bin_solve"] = c.bin_solve;
    d["cholesky"] = c.cholesky;
    d["substitution"] = c.substitution;
    return d;
}

}  // namespace

PYBIND11_MODULE(_fastjd, m) {
    m.attr("__version__") = "0.1.0";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    py::class_<SlotConfig>(m, "SlotConfig")
        .def(py::init<>())
        .def_readwrite("sf", &SlotConfig::sf)
        .def_readwrite("k", &SlotConfig::k)
        .def_readwrite("n_s", &SlotConfig::n_s)
        .def_readwrite("w", &SlotConfig::w)
        .def_readwrite("n_over", &SlotConfig::n_over)
        .def_readwrite("p", &SlotConfig::p)
        .def_readwrite("code_allocation", &SlotConfig::code_allocation)
        .def_property_readonly("l", &SlotConfig::l)
        .def_property_readonly("n_c", &SlotConfig::n_c)
        .def_property_readonly("burst_chips", &SlotConfig::burst_chips)
        .def("num_users", &SlotConfig::num_users)
        .def("codes_of", &SlotConfig::codes_of)
        .def("validate", &SlotConfig::validate);

    py::class_<CodeSet>(m, "CodeSet")
        .def_readonly("codes", &CodeSet::codes)
        .def_property_readonly("sf", &CodeSet::sf)
        .def_property_readonly("k", &CodeSet::k);
    m.def("generate_codes", &generate_codes, py::arg("sf"), py::arg("k"), py::arg("scramble_seed") = 0);
    m.def("make_midamble", &make_midamble, py::arg("seed"), py::arg("length") = kMidambleChips);
    m.def("qpsk_modulate", [](const std::vector<std::uint8_t>& bits) { return qpsk_modulate(bits); });
    m.def("qpsk_demap", &qpsk_demap);
    m.def("spread_and_assemble", &spread_and_assemble, py::arg("frame"), py::arg("codes"), py::arg("midamble"),
          py::arg("config"));

    py::class_<TransferBlocks>(m, "TransferBlocks")
        .def_readonly("sf", &TransferBlocks::sf)
        .def_readonly("k", &TransferBlocks::k)
        .def_readonly("l", &TransferBlocks::l)
        .def_readonly("stacked", &TransferBlocks::stacked);
    m.def("build_transfer_blocks", &build_transfer_blocks, py::arg("h"), py::arg("codes"), py::arg("config"));
    m.def("build_system_matrix", &build_system_matrix, py::arg("tb"), py::arg("phase"), py::arg("n_symbols"),
          py::arg("n_rows") = -1);

    py::class_<ChannelProfile>(m, "ChannelProfile")
        .def_readonly("name", &ChannelProfile::name)
        .def_readonly("speed_kmh", &ChannelProfile::speed_kmh)
        .def_readonly("stand_in", &ChannelProfile::stand_in)
        .def_property_readonly("delays",
                               [](const ChannelProfile& p) {
                                   std::vector<int> d;
                                   for (const auto& t : p.taps) d.push_back(t.delay);
                                   return d;
                               })
        .def_property_readonly("powers", [](const ChannelProfile& p) {
            std::vector<double> w;
            for (const auto& t : p.taps) w.push_back(t.power);
            return w;
        });
    m.def("make_profile", &make_profile, py::arg("name"));
    m.def("make_custom_profile", &make_custom_profile, py::arg("delays"), py::arg("powers"), py::arg("speed_kmh"),
          py::arg("name") = "custom");

    py::class_<ChannelRealization>(m, "ChannelRealization")
        .def_readonly("h", &ChannelRealization::h)
        .def_readonly("tap_gains", &ChannelRealization::tap_gains);
    m.def("realize", &realize, py::arg("profile"), py::arg("config"), py::arg("carrier_hz") = kDefaultCarrierHz,
          py::arg("burst_index") = 0, py::arg("seed") = 1);
    m.def("realization_from_taps", &realization_from_taps, py::arg("taps"), py::arg("config"));
    m.def("noise_variance", &noise_variance, py::arg("ebn0_db"), py::arg("sf"));

    py::class_<Received>(m, "Received").def_readonly("r", &Received::r).def_readonly("sigma2", &Received::sigma2);
    m.def("propagate", &propagate, py::arg("chips"), py::arg("realization"), py::arg("config"), py::arg("snr_db"),
          py::arg("noise_seed"));

    py::class_<JdfftOptions>(m, "JdfftOptions")
        .def(py::init([](int p, const std::string& mf, const std::string& bin, bool ext) {
                 return JdfftOptions{p, parse_mf(mf), parse_bin(bin), ext};
             }),
             py::arg("p") = 0, py::arg("matched_filter") = "direct", py::arg("bin_solve") = "lu",
             py::arg("window_extension") = true)
        .def_readwrite("p", &JdfftOptions::p)
        .def_readwrite("window_extension", &JdfftOptions::window_extension);

    py::class_<FieldWindow>(m, "FieldWindow")
        .def_readonly("r", &FieldWindow::r)
        .def_readonly("n_symbols", &FieldWindow::n_symbols);
    m.def("extend_window", &extend_window, py::arg("rx"), py::arg("field"), py::arg("midamble"),
          py::arg("realization"), py::arg("config"), py::arg("options") = JdfftOptions{});

    py::class_<BlockBandSet>(m, "BlockBandSet").def_readonly("bands", &BlockBandSet::bands);
    m.def("correlation_bands", &correlation_bands, py::arg("tb"), py::arg("sigma2"));
    m.def("dense_band_matrix", &dense_band_matrix, py::arg("bands"), py::arg("n_blocks"));
    m.def("correlation_spectrum",
          [](const BlockBandSet& b, int p) { return correlation_spectrum(b, p).lambda; }, py::arg("bands"),
          py::arg("p"));

    py::class_<DetectionResult>(m, "DetectionResult")
        .def_readonly("soft", &DetectionResult::soft)
        .def_readonly("user_symbols", &DetectionResult::user_symbols)
        .def_readonly("user_bits", &DetectionResult::user_bits)
        .def_readonly("bin_rcond", &DetectionResult::bin_rcond);
    m.def(
        "detect",
        [](const Phases& rx, int field, const CVector& midamble, const ChannelRealization& real,
           const CodeSet& codes, double sigma2, const SlotConfig& config, const JdfftOptions& options) {
            OpCounter ops;
            DetectionResult res = detect(rx, field, midamble, real, codes, sigma2, config, options, &ops);
            return py::make_tuple(res, counter_dict(ops));
        },
        py::arg("rx"), py::arg("field"), py::arg("midamble"), py::arg("realization"), py::arg("codes"),
        py::arg("sigma2"), py::arg("config"), py::arg("options") = JdfftOptions{},
        "Runs the block-FFT detector on one field; returns (result, op counts).");

    m.def(
        "matched_filter",
        [](const TransferBlocks& tb, const Phases& r, int n) { return matched_filter_direct(tb, r, n); },
        py::arg("tb"), py::arg("r"), py::arg("n_symbols"));
    m.def("dense_mmse_oracle", &dense_mmse_oracle, py::arg("tb"), py::arg("r"), py::arg("n_symbols"),
          py::arg("sigma2"));
    m.def(
        "jd_chol",
        [](const BlockBandSet& bands, const CVector& v, int n_blocks, int depth) {
            return jd_chol(bands, v, n_blocks, depth);
        },
        py::arg("bands"), py::arg("v"), py::arg("n_blocks"), py::arg("depth") = 0);
    py::class_<ChipEqualizerModel>(m, "ChipEqualizerModel").def_readonly("bands", &ChipEqualizerModel::bands);
    m.def("make_chip_model", &make_chip_model, py::arg("h"), py::arg("codes"), py::arg("sigma2"));
    m.def(
        "sd_chol",
        [](const ChipEqualizerModel& mdl, const Phases& r, int n, int depth) { return sd_chol(mdl, r, n, depth); },
        py::arg("model"), py::arg("r"), py::arg("n_symbols"), py::arg("depth") = 0);
    m.def(
        "sd_fft", [](const ChipEqualizerModel& mdl, const Phases& r, int n, int nfft) { return sd_fft(mdl, r, n, nfft); },
        py::arg("model"), py::arg("r"), py::arg("n_symbols"), py::arg("nfft") = 0);
    m.def(
        "matched_filter_detector",
        [](const TransferBlocks& tb, const Phases& r, int n) { return matched_filter_detector(tb, r, n); },
        py::arg("tb"), py::arg("r"), py::arg("n_symbols"));

    py::class_<MropsEntry>(m, "MropsEntry")
        .def_readonly("label", &MropsEntry::label)
        .def_readonly("count", &MropsEntry::count)
        .def_readonly("rate", &MropsEntry::rate)
        .def("mrops", &MropsEntry::mrops);
    py::class_<MropsReport>(m, "MropsReport")
        .def_readonly("entries", &MropsReport::entries)
        .def_readonly("notes", &MropsReport::notes)
        .def("total", &MropsReport::total)
        .def("entry", &MropsReport::entry)
        .def("csv", &MropsReport::csv)
        .def("table", &MropsReport::table);
    m.def(
        "mrops",
        [](const SlotConfig& c, const std::string& detector, const JdfftOptions& options) {
            return mrops(c, parse_detector(detector), options);
        },
        py::arg("config"), py::arg("detector"), py::arg("options") = JdfftOptions{});

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("slot", &ScenarioConfig::slot)
        .def_readwrite("channel", &ScenarioConfig::channel)
        .def_readwrite("correlated", &ScenarioConfig::correlated)
        .def_readwrite("snr_grid", &ScenarioConfig::snr_grid)
        .def_readwrite("n_slots", &ScenarioConfig::n_slots)
        .def_readwrite("detectors", &ScenarioConfig::detectors)
        .def_readwrite("jdfft", &ScenarioConfig::jdfft)
        .def_readwrite("master_seed", &ScenarioConfig::master_seed)
        .def("canonical", &ScenarioConfig::canonical)
        .def("validate", &ScenarioConfig::validate);
    m.def("parse_scenario", &parse_scenario, py::arg("text"));
    m.def("load_scenario", &load_scenario, py::arg("path"));

    py::class_<BerPoint>(m, "BerPoint")
        .def_readonly("detector", &BerPoint::detector)
        .def_readonly("snr_db", &BerPoint::snr_db)
        .def_readonly("bits", &BerPoint::bits)
        .def_readonly("errors", &BerPoint::errors)
        .def("ber", &BerPoint::ber)
        .def("ci95", &BerPoint::ci95);
    py::class_<BerCurve>(m, "BerCurve")
        .def_readonly("points", &BerCurve::points)
        .def_readonly("slot_errors", &BerCurve::slot_errors)
        .def_readonly("bits_per_slot", &BerCurve::bits_per_slot)
        .def("point", &BerCurve::point, py::return_value_policy::reference_internal)
        .def("csv", &BerCurve::csv);
    m.def("run_scenario", [](const ScenarioConfig& c) {
        py::gil_scoped_release release;
        return run_scenario(c);
    });
    m.def("known_detectors", &known_detectors);

    py::class_<PairedDifference>(m, "PairedDifference")
        .def_readonly("mean", &PairedDifference::mean)
        .def_readonly("ci95", &PairedDifference::ci95)
        .def_readonly("n", &PairedDifference::n)
        .def("significantly_greater", &PairedDifference::significantly_greater)
        .def("within_ci", &PairedDifference::within_ci);
    m.def("paired_difference", &paired_difference, py::arg("curve"), py::arg("a"), py::arg("b"), py::arg("snr_lo"),
          py::arg("snr_hi"));
    m.def("clopper_pearson", &clopper_pearson, py::arg("errors"), py::arg("bits"));

    py::class_<CheckResult>(m, "CheckResult")
        .def_readonly("name", &CheckResult::name)
        .def_readonly("passed", &CheckResult::passed)
        .def_readonly("detail", &CheckResult::detail);
    m.def("run_selftest", &run_selftest, py::arg("seed") = 7);
}
