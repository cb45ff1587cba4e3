#include "fastjd/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "fastjd/baselines.hpp"

namespace fastjd {

Detector parse_detector(const std::string& name) {
    if (name == "jdfft") return Detector::jdfft;
    if (name == "jdchol") return Detector::jdchol;
    if (name == "sdchol") return Detector::sdchol;
    if (name == "sdfft") return Detector::sdfft;
    if (name == "mf") return Detector::mf;
    throw ConfigError("unknown detector '" + name + "'");
}

std::string detector_name(Detector d) {
    switch (d) {
        case Detector::jdfft: return "jdfft";
        case Detector::jdchol: return "jdchol";
        case Detector::sdchol: return "sdchol";
        case Detector::sdfft: return "sdfft";
        case Detector::mf: return "mf";
    }
    return "?";
}

double MropsReport::total() const {
    double t = 0.0;
    for (const auto& e : entries) {
        t += e.mrops();
    }
    return t;
}

double MropsReport::entry(const std::string& label) const {
    for (const auto& e : entries) {
        if (e.label == label) {
            return e.mrops();
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::string MropsReport::csv() const {
    std::ostringstream os;
    os << "label,count,rate,mrops\n";
    char buf[256];
    for (const auto& e : entries) {
        std::snprintf(buf, sizeof buf, "\"%s\",%.4f,%.0f,%.6f\n", e.label.c_str(), e.count, e.rate, e.mrops());
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "\"total\",,,%.6f\n", total());
    os << buf;
    return os.str();
}

std::string MropsReport::table() const {
    std::size_t width = 5;
    for (const auto& e : entries) {
        width = std::max(width, e.label.size());
    }
    std::ostringstream os;
    char buf[512];
    os << detector_name(detector) << "\n";
    for (const double rate : {kOncePerBurst, kTwicePerBurst}) {
        std::snprintf(buf, sizeof buf, "%-*s  %10s\n", static_cast<int>(width),
                      rate == kOncePerBurst ? "Functions executed once per burst" : "Functions executed twice per burst",
                      "MROPS");
        os << buf;
        for (const auto& e : entries) {
            if (e.rate == rate) {
                std::snprintf(buf, sizeof buf, "  %-*s  %10.4f\n", static_cast<int>(width), e.label.c_str(), e.mrops());
                os << buf;
            }
        }
    }
    std::snprintf(buf, sizeof buf, "%-*s  %10.4f\n", static_cast<int>(width) + 2, "Total", total());
    os << buf;
    for (const auto& n : notes) {
        os << "note: " << n << "\n";
    }
    return os.str();
}

namespace {

double n_max(const SlotConfig& c) {
    return std::min<double>(c.n_s, static_cast<double>(c.response_length()) / c.sf + 1.0);
}

double nlog2n(double n) { return n * std::log2(n); }

// Exact loop count of the approximate block Cholesky over `rows` block rows.
double block_cholesky_count(int k, int l, int rows) {
    const double k3 = static_cast<double>(k) * k * k;
    double count = 0.0;
    for (int i = 0; i < rows; ++i) {
        const int j0 = std::max(0, i - l);
        for (int j = j0; j <= i; ++j) {
            count += (j - j0) * k3;
            count += j < i ? k * (k * (k + 1) / 2.0) : k * (k + 1.0) * (k + 2.0) / 6.0;
        }
    }
    return count;
}

double chip_cholesky_count(int b, int rows) {
    double count = 0.0;
    for (int i = 0; i < rows; ++i) {
        const int j0 = std::max(0, i - b);
        for (int j = j0; j <= i; ++j) {
            count += j - j0 + 1;
        }
    }
    return count;
}

}  // namespace

double gram_count_as_printed(const SlotConfig& c) {
    const double k = c.k;
    const double q = c.response_length();
    const double nm = n_max(c);
    return (k * k + k) * (2.0 * q - (nm - 1.0)) * nm / 2.0 - (k * k - k) * q / 2.0;
}

double gram_count(const SlotConfig& c) {
    const double k = c.k;
    const double q = c.response_length();
    const double nm = n_max(c);
    return (k * k + k) / 2.0 * (2.0 * q - (nm - 1.0)) * nm / 2.0 - (k * k - k) * q / 2.0;
}

MropsReport mrops(const SlotConfig& config, Detector detector, const JdfftOptions& options) {
    config.validate();
    namespace lb = mrops_label;
    const double k = config.k;
    const double sf = config.sf;
    const double w = config.w;
    const double ns = config.n_s;
    const double q = config.response_length();
    const double phases = config.n_over;
    const int l = config.l();

    MropsReport rep;
    rep.detector = detector;
    auto add = [&](std::string label, double count, double rate) {
        rep.entries.push_back({std::move(label), count, rate});
    };
    auto joint_front_end = [&] {
        add(lb::system_matrix, phases * k * sf * w, kOncePerBurst);
        add(lb::gram, phases * gram_count(config), kOncePerBurst);
        rep.notes.push_back("A^H A uses n_max = min(N_s, (SF+W-1)/SF + 1) unrounded and (K^2+K)/2 Hermitian pairs");
    };

    switch (detector) {
        case Detector::jdfft: {
            const double p = options.processing_length(config);
            joint_front_end();
            add(lb::band_fft, k * k * nlog2n(p), kOncePerBurst);
            if (options.bin_solve == BinSolveMode::explicit_inverse) {
                add(lb::bin_inverse, p * k * k * k, kOncePerBurst);
            } else {
                add(lb::bin_lu, p * (k * k * k - k) / 3.0, kOncePerBurst);
                rep.notes.push_back("LU counts (K^3-K)/3 per bin; solves count K^2 per bin");
            }
            if (options.matched_filter == MatchedFilterMode::direct) {
                add(lb::matched_filter, phases * k * p * q, kTwicePerBurst);
                add(lb::mf_fft, k * nlog2n(p), kTwicePerBurst);
            } else {
                add(lb::transfer_fft, phases * sf * k * nlog2n(p), kOncePerBurst);
                add(lb::rx_fft, phases * sf * nlog2n(p), kTwicePerBurst);
                add(lb::mf_bins, phases * p * sf * k, kTwicePerBurst);
            }
            add(lb::bin_solve, p * k * k, kTwicePerBurst);
            add(lb::inverse_fft, k * nlog2n(p), kTwicePerBurst);
            break;
        }
        case Detector::jdchol: {
            joint_front_end();
            add("Approximate block Cholesky", block_cholesky_count(config.k, l, jd_chol_depth(l)), kOncePerBurst);
            add(lb::matched_filter, phases * k * ns * q, kTwicePerBurst);
            add("Banded forward/backward substitution", 2.0 * ns * (l * k * k + k * (k + 1) / 2.0), kTwicePerBurst);
            rep.notes.push_back("block Cholesky exact over L+2 block rows, last row replicated");
            break;
        }
        case Detector::sdchol: {
            const double n = sf * ns;
            const int b = config.w - 1;
            add("Chip correlation bands", phases * w * (w + 1) / 2.0, kOncePerBurst);
            add("Approximate chip Cholesky", chip_cholesky_count(b, sd_chol_depth(config.w)), kOncePerBurst);
            add("Chip matched filter H^H r", phases * n * w, kTwicePerBurst);
            add("Chip forward/backward substitution", 2.0 * n * (b + 1), kTwicePerBurst);
            add("Hadamard despreading", ns * sf * std::log2(sf), kTwicePerBurst);
            rep.notes.push_back("chip Cholesky exact over W+1 rows, last row replicated");
            break;
        }
        case Detector::sdfft: {
            const double nfft = sd_fft_length(config.sf, config.n_s, config.w);
            add("Channel FFT", phases * nlog2n(nfft), kOncePerBurst);
            add("Chip spectrum sum |H|^2 + sigma2", phases * nfft, kOncePerBurst);
            add("Received FFT", phases * nlog2n(nfft), kTwicePerBurst);
            add("Per-bin conj(H) F(r) / spectrum", phases * nfft + nfft, kTwicePerBurst);
            add("Inverse FFT", nlog2n(nfft), kTwicePerBurst);
            add("Hadamard despreading", ns * sf * std::log2(sf), kTwicePerBurst);
            break;
        }
        case Detector::mf: {
            add(lb::system_matrix, phases * k * sf * w, kOncePerBurst);
            add(lb::matched_filter, phases * k * ns * q, kTwicePerBurst);
            add("Energy normalization", k * ns, kTwicePerBurst);
            break;
        }
    }
    return rep;
}

}  // namespace fastjd
