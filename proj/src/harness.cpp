#include "fastjd/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fastjd/baselines.hpp"
#include "fastjd/structured.hpp"

namespace fastjd {

const std::vector<std::string>& known_detectors() {
    static const std::vector<std::string> names{"jdfft", "jdfft61", "jdfft64", "jdchol", "sdchol", "sdfft", "mf", "oracle"};
    return names;
}

ChannelProfile ScenarioConfig::profile() const {
    if (channel == "custom" && !custom_delays.empty()) {
        return make_custom_profile(custom_delays, custom_powers, custom_speed_kmh);
    }
    return make_profile(channel);
}

void ScenarioConfig::validate() const {
    slot.validate();
    profile().validate(slot.w);
    require(n_slots >= 1, "slots must be >= 1");
    require(!snr_grid.empty(), "SNR grid must not be empty");
    for (std::size_t i = 1; i < snr_grid.size(); ++i) {
        require(snr_grid[i] > snr_grid[i - 1], "SNR grid must be strictly increasing");
    }
    require(!detectors.empty(), "no detectors selected");
    std::set<std::string> seen;
    for (const auto& d : detectors) {
        const auto& known = known_detectors();
        require(std::find(known.begin(), known.end(), d) != known.end(), "unknown detector '" + d + "'");
        require(seen.insert(d).second, "detector listed twice: " + d);
        if (d == "jdfft64") {
            require(slot.n_s <= 64, "jdfft64 requires n_s <= 64");
        }
        if (d == "oracle") {
            require(slot.k * slot.n_s <= kOracleGuard, "oracle detector exceeds the dense size guard");
        }
    }
    require(jdfft.p == 0 || jdfft.p >= slot.n_s, "jdfft processing length must be >= n_s");
    require(is_power_of_two(static_cast<std::size_t>(slot.sf)), "sf must be a power of two");
}

std::string ScenarioConfig::canonical() const {
    std::ostringstream os;
    os.precision(17);
    os << "sf=" << slot.sf << "\nk=" << slot.k << "\nn_s=" << slot.n_s << "\nw=" << slot.w << "\nn_over=" << slot.n_over
       << "\np=" << slot.p << "\ncode_allocation=";
    for (std::size_t i = 0; i < slot.code_allocation.size(); ++i) {
        os << (i ? "," : "") << slot.code_allocation[i];
    }
    os << "\nchannel=" << channel << "\ncustom_delays=";
    for (std::size_t i = 0; i < custom_delays.size(); ++i) {
        os << (i ? "," : "") << custom_delays[i];
    }
    os << "\ncustom_powers=";
    for (std::size_t i = 0; i < custom_powers.size(); ++i) {
        os << (i ? "," : "") << custom_powers[i];
    }
    os << "\ncustom_speed_kmh=" << custom_speed_kmh << "\ncarrier_hz=" << carrier_hz << "\ncorrelated=" << correlated
       << "\nsnr=";
    for (std::size_t i = 0; i < snr_grid.size(); ++i) {
        os << (i ? "," : "") << snr_grid[i];
    }
    os << "\nslots=" << n_slots << "\ndetectors=";
    for (std::size_t i = 0; i < detectors.size(); ++i) {
        os << (i ? "," : "") << detectors[i];
    }
    os << "\njdfft.p=" << jdfft.p << "\njdfft.matched_filter="
       << (jdfft.matched_filter == MatchedFilterMode::fft ? "fft" : "direct")
       << "\njdfft.bin_solve=" << (jdfft.bin_solve == BinSolveMode::lu ? "lu" : "inverse")
       << "\njdfft.window_extension=" << jdfft.window_extension << "\nseed=" << master_seed
       << "\nscramble_seed=" << scramble_seed << "\nmidamble_seed=" << midamble_seed << "\n";
    return os.str();
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (const char ch : s + ",") {
        if (ch == ',') {
            const auto b = cur.find_first_not_of(" \t");
            const auto e = cur.find_last_not_of(" \t");
            if (b != std::string::npos) {
                out.push_back(cur.substr(b, e - b + 1));
            }
            cur.clear();
        } else {
            cur += ch;
        }
    }
    return out;
}

namespace {

double to_double(const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + s + "'");
    }
    if (pos != s.size()) {
        throw ConfigError("not a number: '" + s + "'");
    }
    return v;
}

int to_int(const std::string& s) {
    const double v = to_double(s);
    if (v != std::floor(v)) {
        throw ConfigError("not an integer: '" + s + "'");
    }
    return static_cast<int>(v);
}

bool to_bool(const std::string& s) {
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw ConfigError("not a boolean: '" + s + "'");
}

}  // namespace

std::vector<double> parse_snr_grid(const std::string& spec) {
    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {
        std::vector<double> parts;
        std::string cur;
        for (const char ch : spec + ":") {
            if (ch == ':') {
                parts.push_back(to_double(cur));
                cur.clear();
            } else {
                cur += ch;
            }
        }
        require(parts.size() == 3, "SNR range must be a:b:step");
        require(parts[2] > 0.0, "SNR step must be positive");
        const int n = static_cast<int>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
        require(n >= 0, "SNR range end precedes its start");
        for (int i = 0; i <= n; ++i) {
            out.push_back(parts[0] + i * parts[2]);
        }
    } else {
        for (const auto& t : split_list(spec)) {
            out.push_back(to_double(t));
        }
    }
    require(!out.empty(), "SNR grid must not be empty");
    return out;
}

ScenarioConfig parse_scenario(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream is(text);
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    ScenarioConfig c;
    for (const auto& [section, body] : tree) {
        for (const auto& [key, node] : body) {
            const std::string v = node.get_value<std::string>();
            const std::string id = section + "." + key;
            if (id == "slot.sf") c.slot.sf = to_int(v);
            else if (id == "slot.k") c.slot.k = to_int(v);
            else if (id == "slot.n_s") c.slot.n_s = to_int(v);
            else if (id == "slot.w") c.slot.w = to_int(v);
            else if (id == "slot.n_over") c.slot.n_over = to_int(v);
            else if (id == "slot.p") c.slot.p = to_int(v);
            else if (id == "slot.code_allocation") {
                c.slot.code_allocation.clear();
                for (const auto& t : split_list(v)) c.slot.code_allocation.push_back(to_int(t));
            } else if (id == "slot.codes_per_user") {
                const int m = to_int(v);
                require(m >= 1, "codes_per_user must be >= 1");
                c.slot.code_allocation.clear();
                for (int code = 0; code < c.slot.k; ++code) c.slot.code_allocation.push_back(code / m);
            } else if (id == "channel.profile") c.channel = v;
            else if (id == "channel.delays") {
                c.custom_delays.clear();
                for (const auto& t : split_list(v)) c.custom_delays.push_back(to_int(t));
            } else if (id == "channel.powers") {
                c.custom_powers.clear();
                for (const auto& t : split_list(v)) c.custom_powers.push_back(to_double(t));
            } else if (id == "channel.speed_kmh") c.custom_speed_kmh = to_double(v);
            else if (id == "channel.carrier_hz") c.carrier_hz = to_double(v);
            else if (id == "channel.correlated") c.correlated = to_bool(v);
            else if (id == "run.snr") c.snr_grid = parse_snr_grid(v);
            else if (id == "run.slots") c.n_slots = to_int(v);
            else if (id == "run.detectors") c.detectors = split_list(v);
            else if (id == "run.seed") c.master_seed = static_cast<std::uint64_t>(std::stoull(v));
            else if (id == "run.scramble_seed") c.scramble_seed = static_cast<std::uint64_t>(std::stoull(v));
            else if (id == "run.midamble_seed") c.midamble_seed = static_cast<std::uint64_t>(std::stoull(v));
            else if (id == "jdfft.p") c.jdfft.p = to_int(v);
            else if (id == "jdfft.matched_filter") {
                require(v == "direct" || v == "fft", "matched_filter must be direct or fft");
                c.jdfft.matched_filter = v == "fft" ? MatchedFilterMode::fft : MatchedFilterMode::direct;
            } else if (id == "jdfft.bin_solve") {
                require(v == "lu" || v == "inverse", "bin_solve must be lu or inverse");
                c.jdfft.bin_solve = v == "lu" ? BinSolveMode::lu : BinSolveMode::explicit_inverse;
            } else if (id == "jdfft.window_extension") c.jdfft.window_extension = to_bool(v);
            else throw ConfigError("unknown config key '" + id + "'");
        }
    }
    if (c.channel != "custom" && (!c.custom_delays.empty() || !c.custom_powers.empty())) {
        throw ConfigError("channel delays/powers require profile = custom");
    }
    if (c.slot.p < c.slot.n_s) {
        c.slot.p = c.slot.n_s;
    }
    c.validate();
    return c;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (f == nullptr) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::string text;
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) {
        text.append(buf, n);
    }
    std::fclose(f);
    return parse_scenario(text);
}

std::pair<double, double> clopper_pearson(std::uint64_t errors, std::uint64_t bits) {
    if (bits == 0) {
        return {0.0, 1.0};
    }
    const double x = static_cast<double>(errors);
    const double n = static_cast<double>(bits);
    const double lo = errors == 0 ? 0.0 : boost::math::ibeta_inv(x, n - x + 1.0, 0.025);
    const double hi = errors == bits ? 1.0 : boost::math::ibeta_inv(x + 1.0, n - x, 0.975);
    return {lo, hi};
}

double BerPoint::ci95() const {
    const auto [lo, hi] = clopper_pearson(errors, bits);
    return 0.5 * (hi - lo);
}

const BerPoint& BerCurve::point(const std::string& detector, double snr_db) const {
    for (const auto& p : points) {
        if (p.detector == detector && std::abs(p.snr_db - snr_db) < 1e-9) {
            return p;
        }
    }
    throw ConfigError("no BER point for " + detector);
}

std::string BerCurve::csv() const {
    std::ostringstream os;
    os << "detector,snr_db,slots,bits,errors,ber,ci95\n";
    char buf[256];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof buf, "%s,%.3f,%d,%llu,%llu,%.8e,%.8e\n", p.detector.c_str(), p.snr_db, p.slots,
                      static_cast<unsigned long long>(p.bits), static_cast<unsigned long long>(p.errors), p.ber(),
                      p.ci95());
        os << buf;
    }
    return os.str();
}

namespace {

std::uint32_t count_errors(const CVector& soft, const std::vector<std::uint8_t>& bits, std::size_t offset) {
    const auto hard = qpsk_demap(soft);
    std::uint32_t e = 0;
    for (std::size_t i = 0; i < hard.size(); ++i) {
        e += hard[i] != bits[offset + i] ? 1u : 0u;
    }
    return e;
}

}  // namespace

BerCurve run_scenario(const ScenarioConfig& config, const std::vector<std::pair<std::string, CustomDetector>>& extra) {
    config.validate();
    const SlotConfig& slot = config.slot;
    const ChannelProfile profile = config.profile();
    const CodeSet codes = generate_codes(slot.sf, slot.k, config.scramble_seed);
    const CVector midamble = make_midamble(config.midamble_seed);
    const Eigen::Index per_field = static_cast<Eigen::Index>(slot.k) * slot.n_s;

    std::vector<std::string> names = config.detectors;
    for (const auto& [name, fn] : extra) {
        require(std::find(names.begin(), names.end(), name) == names.end(), "duplicate detector name " + name);
        names.push_back(name);
    }
    const std::size_t n_snr = config.snr_grid.size();

    BerCurve curve;
    curve.snr_grid = config.snr_grid;
    curve.bits_per_slot = static_cast<std::uint64_t>(per_field) * 2 * 2;
    for (const auto& name : names) {
        curve.slot_errors[name].assign(n_snr, std::vector<std::uint32_t>(static_cast<std::size_t>(config.n_slots), 0));
    }

    JdfftOptions base_window;
    base_window.p = slot.n_s;
    base_window.window_extension = true;

    for (int s = 0; s < config.n_slots; ++s) {
        const std::uint64_t channel_seed = config.correlated ? derive_seed(config.master_seed, 1) : derive_seed(config.master_seed, 1, static_cast<std::uint64_t>(s));
        const ChannelRealization real =
            realize(profile, slot, config.carrier_hz, config.correlated ? s : 0, channel_seed);
        std::mt19937_64 rng(derive_seed(config.master_seed, 2, static_cast<std::uint64_t>(s)));
        const Frame frame = random_frame(static_cast<int>(2 * per_field), rng);
        const CVector burst = spread_and_assemble(frame.symbols, codes, midamble, slot);
        const TransferBlocks tb = build_transfer_blocks(real.h, codes, slot);
        const std::uint64_t noise_seed = derive_seed(config.master_seed, 3, static_cast<std::uint64_t>(s));

        for (std::size_t si = 0; si < n_snr; ++si) {
            const double snr = config.snr_grid[si];
            const Received rx = propagate(burst, real, slot, snr, noise_seed);
            const double sigma2 = rx.sigma2 > 0.0 ? rx.sigma2 : 1e-12;

            std::array<FieldWindow, 2> windows{extend_window(rx.r, 0, midamble, real, slot, base_window),
                                               extend_window(rx.r, 1, midamble, real, slot, base_window)};
            std::array<CVector, 2> sent{frame.symbols.head(per_field), frame.symbols.tail(per_field)};

            for (const auto& name : names) {
                std::array<CVector, 2> soft;
                if (name == "jdfft" || name == "jdfft61" || name == "jdfft64") {
                    JdfftOptions opt = config.jdfft;
                    if (name == "jdfft61") opt.p = slot.n_s;
                    if (name == "jdfft64") opt.p = 64;
                    const JdfftDetector det(tb, sigma2, slot, opt);
                    for (int f = 0; f < 2; ++f) {
                        soft[f] = det.solve(extend_window(rx.r, f, midamble, real, slot, opt));
                    }
                } else if (name == "jdchol") {
                    const BlockBandSet bands = correlation_bands(tb, sigma2);
                    const BandedBlockFactor g = approx_block_cholesky(bands, slot.n_s, jd_chol_depth(bands.l()));
                    for (int f = 0; f < 2; ++f) {
                        soft[f] = banded_block_solve(g, matched_filter_direct(tb, windows[f].r, slot.n_s));
                    }
                } else if (name == "sdchol" || name == "sdfft") {
                    const ChipEqualizerModel model = make_chip_model(real.h, codes, sigma2);
                    for (int f = 0; f < 2; ++f) {
                        soft[f] = name == "sdchol" ? sd_chol(model, windows[f].r, slot.n_s)
                                                   : sd_fft(model, windows[f].r, slot.n_s);
                    }
                } else if (name == "mf") {
                    for (int f = 0; f < 2; ++f) {
                        soft[f] = matched_filter_detector(tb, windows[f].r, slot.n_s);
                    }
                } else if (name == "oracle") {
                    for (int f = 0; f < 2; ++f) {
                        soft[f] = dense_mmse_oracle(tb, windows[f].r, slot.n_s, sigma2);
                    }
                } else {
                    const auto it = std::find_if(extra.begin(), extra.end(), [&](const auto& e) { return e.first == name; });
                    for (int f = 0; f < 2; ++f) {
                        FieldContext ctx{s, f, snr, sigma2, &slot, &tb, &windows[f], &sent[f]};
                        soft[f] = it->second(ctx);
                        require(soft[f].size() == per_field, "custom detector returned the wrong length");
                    }
                }
                std::uint32_t e = 0;
                for (int f = 0; f < 2; ++f) {
                    e += count_errors(soft[f], frame.bits, static_cast<std::size_t>(f * per_field * 2));
                }
                curve.slot_errors[name][si][static_cast<std::size_t>(s)] = e;
            }
        }
    }

    for (const auto& name : names) {
        for (std::size_t si = 0; si < n_snr; ++si) {
            BerPoint p;
            p.detector = name;
            p.snr_db = config.snr_grid[si];
            p.slots = config.n_slots;
            p.bits = curve.bits_per_slot * static_cast<std::uint64_t>(config.n_slots);
            for (const auto e : curve.slot_errors[name][si]) {
                p.errors += e;
            }
            curve.points.push_back(p);
        }
    }
    return curve;
}

PairedDifference paired_difference(const BerCurve& curve, const std::string& a, const std::string& b,
                                   double snr_lo, double snr_hi) {
    const auto ia = curve.slot_errors.find(a);
    const auto ib = curve.slot_errors.find(b);
    require(ia != curve.slot_errors.end() && ib != curve.slot_errors.end(), "paired_difference: unknown detector");
    std::vector<double> diffs;
    const double bps = static_cast<double>(curve.bits_per_slot);
    for (std::size_t si = 0; si < curve.snr_grid.size(); ++si) {
        const double snr = curve.snr_grid[si];
        if (snr < snr_lo - 1e-9 || snr > snr_hi + 1e-9) {
            continue;
        }
        for (std::size_t s = 0; s < ia->second[si].size(); ++s) {
            diffs.push_back((static_cast<double>(ia->second[si][s]) - static_cast<double>(ib->second[si][s])) / bps);
        }
    }
    PairedDifference out;
    out.n = diffs.size();
    if (diffs.empty()) {
        return out;
    }
    double sum = 0.0;
    for (const double d : diffs) sum += d;
    out.mean = sum / static_cast<double>(out.n);
    if (out.n > 1) {
        double ss = 0.0;
        for (const double d : diffs) ss += (d - out.mean) * (d - out.mean);
        out.ci95 = 1.96 * std::sqrt(ss / static_cast<double>(out.n - 1)) / std::sqrt(static_cast<double>(out.n));
    }
    return out;
}

std::uint64_t config_hash(const ScenarioConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char c : config.canonical()) {
        h = (h ^ c) * 0x100000001b3ull;
    }
    return h;
}

std::string run_manifest(const ScenarioConfig& config) {
    std::ostringstream os;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash(config)));
    os << "config_hash=" << buf << "\n";
    os << "seed_derivation=splitmix64(seed, stream, slot); streams 1=channel 2=symbols 3=noise\n";
    os << "profile_stand_in=" << (config.profile().stand_in ? "true" : "false") << "\n";
    os << config.canonical();
    return os.str();
}

}  // namespace fastjd
