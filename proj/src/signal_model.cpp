#include "fastjd/signal_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <set>

namespace fastjd {

namespace {

cplx qpsk_chip(std::uint64_t q) {
    const double ang = std::numbers::pi / 4.0 * static_cast<double>(2 * (q & 3u) + 1);
    return {std::cos(ang), std::sin(ang)};
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

int SlotConfig::num_users() const {
    if (code_allocation.empty()) {
        return k;
    }
    return *std::max_element(code_allocation.begin(), code_allocation.end()) + 1;
}

int SlotConfig::user_of(int code) const {
    return code_allocation.empty() ? code : code_allocation[static_cast<std::size_t>(code)];
}

std::vector<int> SlotConfig::codes_of(int user) const {
    std::vector<int> out;
    for (int c = 0; c < k; ++c) {
        if (user_of(c) == user) {
            out.push_back(c);
        }
    }
    return out;
}

void SlotConfig::validate() const {
    require(sf >= 1, "sf must be >= 1");
    require(k >= 1 && k <= sf, "number of codes must satisfy 1 <= k <= sf");
    require(n_s >= 2, "n_s must be >= 2");
    require(w >= 1, "w must be >= 1");
    require(n_over >= 1, "oversampling factor must be >= 1");
    require(p >= n_s, "processing length p must be >= n_s");
    if (!code_allocation.empty()) {
        require(static_cast<int>(code_allocation.size()) == k,
                "code_allocation must map every code to a user");
        std::set<int> users(code_allocation.begin(), code_allocation.end());
        require(*users.begin() == 0, "code_allocation user indices must start at 0");
        require(static_cast<int>(users.size()) == *users.rbegin() + 1,
                "code_allocation must be surjective onto 0..num_users-1");
    }
}

CodeSet generate_codes(int sf, int k, std::uint64_t scramble_seed) {
    require(sf >= 1 && is_power_of_two(static_cast<std::size_t>(sf)), "sf must be a power of two");
    require(k >= 1, "k must be >= 1");
    if (k > sf) {
        throw ConfigError("more codes than the spreading factor supports");
    }
    CVector scramble = CVector::Ones(sf);
    if (scramble_seed != 0) {
        std::mt19937_64 rng(scramble_seed);
        for (int c = 0; c < sf; ++c) {
            scramble[c] = qpsk_chip(rng());
        }
    }
    const int first_row = k < sf ? 1 : 0;
    CodeSet out;
    out.codes.resize(sf, k);
    for (int col = 0; col < k; ++col) {
        const auto row = static_cast<unsigned>(first_row + col);
        for (int c = 0; c < sf; ++c) {
            const double sign = (std::popcount(row & static_cast<unsigned>(c)) & 1) ? -1.0 : 1.0;
            out.codes(c, col) = sign * scramble[c];
        }
    }
    return out;
}

CVector make_midamble(std::uint64_t seed, int length) {
    std::mt19937_64 rng(derive_seed(seed, 0x4D1Dull));
    CVector m(length);
    for (int i = 0; i < length; ++i) {
        m[i] = qpsk_chip(rng());
    }
    return m;
}

CVector qpsk_modulate(std::span<const std::uint8_t> bits) {
    require(bits.size() % 2 == 0, "QPSK needs an even number of bits");
    const double a = 1.0 / std::numbers::sqrt2;
    CVector s(static_cast<Eigen::Index>(bits.size() / 2));
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const auto b0 = bits[static_cast<std::size_t>(2 * i)];
        const auto b1 = bits[static_cast<std::size_t>(2 * i + 1)];
        s[i] = {a * (1.0 - 2.0 * b0), a * (1.0 - 2.0 * b1)};
    }
    return s;
}

std::vector<std::uint8_t> qpsk_demap(const CVector& symbols) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(symbols.size()) * 2);
    for (Eigen::Index i = 0; i < symbols.size(); ++i) {
        bits[static_cast<std::size_t>(2 * i)] = symbols[i].real() < 0.0 ? 1 : 0;
        bits[static_cast<std::size_t>(2 * i + 1)] = symbols[i].imag() < 0.0 ? 1 : 0;
    }
    return bits;
}

CVector spread_field(const CVector& d, const CodeSet& codes, int n_symbols) {
    const int sf = codes.sf();
    const int k = codes.k();
    require(d.size() == static_cast<Eigen::Index>(k) * n_symbols, "spread_field: symbol count mismatch");
    CVector chips = CVector::Zero(static_cast<Eigen::Index>(sf) * n_symbols);
    for (int i = 0; i < n_symbols; ++i) {
        chips.segment(i * sf, sf) = codes.codes * d.segment(i * k, k);
    }
    return chips;
}

CVector spread_and_assemble(const CVector& frame, const CodeSet& codes, const CVector& midamble,
                            const SlotConfig& config) {
    config.validate();
    require(codes.sf() == config.sf && codes.k() == config.k, "code set does not match the slot config");
    const Eigen::Index per_field = static_cast<Eigen::Index>(config.k) * config.n_s;
    require(frame.size() == 2 * per_field, "frame must hold 2 * K * n_s symbols");
    require(midamble.size() == kMidambleChips, "midamble must be 512 chips");

    CVector burst = CVector::Zero(config.burst_chips());
    const int fc = config.field_chips();
    burst.segment(0, fc) = spread_field(frame.head(per_field), codes, config.n_s);
    burst.segment(fc, kMidambleChips) = midamble;
    burst.segment(fc + kMidambleChips, fc) = spread_field(frame.tail(per_field), codes, config.n_s);
    return burst;
}

CVector convolve(const CVector& a, const CVector& b) {
    if (a.size() == 0 || b.size() == 0) {
        return {};
    }
    CVector out = CVector::Zero(a.size() + b.size() - 1);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] == cplx{}) {
            continue;
        }
        for (Eigen::Index j = 0; j < b.size(); ++j) {
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

TransferBlocks build_transfer_blocks(const std::vector<CVector>& h, const CodeSet& codes,
                                     const SlotConfig& config) {
    config.validate();
    require(static_cast<int>(h.size()) == config.n_over, "need one channel vector per oversampling phase");
    require(codes.sf() == config.sf && codes.k() == config.k, "code set does not match the slot config");
    TransferBlocks tb;
    tb.sf = config.sf;
    tb.k = config.k;
    tb.l = config.l();
    tb.response_length = config.response_length();
    const int rows = (tb.l + 1) * tb.sf;
    for (const auto& hn : h) {
        require(hn.size() == config.w, "channel vector length must equal w");
        CMatrix st = CMatrix::Zero(rows, tb.k);
        for (int col = 0; col < tb.k; ++col) {
            const CVector resp = convolve(codes.codes.col(col), hn);
            st.col(col).head(resp.size()) = resp;
        }
        tb.stacked.push_back(std::move(st));
    }
    return tb;
}

CMatrix build_system_matrix(const TransferBlocks& tb, int phase, int n_symbols, int n_rows) {
    const int full_rows = tb.sf * n_symbols + tb.response_length - tb.sf;
    if (n_rows < 0) {
        n_rows = full_rows;
    }
    CMatrix a = CMatrix::Zero(n_rows, static_cast<Eigen::Index>(n_symbols) * tb.k);
    const CMatrix& st = tb.stacked[static_cast<std::size_t>(phase)];
    for (int j = 0; j < n_symbols; ++j) {
        const int r0 = j * tb.sf;
        const int count = std::min<int>(static_cast<int>(st.rows()), n_rows - r0);
        if (count > 0) {
            a.block(r0, static_cast<Eigen::Index>(j) * tb.k, count, tb.k) = st.topRows(count);
        }
    }
    return a;
}

Frame random_frame(int n_symbols_total, std::mt19937_64& rng) {
    Frame f;
    f.bits.resize(static_cast<std::size_t>(n_symbols_total) * 2);
    for (std::size_t i = 0; i < f.bits.size(); i += 64) {
        const std::uint64_t word = rng();
        for (std::size_t b = 0; b < 64 && i + b < f.bits.size(); ++b) {
            f.bits[i + b] = static_cast<std::uint8_t>((word >> b) & 1u);
        }
    }
    f.symbols = qpsk_modulate(f.bits);
    return f;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t s = splitmix64(base);
    s = splitmix64(s ^ a);
    s = splitmix64(s ^ (b + 0x632BE59BD9B4E019ull));
    s = splitmix64(s ^ (c + 0x85157AF5ull));
    return s;
}

}  // namespace fastjd
