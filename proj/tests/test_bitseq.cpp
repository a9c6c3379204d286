#include "doctest.h"

#include <random>
#include <set>
#include <stdexcept>
#include <string>

#include "hrsv/bitseq.hpp"

using hrsv::BitSequence;
using hrsv::CountMode;
using hrsv::CountTable;
using hrsv::Pattern;

namespace {

// Overlapping occurrences by plain string search, independent of both counters.
std::uint64_t brute_count(const std::string& s, const std::string& w, bool cyclic) {
    if (w.size() > s.size() || s.empty()) return 0;
    const std::string hay = cyclic ? s + s.substr(0, w.size() - 1) : s;
    std::uint64_t n = 0;
    for (std::size_t pos = hay.find(w); pos != std::string::npos && pos < s.size();
         pos = hay.find(w, pos + 1)) {
        ++n;
    }
    return n;
}

std::string random_bits(std::mt19937& rng, std::size_t n) {
    std::string s(n, '0');
    for (auto& c : s) c = static_cast<char>('0' + (rng() & 1U));
    return s;
}

void check_against_brute(const std::string& s, unsigned max_len, const CountTable& t, bool cyclic) {
    for (unsigned h = 1; h <= max_len; ++h) {
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << h); ++v) {
            const Pattern p{h, v};
            REQUIRE_MESSAGE(t.count(p) == brute_count(s, p.to_string(), cyclic),
                            "s=" << s << " w=" << p.to_string());
        }
    }
}

}  // namespace

TEST_SUITE("bitseq") {

TEST_CASE("BitSequence rejects non-binary input") {
    CHECK_THROWS_AS(BitSequence::from_string("0120"), std::invalid_argument);
    CHECK_THROWS_AS(BitSequence(std::vector<std::uint8_t>{0, 2}), std::invalid_argument);
    BitSequence s = BitSequence::from_string("0110");
    CHECK(s.size() == 4);
    CHECK(s.to_string() == "0110");
    CHECK(s.prefix(2).to_string() == "01");
    CHECK(s.prefix(10) == s);
}

TEST_CASE("pattern keys keep length and value apart") {
    CHECK(Pattern::from_string("0") != Pattern::from_string("00"));
    CHECK(Pattern::from_string("011").value == 3);
    CHECK(Pattern::from_string("011").to_string() == "011");
    const auto t = hrsv::count_substrings(BitSequence::from_string("000"), 2, CountMode::linear);
    CHECK(t.count("0") == 3);
    CHECK(t.count("00") == 2);
}

TEST_CASE("worked counting example: 001011011") {
    const auto s = BitSequence::from_string("001011011");
    for (const auto& t : {hrsv::count_substrings(s, 3, CountMode::linear),
                          hrsv::count_substrings_fast(s, 3)}) {
        CHECK(t.count("0") == 4);
        CHECK(t.count("1") == 5);
        CHECK(t.count("00") == 1);
        CHECK(t.count("01") == 3);
        CHECK(t.count("10") == 2);
        CHECK(t.count("11") == 2);
        CHECK(t.count("000") == 0);
    }
}

TEST_CASE("queries beyond the bound are errors, not zeros") {
    const auto t = hrsv::count_substrings_fast(BitSequence::from_string("0101"), 2);
    CHECK_THROWS_AS((void)t.count("010"), std::out_of_range);
    CHECK_THROWS_AS((void)t.count(Pattern{0, 0}), std::out_of_range);
    CHECK_THROWS_AS((void)t.count(Pattern{2, 4}), std::out_of_range);
    CHECK_THROWS_AS(CountTable(0, CountMode::linear, 0), std::invalid_argument);
    CHECK_THROWS_AS(CountTable(hrsv::kMaxPatternLength + 1, CountMode::linear, 0),
                    std::length_error);
}

TEST_CASE("empty sequence yields all-zero counts") {
    const BitSequence empty;
    for (const auto& t : {hrsv::count_substrings(empty, 2, CountMode::linear),
                          hrsv::count_substrings(empty, 2, CountMode::cyclic),
                          hrsv::count_substrings_fast(empty, 2)}) {
        for (unsigned h = 1; h <= 2; ++h) {
            for (auto c : t.level(h)) CHECK(c == 0);
        }
    }
}

TEST_CASE("cyclic 0011 sees every pair once") {
    const auto t = hrsv::count_substrings(BitSequence::from_string("0011"), 2, CountMode::cyclic);
    CHECK(t.count("00") == 1);
    CHECK(t.count("01") == 1);
    CHECK(t.count("11") == 1);
    CHECK(t.count("10") == 1);
}

TEST_CASE("constant sequence") {
    const auto t = hrsv::count_substrings_fast(BitSequence::from_string("0000"), 2);
    CHECK(t.count("0") == 4);
    CHECK(t.count("1") == 0);
    CHECK(t.count("00") == 3);
    CHECK(t.count("01") == 0);
    CHECK(t.count("10") == 0);
    CHECK(t.count("11") == 0);
}

TEST_CASE("edge queries") {
    const auto t = hrsv::count_substrings_fast(BitSequence::from_string("0010110"), 3);
    CHECK(t.starts_with(Pattern::from_string("001")));
    CHECK(t.starts_with(Pattern::from_string("0")));
    CHECK_FALSE(t.starts_with(Pattern::from_string("01")));
    CHECK(t.ends_with(Pattern::from_string("110")));
    CHECK(t.ends_with(Pattern::from_string("10")));
    CHECK_FALSE(t.ends_with(Pattern::from_string("00")));
}

TEST_CASE("both counters match string search on random input") {
    std::mt19937 rng(20240601);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = rng() % 40;
        const unsigned len = 1 + rng() % 6;
        const auto s = random_bits(rng, n);
        const auto bits = BitSequence::from_string(s);
        check_against_brute(s, len, hrsv::count_substrings(bits, len, CountMode::linear), false);
        check_against_brute(s, len, hrsv::count_substrings(bits, len, CountMode::cyclic), true);
        check_against_brute(s, len, hrsv::count_substrings_fast(bits, len), false);
    }
}

TEST_CASE("per-length sums and prefix-extension identity, exhaustively for n <= 10") {
    for (std::size_t n = 0; n <= 10; ++n) {
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
            std::string s(n, '0');
            for (std::size_t i = 0; i < n; ++i) s[i] = ((code >> i) & 1U) ? '1' : '0';
            const auto bits = BitSequence::from_string(s);
            const unsigned len = 10;
            const auto lin = hrsv::count_substrings_fast(bits, len);
            const auto cyc = hrsv::count_substrings(bits, len, CountMode::cyclic);
            for (unsigned h = 1; h <= len; ++h) {
                std::uint64_t lin_sum = 0, cyc_sum = 0;
                for (auto c : lin.level(h)) lin_sum += c;
                for (auto c : cyc.level(h)) cyc_sum += c;
                CHECK(lin_sum == (h <= n ? n - h + 1 : 0));
                CHECK(cyc_sum == (h <= n ? n : 0));
            }
            for (unsigned h = 1; h < len; ++h) {
                for (std::uint64_t w = 0; w < (std::uint64_t{1} << h); ++w) {
                    const std::uint64_t lead = lin.starts_with(Pattern{h, w}) ? 1 : 0;
                    const auto zero_w = lin.count(Pattern{h + 1, w});
                    const auto one_w = lin.count(Pattern{h + 1, (std::uint64_t{1} << h) | w});
                    REQUIRE(zero_w + one_w + lead == lin.count(Pattern{h, w}));
                }
            }
        }
    }
}

TEST_CASE("prefix-extension identity on long random sequences") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto bits = BitSequence::from_string(random_bits(rng, 1 + rng() % 4096));
        const auto t = hrsv::count_substrings(bits, 10, CountMode::linear);
        CHECK(t == hrsv::count_substrings_fast(bits, 10));
        for (unsigned h = 1; h < 10; ++h) {
            for (std::uint64_t w = 0; w < (std::uint64_t{1} << h); ++w) {
                const std::uint64_t lead = t.starts_with(Pattern{h, w}) ? 1 : 0;
                REQUIRE(t.count(Pattern{h + 1, w}) +
                            t.count(Pattern{h + 1, (std::uint64_t{1} << h) | w}) + lead ==
                        t.count(Pattern{h, w}));
            }
        }
    }
}

TEST_CASE("debruijn small orders") {
    CHECK(hrsv::debruijn(1).to_string() == "01");
    CHECK(hrsv::debruijn(2).to_string() == "0011");
    CHECK(hrsv::debruijn(3).to_string() == "00010111");
    CHECK_THROWS_AS(hrsv::debruijn(0), std::invalid_argument);
    CHECK_THROWS_AS(hrsv::debruijn(hrsv::kMaxDebruijnOrder + 1), std::length_error);
    CHECK_THROWS_AS(hrsv::debruijn(12, 10), std::length_error);
}

TEST_CASE("debruijn is the lexicographically least De Bruijn sequence for k <= 4") {
    for (unsigned k = 1; k <= 4; ++k) {
        const std::size_t n = std::size_t{1} << k;
        std::string least;
        // enumerate candidates in lexicographic order; first valid one wins
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << n) && least.empty(); ++code) {
            std::string s(n, '0');
            for (std::size_t i = 0; i < n; ++i) s[i] = ((code >> (n - 1 - i)) & 1U) ? '1' : '0';
            std::set<std::string> seen;
            const std::string wrap = s + s.substr(0, k - 1);
            for (std::size_t i = 0; i < n; ++i) seen.insert(wrap.substr(i, k));
            if (seen.size() == n) least = s;
        }
        CHECK(hrsv::debruijn(k).to_string() == least);
    }
}

TEST_CASE("debruijn cyclic windows are all distinct up to order 16") {
    for (unsigned k = 1; k <= 16; ++k) {
        const auto d = hrsv::debruijn(k);
        REQUIRE(d.size() == (std::size_t{1} << k));
        const auto t = hrsv::count_substrings(d, k, CountMode::cyclic);
        for (auto c : t.level(k)) REQUIRE(c == 1);
    }
}

}  // TEST_SUITE
