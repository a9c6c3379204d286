#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "hrsv/estimator.hpp"
#include "hrsv/synth.hpp"

using hrsv::BitSequence;
using hrsv::CountMode;
using hrsv::Denominator;

namespace {

std::uint64_t occurrences(const std::string& s, const std::string& w) {
    if (w.size() > s.size()) return 0;
    std::uint64_t n = 0;
    for (std::size_t i = 0; i + w.size() <= s.size(); ++i) {
        if (s.compare(i, w.size(), w) == 0) ++n;
    }
    return n;
}

// Reference estimator: enumerates every history as a string.
std::optional<double> reference_epsilon(const std::string& s, unsigned h, bool successor_only) {
    if (h == 0) {
        if (s.empty()) return std::nullopt;
        const double n = static_cast<double>(s.size());
        return std::max(std::abs(static_cast<double>(occurrences(s, "0")) / n - 0.5),
                        std::abs(static_cast<double>(occurrences(s, "1")) / n - 0.5));
    }
    std::optional<double> worst;
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << h); ++code) {
        std::string w(h, '0');
        for (unsigned i = 0; i < h; ++i) w[i] = ((code >> (h - 1 - i)) & 1U) ? '1' : '0';
        auto denom = occurrences(s, w);
        if (successor_only && s.size() >= h && s.compare(s.size() - h, h, w) == 0) --denom;
        if (denom == 0) continue;
        for (const char b : {'0', '1'}) {
            const double dev =
                std::abs(static_cast<double>(occurrences(s, w + b)) / static_cast<double>(denom) -
                         0.5);
            if (!worst || dev > *worst) worst = dev;
        }
    }
    return worst;
}

}  // namespace

TEST_SUITE("estimator") {

TEST_CASE("epsilon_h on small fixtures") {
    const auto zeros = hrsv::count_substrings_fast(BitSequence::from_string("0000"), 2);
    CHECK(*hrsv::epsilon_h(zeros, 0) == doctest::Approx(0.5));

    // 0011: history "1" occurs twice, never followed by 0
    const auto t = hrsv::count_substrings_fast(BitSequence::from_string("0011"), 2);
    CHECK(*hrsv::epsilon_h(t, 1) == doctest::Approx(0.5));
    CHECK(*hrsv::epsilon_h(t, 1) == doctest::Approx(*reference_epsilon("0011", 1, false)));

    CHECK_THROWS_AS((void)hrsv::epsilon_h(t, 2), std::out_of_range);
}

TEST_CASE("epsilon_h is undefined when no history occurs") {
    const auto t = hrsv::count_substrings_fast(BitSequence::from_string("01"), 4);
    CHECK(hrsv::epsilon_h(t, 2).has_value());
    CHECK_FALSE(hrsv::epsilon_h(t, 3).has_value());
    const auto empty = hrsv::count_substrings_fast(BitSequence{}, 1);
    CHECK_FALSE(hrsv::epsilon_h(empty, 0).has_value());
}

TEST_CASE("epsilon_h matches the reference estimator on random sequences") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng() % 64;
        std::string s(n, '0');
        for (auto& c : s) c = (rng() % 3 == 0) ? '1' : '0';
        const auto bits = BitSequence::from_string(s);
        const auto t = hrsv::count_substrings_fast(bits, 6);
        for (unsigned h = 0; h < 6; ++h) {
            for (const bool successor : {false, true}) {
                const auto got = hrsv::epsilon_h(
                    t, h, successor ? Denominator::with_successor : Denominator::raw);
                const auto want = reference_epsilon(s, h, successor);
                REQUIRE(got.has_value() == want.has_value());
                if (got) {
                    REQUIRE(*got == doctest::Approx(*want).epsilon(1e-12));
                    REQUIRE(*got >= 0.0);
                    REQUIRE(*got <= 0.5);
                }
            }
        }
    }
}

TEST_CASE("successor-only denominators make next-bit frequencies sum to one") {
    // 0010: histories "0" (3x, last one at the end) and "1"
    const auto t = hrsv::count_substrings_fast(BitSequence::from_string("0010"), 2);
    // raw: "00" 1/3, "01" 1/3, "10" 1/1 -> max deviation 1/2
    CHECK(*hrsv::epsilon_h(t, 1, Denominator::raw) == doctest::Approx(0.5));
    // successor-only: "0" occurs twice with a successor -> 1/2, 1/2; "1" -> 1
    CHECK(*hrsv::epsilon_h(t, 1, Denominator::with_successor) == doctest::Approx(0.5));
    const auto u = hrsv::count_substrings_fast(BitSequence::from_string("01100"), 2);
    // raw: "0" occurs 3 times, once at the end -> 1/3 against 1/2
    CHECK(*hrsv::epsilon_h(u, 1, Denominator::raw) == doctest::Approx(1.0 / 6.0));
    CHECK(*hrsv::epsilon_h(u, 1, Denominator::with_successor) == doctest::Approx(0.0));
}

TEST_CASE("max_history") {
    CHECK(hrsv::max_history(2) == 0);
    CHECK(hrsv::max_history(3) == 0);
    CHECK(hrsv::max_history(8) == 2);
    CHECK(hrsv::max_history(1000) == 8);
    CHECK(hrsv::max_history(1'191'328) == 19);
    CHECK_THROWS_AS(hrsv::max_history(1), std::invalid_argument);
    CHECK_THROWS_AS(hrsv::max_history(0), std::invalid_argument);
    for (std::size_t n = 2; n < 5000; ++n) {
        REQUIRE(hrsv::max_history(n) ==
                static_cast<unsigned>(std::floor(std::log2(static_cast<double>(n)))) - 1);
    }
}

TEST_CASE("loglog_history") {
    CHECK(hrsv::loglog_history(2) == 0);
    CHECK(hrsv::loglog_history(16) == 2);
    CHECK(hrsv::loglog_history(1'000'000) == 4);
    for (std::size_t n = 4; n < 100000; n += 37) {
        const auto expected = static_cast<unsigned>(
            std::floor(std::log2(std::floor(std::log2(static_cast<double>(n))))));
        REQUIRE(hrsv::loglog_history(n) == std::min(expected, hrsv::max_history(n)));
    }
}

TEST_CASE("profile of a constant sequence") {
    const auto p = hrsv::epsilon_profile(BitSequence::from_string("0000"));
    CHECK(p.max_history == 1);
    REQUIRE(p.epsilons.size() == 2);
    CHECK(*p.epsilons[0] == doctest::Approx(0.5));
    CHECK(*p.epsilons[1] == doctest::Approx(0.5));
    REQUIRE(p.weighted.has_value());
    CHECK(*p.weighted == doctest::Approx(0.5));
}

TEST_CASE("cyclic De Bruijn profiles vanish up to k-1") {
    for (unsigned k = 2; k <= 16; ++k) {
        const auto p = hrsv::epsilon_profile(hrsv::debruijn(k), {}, CountMode::cyclic);
        REQUIRE(p.max_history == k - 1);
        for (const auto& e : p.epsilons) REQUIRE(*e == 0.0);
        REQUIRE(*p.weighted == 0.0);
    }
}

TEST_CASE("explicit requests are clamped unless forced") {
    const auto s = hrsv::biased_coin(1000, 0.0, 5);
    const auto clamped = hrsv::epsilon_profile(s, {40, false});
    CHECK(clamped.max_history == 8);
    CHECK(clamped.clamped);
    CHECK(clamped.requested_history == 40U);
    CHECK(clamped.epsilons.size() == 9);

    const auto below = hrsv::epsilon_profile(s, {3, false});
    CHECK(below.max_history == 3);
    CHECK_FALSE(below.clamped);

    const auto forced = hrsv::epsilon_profile(s, {10, true});
    CHECK(forced.max_history == 10);
    CHECK(forced.forced);
    CHECK(forced.epsilons.size() == 11);

    CHECK_THROWS_AS(hrsv::epsilon_profile(s, {40, true}), std::length_error);
}

TEST_CASE("profile rejects sequences shorter than two bits") {
    CHECK_THROWS_AS(hrsv::epsilon_profile(BitSequence{}), std::invalid_argument);
    CHECK_THROWS_AS(hrsv::epsilon_profile(BitSequence::from_string("1")), std::invalid_argument);
}

TEST_CASE("forced profiles can contain undefined entries") {
    const auto p = hrsv::epsilon_profile(BitSequence::from_string("01"), {3, true});
    CHECK(p.max_history == 3);
    CHECK_FALSE(p.all_defined());
    CHECK_FALSE(p.weighted.has_value());
    CHECK_THROWS_AS(hrsv::weighted_epsilon(p, true), std::invalid_argument);
}

TEST_CASE("weighted epsilon") {
    hrsv::EpsilonProfile p;
    p.n = 8;
    p.max_history = 2;
    p.epsilons = {0.0, 0.25, 0.5};
    CHECK(hrsv::weighted_epsilon(p) == doctest::Approx(7.0 / 44.0).epsilon(1e-12));

    p.epsilons = {0.5, 0.5, 0.5};
    CHECK(hrsv::weighted_epsilon(p) == doctest::Approx(0.5).epsilon(1e-12));
    p.epsilons = {0.0, 0.0, 0.0};
    CHECK(hrsv::weighted_epsilon(p) == 0.0);

    p.n = 1000;  // bound 8, profile has 2
    CHECK_THROWS_AS(hrsv::weighted_epsilon(p), std::invalid_argument);
    CHECK_NOTHROW(hrsv::weighted_epsilon(p, true));

    p.n = 8;
    p.epsilons = {0.1, std::nullopt, 0.2};
    CHECK_THROWS_AS(hrsv::weighted_epsilon(p), std::invalid_argument);
}

TEST_CASE("history weights sum to one") {
    for (unsigned h = 0; h <= 64; ++h) {
        double total = 0.0;
        for (unsigned i = 0; i <= h; ++i) total += hrsv::history_weight(i, h);
        REQUIRE(std::abs(total - 1.0) <= 1e-12);
    }
    CHECK(hrsv::harmonic_weight(2) == doctest::Approx(11.0 / 6.0));
    CHECK(hrsv::history_weight(3, 2) == 0.0);
}

TEST_CASE("bias estimate converges for biased coins") {
    for (const double eps : {0.0, 0.1, 0.25}) {
        const auto s = hrsv::biased_coin(1'000'000, eps, 42);
        const auto p = hrsv::epsilon_profile(s, {0, false});
        CHECK(std::abs(*p.epsilons[0] - eps) <= 0.005);
    }
    const auto s = hrsv::biased_coin(1'000'000, 0.1, 3);
    const auto p = hrsv::epsilon_profile(s);
    CHECK(*p.epsilons[0] >= 0.095);
    CHECK(*p.epsilons[0] <= 0.105);
}

}  // TEST_SUITE
