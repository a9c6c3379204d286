#include "hrsv/estimator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hrsv {

std::optional<double> epsilon_h(const CountTable& counts, unsigned h, Denominator denominator) {
    if (h + 1 > counts.max_len()) {
        throw std::out_of_range("epsilon_h: table covers patterns up to length " +
                                std::to_string(counts.max_len()) + ", history " +
                                std::to_string(h) + " needs " + std::to_string(h + 1));
    }
    const auto next = counts.level(h + 1);

    if (h == 0) {
        const auto n = counts.source_len();
        if (n == 0) return std::nullopt;
        const double total = static_cast<double>(n);
        return std::max(std::abs(static_cast<double>(next[0]) / total - 0.5),
                        std::abs(static_cast<double>(next[1]) / total - 0.5));
    }

    const auto histories = counts.level(h);
    const bool drop_tail =
        denominator == Denominator::with_successor && counts.mode() == CountMode::linear;
    std::optional<double> worst;
    for (std::uint64_t w = 0; w < histories.size(); ++w) {
        std::uint64_t occurrences = histories[w];
        if (drop_tail && occurrences > 0 && counts.ends_with(Pattern{h, w})) --occurrences;
        if (occurrences == 0) continue;
        const double denom = static_cast<double>(occurrences);
        for (std::uint64_t b = 0; b < 2; ++b) {
            const double ratio = static_cast<double>(next[(w << 1) | b]) / denom;
            const double dev = std::abs(ratio - 0.5);
            if (!worst || dev > *worst) worst = dev;
        }
    }
    return worst;
}

unsigned max_history(std::size_t n) {
    if (n < 2) {
        throw std::invalid_argument("max_history: need at least 2 bits, got " + std::to_string(n));
    }
    return static_cast<unsigned>(std::bit_width(n)) - 2;
}

unsigned loglog_history(std::size_t n) {
    const unsigned bound = max_history(n);
    const auto log2n = static_cast<std::size_t>(std::bit_width(n)) - 1;
    const auto loglog = static_cast<unsigned>(std::bit_width(log2n)) - 1;
    return std::min(loglog, bound);
}

bool EpsilonProfile::all_defined() const {
    return std::all_of(epsilons.begin(), epsilons.end(),
                       [](const std::optional<double>& e) { return e.has_value(); });
}

EpsilonProfile epsilon_profile(const BitSequence& s, HistoryRequest request, CountMode mode,
                               Denominator denominator) {
    if (s.size() < 2) {
        throw std::invalid_argument("epsilon_profile: need at least 2 bits, got " +
                                    std::to_string(s.size()));
    }
    EpsilonProfile profile;
    profile.n = s.size();
    profile.mode = mode;
    profile.denominator = denominator;
    profile.requested_history = request.max_history;

    const unsigned bound = max_history(s.size());
    unsigned h_max = bound;
    if (request.max_history) {
        h_max = *request.max_history;
        if (h_max > bound) {
            if (request.force) {
                profile.forced = true;
            } else {
                profile.clamped = true;
                h_max = bound;
            }
        }
    }
    profile.max_history = h_max;

    const unsigned len = h_max + 1;
    const CountTable counts =
        mode == CountMode::linear ? count_substrings_fast(s, len) : count_substrings(s, len, mode);
    profile.epsilons.reserve(len);
    for (unsigned h = 0; h <= h_max; ++h) {
        profile.epsilons.push_back(epsilon_h(counts, h, denominator));
    }
    if (profile.all_defined()) {
        profile.weighted = weighted_epsilon(profile, request.max_history.has_value());
    }
    return profile;
}

double harmonic_weight(unsigned max_history) {
    double w = 0.0;
    for (unsigned i = 0; i <= max_history; ++i) w += 1.0 / static_cast<double>(i + 1);
    return w;
}

double history_weight(unsigned i, unsigned max_history) {
    if (i > max_history) return 0.0;
    return (1.0 / static_cast<double>(i + 1)) / harmonic_weight(max_history);
}

double weighted_epsilon(const EpsilonProfile& profile, bool allow_custom_history) {
    if (profile.epsilons.size() != profile.max_history + std::size_t{1}) {
        throw std::invalid_argument("weighted_epsilon: profile has " +
                                    std::to_string(profile.epsilons.size()) +
                                    " entries for bound " + std::to_string(profile.max_history));
    }
    if (!profile.all_defined()) {
        throw std::invalid_argument("weighted_epsilon: profile contains undefined entries");
    }
    if (!allow_custom_history && profile.max_history != max_history(profile.n)) {
        throw std::invalid_argument("weighted_epsilon: profile bound " +
                                    std::to_string(profile.max_history) +
                                    " differs from floor(log2 n) - 1 = " +
                                    std::to_string(max_history(profile.n)));
    }
    double sum = 0.0;
    for (unsigned i = 0; i <= profile.max_history; ++i) {
        sum += *profile.epsilons[i] / static_cast<double>(i + 1);
    }
    return sum / harmonic_weight(profile.max_history);
}

}  // namespace hrsv
