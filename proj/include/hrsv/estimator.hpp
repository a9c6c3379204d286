#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hrsv/bitseq.hpp"

namespace hrsv {

/// How the number of occurrences of a history enters the ratio.
enum class Denominator {
    /// count(w) as is: the large-n form used by the reference software.
    raw,
    /// count(w) minus the final occurrence when the sequence ends with w, so
    /// only histories that have a successor bit are counted.
    with_successor,
};

/// Largest deviation |count(w b) / count(w) - 1/2| over every history w of
/// length h and every next bit b. For h == 0 the denominator is the sequence
/// length. Histories that never occur are skipped; when none occurs the
/// result is empty. Requires counts.max_len() >= h + 1.
std::optional<double> epsilon_h(const CountTable& counts, unsigned h,
                                Denominator denominator = Denominator::raw);

/// floor(log2 n) - 1: beyond this history length not every (h+1)-pattern can
/// occur in n bits. Throws std::invalid_argument for n < 2.
unsigned max_history(std::size_t n);

/// floor(log2(log2 n)), capped at max_history(n). Requires n >= 2.
unsigned loglog_history(std::size_t n);

/// Requested history bound for a profile. An empty `max_history` means the
/// automatic bound; `force` lets an explicit request exceed it.
struct HistoryRequest {
    std::optional<unsigned> max_history;
    bool force = false;
};

struct EpsilonProfile {
    std::vector<std::optional<double>> epsilons;  // index h = 0..H
    unsigned max_history = 0;                     // H
    std::size_t n = 0;
    CountMode mode = CountMode::linear;
    Denominator denominator = Denominator::raw;
    std::optional<unsigned> requested_history;
    bool clamped = false;  // request exceeded the bound and was reduced
    bool forced = false;   // request exceeded the bound and was kept
    std::optional<double> weighted;

    [[nodiscard]] bool all_defined() const;
};

/// Estimates epsilon_h for h = 0..H from one shared count table of bound H+1.
/// Linear profiles use the single-pass counter. Throws std::invalid_argument
/// for sequences shorter than 2 bits.
EpsilonProfile epsilon_profile(const BitSequence& s, HistoryRequest request = {},
                               CountMode mode = CountMode::linear,
                               Denominator denominator = Denominator::raw);

/// w(H) = sum_{i=0}^{H} 1/(i+1).
double harmonic_weight(unsigned max_history);

/// Normalized weight of history length i within a profile of bound H.
double history_weight(unsigned i, unsigned max_history);

/// Harmonic-weighted average of the profile entries.
///
/// Throws std::invalid_argument if any entry is undefined, or if the profile
/// bound differs from max_history(n) and `allow_custom_history` is false.
double weighted_epsilon(const EpsilonProfile& profile, bool allow_custom_history = false);

}  // namespace hrsv
