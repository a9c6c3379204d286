#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "hrsv/bitseq.hpp"
#include "hrsv/ingest.hpp"

namespace hrsv {

// Each discretizer emits one bit per interval that has enough predecessors,
// so the outputs are n-1, n-1 and n-2 bits long. All throw
// std::invalid_argument for series that are too short.

/// 0 when the interval lengthens by at least `offset` seconds (the heart
/// slows down), 1 otherwise.
BitSequence discretize_accel(std::span<const double> intervals, double offset = 0.0);
BitSequence discretize_accel(const RRSeries& series, double offset = 0.0);

/// 0 when the interval changes by at least `threshold` seconds in either
/// direction, 1 otherwise.
BitSequence discretize_rapid(std::span<const double> intervals, double threshold);
BitSequence discretize_rapid(const RRSeries& series, double threshold);

/// 0 when three consecutive intervals are monotone (either direction), 1
/// otherwise.
BitSequence discretize_mono(std::span<const double> intervals);
BitSequence discretize_mono(const RRSeries& series);

/// Lengths of the acceleration (1) and deceleration (0) runs removed by
/// cut_trends.
struct TrendCutPattern {
    std::size_t accel = 3;
    std::size_t decel = 3;

    /// Throws std::invalid_argument unless both lengths are at least 1.
    void validate() const;
    [[nodiscard]] std::string to_string() const;  // "(i,j)"

    friend bool operator==(const TrendCutPattern&, const TrendCutPattern&) = default;
};

struct TrendCutResult {
    BitSequence bits;
    std::size_t cycles = 0;         // accel windows followed by a removed decel window
    bool trailing_accel = false;    // final accel window removed without a decel window
};

/// Scans left to right for the first `accel` consecutive 1s and deletes
/// exactly those bits, then for the first `decel` consecutive 0s after them
/// and deletes those, and repeats. Runs are detected on original positions:
/// bits that become adjacent through a deletion never form a run, and the scan
/// never moves backwards. A run longer than the window leaves its remainder in
/// place for the next search.
TrendCutResult cut_trends_detailed(const BitSequence& s, const TrendCutPattern& pattern);
BitSequence cut_trends(const BitSequence& s, const TrendCutPattern& pattern);

}  // namespace hrsv
