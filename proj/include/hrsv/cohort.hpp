#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hrsv/bitseq.hpp"
#include "hrsv/estimator.hpp"
#include "hrsv/ingest.hpp"

namespace hrsv {

/// Bits derived from one person's recording.
struct PersonBits {
    PersonMeta meta;
    BitSequence bits;
};

struct PersonResult {
    PersonMeta meta;
    std::size_t n_bits = 0;
    EpsilonProfile profile;
    double weighted = 0.0;
    std::string mode;  // full, trim, cut(i,j), med, merged
};

/// Five-number summary plus mean. q[0] is the minimum, q[2] the median and
/// q[4] the maximum.
struct Summary {
    std::array<double, 5> q{};
    double mean = 0.0;
};

inline constexpr std::string_view kQuartileConvention = "type-7";

/// Quartiles by linear interpolation between order statistics (type 7: the
/// p-quantile sits at position p (n - 1) of the sorted values). Throws
/// std::invalid_argument for an empty input.
Summary quartiles(std::span<const double> values);

struct CohortStats {
    Sex sex = Sex::female;
    int decade = 0;  // lower age bound: ages in [decade, decade + 10)
    std::size_t count = 0;
    Summary summary;
};

struct CohortReport {
    std::vector<CohortStats> groups;       // ordered by sex (F first), then decade
    std::vector<std::string> unknown_ids;  // persons without sex or age
};

CohortReport bucket(std::span<const PersonResult> results);

/// Truncates every sequence to the shortest length in the set.
std::vector<PersonBits> trim_to_min(std::vector<PersonBits> persons);

struct MergedSegment {
    std::string id;
    std::size_t offset = 0;
    std::size_t length = 0;
};

struct MergedSequence {
    BitSequence bits;
    std::vector<MergedSegment> segments;
};

/// Concatenates already-discretized sequences in the given order, so no bit
/// spans two recordings.
MergedSequence merge_persons(std::span<const PersonBits> persons);

}  // namespace hrsv
