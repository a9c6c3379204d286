#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hrsv {

using Millis = std::chrono::milliseconds;

/// One beat of a Holter RR listing.
struct RRRecord {
    std::uint64_t index = 0;
    /// Elapsed time of day; a clock that runs past midnight keeps counting
    /// from 24:00:00 so times never decrease.
    Millis time{0};
    /// RR duration in seconds. Holter software samples at 128 Hz, so values
    /// are usually multiples of 1/128 s; this is not enforced.
    double interval = 0.0;
    char annotation = 'N';
    bool edited = false;

    [[nodiscard]] bool normal() const noexcept { return annotation == 'N'; }

    friend bool operator==(const RRRecord&, const RRRecord&) = default;
};

struct RRSeries {
    std::string header;
    std::vector<RRRecord> records;

    [[nodiscard]] std::size_t size() const noexcept { return records.size(); }
    [[nodiscard]] bool empty() const noexcept { return records.empty(); }
    [[nodiscard]] std::vector<double> intervals() const;
    /// Wall-clock time between the first and last record.
    [[nodiscard]] Millis span() const;

    friend bool operator==(const RRSeries&, const RRSeries&) = default;
};

/// Annotation codes written by Holter analysis software. Anything else is kept
/// verbatim and treated as a perturbation.
bool known_annotation(char code);

enum class Sex { female, male };

std::string_view to_string(Sex sex);

struct PersonMeta {
    std::string id;
    std::optional<Sex> sex;
    std::optional<int> age;
    std::optional<Millis> start_time;

    [[nodiscard]] bool known() const noexcept { return sex.has_value() && age.has_value(); }

    friend bool operator==(const PersonMeta&, const PersonMeta&) = default;
};

/// Filename template with named fields, matched against the file stem.
/// Fields: <sex> (F/M), <age> (decimal years), <HHMMSS> (start time),
/// <id> (any text), <*> (ignored text). Everything else matches literally.
inline constexpr std::string_view kDefaultMetaPattern = "<sex>_<age>_<HHMMSS>";

/// Returns std::nullopt when `file_name` does not match `pattern`. Throws
/// std::invalid_argument for a malformed pattern.
std::optional<PersonMeta> parse_file_name(std::string_view file_name,
                                          std::string_view pattern = kDefaultMetaPattern);

struct HolterFile {
    PersonMeta meta;
    RRSeries series;
    std::vector<std::string> warnings;
};

/// Reads a Holter RR listing: one header line, then whitespace-separated rows
/// of (index, time, interval, annotation). Time is HH:MM:SS[.fff] or plain
/// seconds. `name` is used for metadata and diagnostics.
///
/// Throws InputError for a missing file, an empty data section, or an
/// unparseable row. A name that does not match the metadata pattern only
/// produces a warning.
HolterFile parse_holter(const std::filesystem::path& path,
                        std::string_view meta_pattern = kDefaultMetaPattern);
HolterFile parse_holter(std::istream& in, std::string_view name,
                        std::string_view meta_pattern = kDefaultMetaPattern);

/// Writes the series back in the input format with tab-separated columns and
/// the header passed through verbatim.
void write_holter(std::ostream& out, const RRSeries& series);
std::string format_time_of_day(Millis time);

/// Keeps the records annotated N, in order.
RRSeries filter_normal(const RRSeries& series);

inline constexpr Millis kNocturnalDuration = std::chrono::hours(6);
/// Nocturnal windows shorter than this are suspicious but still analysed.
inline constexpr std::size_t kMinNocturnalBeats = 20000;

struct NocturnalWindow {
    std::size_t first = 0;  // index of the first record in the window
    std::size_t last = 0;   // index of the last record (inclusive)
    double mean_interval = 0.0;
};

/// Among windows that start at a record and span exactly `duration` of clock
/// time, picks the one with the largest mean RR interval; ties go to the
/// earliest start. Throws InputError if the series spans less than `duration`.
NocturnalWindow find_nocturnal_window(const RRSeries& series, Millis duration = kNocturnalDuration);
RRSeries extract_nocturnal(const RRSeries& series, Millis duration = kNocturnalDuration);

/// Perturbation runs shorter than this are replaced, longer ones deleted.
inline constexpr std::size_t kMaxReplacedRun = 4;
inline constexpr std::size_t kMedianWindow = 7;

/// Replaces each run of fewer than five non-N records by the median of the
/// seven most recent normal intervals (record by record, so earlier
/// replacements feed later medians) and deletes longer runs. Replaced records
/// become N with `edited` set. Runs with no preceding normal record are
/// deleted.
RRSeries edit_perturbations(const RRSeries& series);

}  // namespace hrsv
