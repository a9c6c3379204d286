#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hrsv/cohort.hpp"
#include "hrsv/estimator.hpp"
#include "hrsv/ingest.hpp"
#include "hrsv/transform.hpp"

namespace hrsv {

enum class Discretizer { accel, rapid, mono };
enum class HistoryPolicy { automatic, loglog, fixed };
enum class ExperimentMode { full, trim, cut, med, merged };
enum class OutputFormat { csv, json, both };

std::string_view to_string(Discretizer d);
std::string_view to_string(HistoryPolicy p);
std::string_view to_string(ExperimentMode m);
std::string_view to_string(OutputFormat f);

/// Inconsistent or invalid run configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr TrendCutPattern kDefaultCut{3, 3};

struct RunConfig {
    std::vector<std::string> inputs;  // files, directories or simple globs
    Discretizer discretizer = Discretizer::accel;
    std::optional<double> eta1;
    std::optional<double> eta2;
    std::optional<TrendCutPattern> cut;
    CountMode count_mode = CountMode::linear;
    Denominator denominator = Denominator::raw;
    HistoryPolicy history = HistoryPolicy::automatic;
    unsigned fixed_history = 0;
    bool force_history = false;
    ExperimentMode mode = ExperimentMode::full;
    OutputFormat format = OutputFormat::csv;
    std::uint64_t seed = 0;
    std::string meta_pattern = std::string(kDefaultMetaPattern);
    unsigned threads = 0;  // 0: hardware concurrency

    /// Throws ConfigError on contradictions, e.g. eta flags with the mono
    /// discretizer, or --force-h without an explicit history bound.
    void validate() const;

    /// Fills implied values: eta1 = 0 for accel, cut (3,3) for the cut mode.
    [[nodiscard]] RunConfig resolved() const;

    /// Config tag recorded per person, e.g. "cut(3,3)" or "med+cut(4,4)".
    [[nodiscard]] std::string mode_tag() const;
};

/// Expands directories (all regular files, sorted) and globs with * and ? in
/// the file name component. Throws InputError when an input matches nothing.
std::vector<std::filesystem::path> expand_inputs(const std::vector<std::string>& inputs);

/// Reads, filters and discretizes one recording per the config (without
/// trimming or merging). Warnings are appended to `warnings`.
PersonBits prepare_person(const std::filesystem::path& file, const RunConfig& config,
                          std::vector<std::string>& warnings);

/// History request implied by the config for a sequence of n bits.
HistoryRequest history_request(const RunConfig& config, std::size_t n);

struct AnalysisReport {
    RunConfig config;  // resolved
    std::vector<PersonResult> persons;
    CohortReport cohort;
    std::vector<MergedSegment> segments;  // merged mode only
    std::vector<std::string> warnings;
};

/// parse -> filter/edit -> discretize -> optional cut -> trim/merge ->
/// epsilon profile -> weighted epsilon -> cohort statistics. Files are
/// processed concurrently; results keep input order.
AnalysisReport run_analysis(const RunConfig& config);
AnalysisReport run_analysis(const RunConfig& config,
                            const std::vector<std::filesystem::path>& files);

/// Merged bit sequence of all inputs (per-person discretization first).
MergedSequence merge_inputs(const RunConfig& config, std::vector<std::string>& warnings);

/// Values are written with six significant digits.
std::string format_value(double v);

void write_persons_csv(std::ostream& out, const AnalysisReport& report);
void write_cohort_csv(std::ostream& out, const AnalysisReport& report);
void write_json(std::ostream& out, const AnalysisReport& report);

/// Writes persons.csv and cohort.csv and/or report.json into `dir` per the
/// configured format and returns the written paths.
std::vector<std::filesystem::path> write_reports(const AnalysisReport& report,
                                                 const std::filesystem::path& dir);

/// Reads person_id, sex, age, mode and eps_weighted back from a persons CSV.
std::vector<PersonResult> read_persons_csv(std::istream& in);
void write_cohort_csv(std::ostream& out, const CohortReport& cohort,
                      std::string_view preamble = {});

}  // namespace hrsv
