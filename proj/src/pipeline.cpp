#include "hrsv/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "hrsv/error.hpp"

namespace hrsv {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

/// Runs fn(i) for i in [0, count) on a small worker pool. The first failure
/// in index order is rethrown, so errors do not depend on scheduling.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

bool wildcard_match(std::string_view pattern, std::string_view name) {
    std::size_t p = 0, n = 0, star = std::string_view::npos, mark = 0;
    while (n < name.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
            ++p;
            ++n;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = n;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            n = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    return out + "\"";
}

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back().push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back().push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back().push_back(c);
        }
    }
    return fields;
}

double rounded(double v) { return std::stod(format_value(v)); }

ordered_json config_json(const RunConfig& c) {
    ordered_json j;
    j["inputs"] = c.inputs;
    j["discretizer"] = to_string(c.discretizer);
    j["eta1"] = c.eta1 ? ordered_json(*c.eta1) : ordered_json(nullptr);
    j["eta2"] = c.eta2 ? ordered_json(*c.eta2) : ordered_json(nullptr);
    j["cut"] = c.cut ? ordered_json(c.cut->to_string()) : ordered_json(nullptr);
    j["count_mode"] = to_string(c.count_mode);
    j["denominator"] = c.denominator == Denominator::raw ? "raw" : "with_successor";
    if (c.history == HistoryPolicy::fixed) {
        j["history"] = c.fixed_history;
    } else {
        j["history"] = to_string(c.history);
    }
    j["force_history"] = c.force_history;
    j["mode"] = to_string(c.mode);
    j["format"] = to_string(c.format);
    j["seed"] = c.seed;
    j["meta_pattern"] = c.meta_pattern;
    return j;
}

ordered_json conventions_json() {
    ordered_json j;
    j["quartiles"] = kQuartileConvention;
    j["weights"] = "1/(h+1), normalized over h = 0..H";
    j["nocturnal_window"] = "6 h window starting at a beat with maximal mean RR interval";
    j["perturbations"] = "runs < 5 replaced by median of last 7 normal intervals, longer deleted";
    j["significant_digits"] = 6;
    return j;
}

std::string comment_header(const AnalysisReport& report) {
    std::string out = "# config: " + config_json(report.config).dump() + "\n";
    out += "# conventions: " + conventions_json().dump() + "\n";
    for (const auto& w : report.warnings) out += "# warning: " + w + "\n";
    return out;
}

void check_invariants(const AnalysisReport& report) {
    for (const auto& p : report.persons) {
        const auto& prof = p.profile;
        if (!(p.weighted >= 0.0 && p.weighted <= 0.5)) {
            throw InvariantError("weighted epsilon " + std::to_string(p.weighted) + " for " +
                                 p.meta.id + " outside [0, 1/2]");
        }
        for (const auto& e : prof.epsilons) {
            if (e && !(*e >= 0.0 && *e <= 0.5)) {
                throw InvariantError("epsilon outside [0, 1/2] for " + p.meta.id);
            }
        }
        if (!prof.forced && prof.max_history > max_history(prof.n)) {
            throw InvariantError("history bound exceeded without --force-h for " + p.meta.id);
        }
    }
    for (const auto& g : report.cohort.groups) {
        if (!std::is_sorted(g.summary.q.begin(), g.summary.q.end()) || g.count == 0) {
            throw InvariantError("non-monotone quartiles in cohort group");
        }
    }
}

}  // namespace

std::string_view to_string(Discretizer d) {
    switch (d) {
        case Discretizer::accel: return "accel";
        case Discretizer::rapid: return "rapid";
        case Discretizer::mono: return "mono";
    }
    return "?";
}

std::string_view to_string(HistoryPolicy p) {
    switch (p) {
        case HistoryPolicy::automatic: return "auto";
        case HistoryPolicy::loglog: return "loglog";
        case HistoryPolicy::fixed: return "fixed";
    }
    return "?";
}

std::string_view to_string(ExperimentMode m) {
    switch (m) {
        case ExperimentMode::full: return "full";
        case ExperimentMode::trim: return "trim";
        case ExperimentMode::cut: return "cut";
        case ExperimentMode::med: return "med";
        case ExperimentMode::merged: return "merged";
    }
    return "?";
}

std::string_view to_string(OutputFormat f) {
    switch (f) {
        case OutputFormat::csv: return "csv";
        case OutputFormat::json: return "json";
        case OutputFormat::both: return "both";
    }
    return "?";
}

void RunConfig::validate() const {
    switch (discretizer) {
        case Discretizer::accel:
            if (eta2) throw ConfigError("--eta2 applies only to the rapid discretizer");
            break;
        case Discretizer::rapid:
            if (eta1) throw ConfigError("--eta1 applies only to the accel discretizer");
            if (!eta2) throw ConfigError("the rapid discretizer needs --eta2");
            if (!(*eta2 >= 0.0)) throw ConfigError("--eta2 must be >= 0");
            break;
        case Discretizer::mono:
            if (eta1 || eta2) throw ConfigError("the mono discretizer takes no --eta1/--eta2");
            break;
    }
    if (force_history && history != HistoryPolicy::fixed) {
        throw ConfigError("--force-h needs an explicit --h K");
    }
    if (cut) {
        try {
            cut->validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (meta_pattern.empty()) throw ConfigError("--meta-pattern must not be empty");
}

RunConfig RunConfig::resolved() const {
    RunConfig c = *this;
    if (c.discretizer == Discretizer::accel && !c.eta1) c.eta1 = 0.0;
    if (c.mode == ExperimentMode::cut && !c.cut) c.cut = kDefaultCut;
    return c;
}

std::string RunConfig::mode_tag() const {
    if (mode == ExperimentMode::cut) return "cut" + cut.value_or(kDefaultCut).to_string();
    std::string tag(to_string(mode));
    if (cut) tag += "+cut" + cut->to_string();
    return tag;
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
    std::vector<fs::path> files;
    for (const auto& input : inputs) {
        const fs::path path(input);
        std::vector<fs::path> matched;
        const auto name = path.filename().string();
        if (name.find_first_of("*?") != std::string::npos) {
            const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
            std::error_code ec;
            for (const auto& entry : fs::directory_iterator(dir, ec)) {
                if (entry.is_regular_file() && wildcard_match(name, entry.path().filename().string())) {
                    matched.push_back(entry.path());
                }
            }
        } else if (fs::is_directory(path)) {
            for (const auto& entry : fs::directory_iterator(path)) {
                if (entry.is_regular_file()) matched.push_back(entry.path());
            }
        } else if (fs::exists(path)) {
            matched.push_back(path);
        }
        if (matched.empty()) throw InputError("input '" + input + "' matches no readable file");
        std::sort(matched.begin(), matched.end());
        files.insert(files.end(), matched.begin(), matched.end());
    }
    return files;
}

PersonBits prepare_person(const fs::path& file, const RunConfig& config,
                          std::vector<std::string>& warnings) {
    auto holter = parse_holter(file, config.meta_pattern);
    const std::string who = file.filename().string();
    for (const auto& w : holter.warnings) warnings.push_back(who + ": " + w);

    RRSeries series = std::move(holter.series);
    if (config.mode == ExperimentMode::med) {
        series = extract_nocturnal(series);
        if (series.size() < kMinNocturnalBeats) {
            warnings.push_back(who + ": nocturnal window holds " + std::to_string(series.size()) +
                               " beats, fewer than " + std::to_string(kMinNocturnalBeats));
        }
        series = edit_perturbations(series);
    }
    series = filter_normal(series);

    PersonBits person{holter.meta, {}};
    try {
        switch (config.discretizer) {
            case Discretizer::accel:
                person.bits = discretize_accel(series, config.eta1.value_or(0.0));
                break;
            case Discretizer::rapid:
                person.bits = discretize_rapid(series, config.eta2.value_or(0.0));
                break;
            case Discretizer::mono:
                person.bits = discretize_mono(series);
                break;
        }
    } catch (const std::invalid_argument& e) {
        throw InputError(who + ": too few normal beats to discretize (" + e.what() + ")");
    }
    if (config.cut) person.bits = cut_trends(person.bits, *config.cut);
    return person;
}

HistoryRequest history_request(const RunConfig& config, std::size_t n) {
    switch (config.history) {
        case HistoryPolicy::automatic:
            return {};
        case HistoryPolicy::loglog:
            return {loglog_history(n), false};
        case HistoryPolicy::fixed:
            return {config.fixed_history, config.force_history};
    }
    return {};
}

AnalysisReport run_analysis(const RunConfig& config) {
    return run_analysis(config, expand_inputs(config.inputs));
}

AnalysisReport run_analysis(const RunConfig& config, const std::vector<fs::path>& files) {
    AnalysisReport report;
    report.config = config.resolved();
    report.config.validate();
    const RunConfig& cfg = report.config;

    std::vector<PersonBits> persons(files.size());
    std::vector<std::vector<std::string>> file_warnings(files.size());
    parallel_for(files.size(), cfg.threads, [&](std::size_t i) {
        persons[i] = prepare_person(files[i], cfg, file_warnings[i]);
    });
    for (auto& w : file_warnings) report.warnings.insert(report.warnings.end(), w.begin(), w.end());

    if (cfg.mode == ExperimentMode::trim) {
        persons = trim_to_min(std::move(persons));
    } else if (cfg.mode == ExperimentMode::merged) {
        auto merged = merge_persons(persons);
        report.segments = std::move(merged.segments);
        PersonBits all;
        all.meta.id = "merged";
        all.bits = std::move(merged.bits);
        persons.clear();
        persons.push_back(std::move(all));
    }

    const std::string tag = cfg.mode_tag();
    std::vector<std::optional<PersonResult>> results(persons.size());
    std::vector<std::vector<std::string>> est_warnings(persons.size());
    parallel_for(persons.size(), cfg.threads, [&](std::size_t i) {
        const auto& person = persons[i];
        auto& warn = est_warnings[i];
        const auto n = person.bits.size();
        if (n < 2) {
            warn.push_back(person.meta.id + ": only " + std::to_string(n) +
                           " bits after preprocessing, skipped");
            return;
        }
        const auto request = history_request(cfg, n);
        PersonResult r;
        r.meta = person.meta;
        r.n_bits = n;
        r.mode = tag;
        r.profile = epsilon_profile(person.bits, request, cfg.count_mode, cfg.denominator);
        if (r.profile.clamped) {
            warn.push_back(person.meta.id + ": requested history " +
                           std::to_string(*request.max_history) +
                           " exceeds the bound floor(log2 n) - 1 = " +
                           std::to_string(max_history(n)) + " for n = " + std::to_string(n) +
                           "; clamped to " + std::to_string(r.profile.max_history) +
                           " (--force-h keeps it)");
        }
        if (!r.profile.weighted) {
            warn.push_back(person.meta.id + ": undefined epsilon entries, no weighted value");
            return;
        }
        r.weighted = *r.profile.weighted;
        results[i] = std::move(r);
    });
    for (std::size_t i = 0; i < persons.size(); ++i) {
        report.warnings.insert(report.warnings.end(), est_warnings[i].begin(),
                               est_warnings[i].end());
        if (results[i]) report.persons.push_back(std::move(*results[i]));
    }

    if (cfg.mode != ExperimentMode::merged) report.cohort = bucket(report.persons);
    check_invariants(report);
    return report;
}

MergedSequence merge_inputs(const RunConfig& config, std::vector<std::string>& warnings) {
    RunConfig cfg = config.resolved();
    cfg.validate();
    const auto files = expand_inputs(cfg.inputs);
    std::vector<PersonBits> persons(files.size());
    std::vector<std::vector<std::string>> file_warnings(files.size());
    parallel_for(files.size(), cfg.threads, [&](std::size_t i) {
        persons[i] = prepare_person(files[i], cfg, file_warnings[i]);
    });
    for (auto& w : file_warnings) warnings.insert(warnings.end(), w.begin(), w.end());
    return merge_persons(persons);
}

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void write_persons_csv(std::ostream& out, const AnalysisReport& report) {
    out << comment_header(report);
    for (const auto& s : report.segments) {
        out << "# segment: " << s.id << " offset=" << s.offset << " length=" << s.length << "\n";
    }
    unsigned widest = 0;
    for (const auto& p : report.persons) widest = std::max(widest, p.profile.max_history);
    out << "person_id,sex,age,mode,n_bits,H";
    if (!report.persons.empty()) {
        for (unsigned h = 0; h <= widest; ++h) out << ",eps_" << h;
    }
    out << ",eps_weighted\n";
    for (const auto& p : report.persons) {
        out << csv_field(p.meta.id) << ',' << (p.meta.sex ? to_string(*p.meta.sex) : "") << ','
            << (p.meta.age ? std::to_string(*p.meta.age) : "") << ',' << csv_field(p.mode) << ','
            << p.n_bits << ',' << p.profile.max_history;
        for (unsigned h = 0; h <= widest; ++h) {
            out << ',';
            if (h < p.profile.epsilons.size() && p.profile.epsilons[h]) {
                out << format_value(*p.profile.epsilons[h]);
            }
        }
        out << ',' << format_value(p.weighted) << '\n';
    }
}

void write_cohort_csv(std::ostream& out, const CohortReport& cohort, std::string_view preamble) {
    out << preamble;
    for (const auto& id : cohort.unknown_ids) out << "# unknown metadata: " << id << "\n";
    out << "sex,decade,count,q0,q1,q2,q3,q4,mean\n";
    for (const auto& g : cohort.groups) {
        out << to_string(g.sex) << ',' << g.decade << ',' << g.count;
        for (double q : g.summary.q) out << ',' << format_value(q);
        out << ',' << format_value(g.summary.mean) << '\n';
    }
}

void write_cohort_csv(std::ostream& out, const AnalysisReport& report) {
    write_cohort_csv(out, report.cohort, comment_header(report));
}

void write_json(std::ostream& out, const AnalysisReport& report) {
    ordered_json j;
    j["config"] = config_json(report.config);
    j["conventions"] = conventions_json();
    j["warnings"] = report.warnings;
    ordered_json persons = ordered_json::array();
    for (const auto& p : report.persons) {
        ordered_json row;
        row["person_id"] = p.meta.id;
        row["sex"] = p.meta.sex ? ordered_json(to_string(*p.meta.sex)) : ordered_json(nullptr);
        row["age"] = p.meta.age ? ordered_json(*p.meta.age) : ordered_json(nullptr);
        row["mode"] = p.mode;
        row["n_bits"] = p.n_bits;
        row["H"] = p.profile.max_history;
        row["clamped"] = p.profile.clamped;
        row["forced"] = p.profile.forced;
        ordered_json eps = ordered_json::array();
        for (const auto& e : p.profile.epsilons) {
            eps.push_back(e ? ordered_json(rounded(*e)) : ordered_json(nullptr));
        }
        row["epsilons"] = std::move(eps);
        row["eps_weighted"] = rounded(p.weighted);
        persons.push_back(std::move(row));
    }
    j["persons"] = std::move(persons);
    ordered_json groups = ordered_json::array();
    for (const auto& g : report.cohort.groups) {
        ordered_json row;
        row["sex"] = to_string(g.sex);
        row["decade"] = g.decade;
        row["count"] = g.count;
        ordered_json q = ordered_json::array();
        for (double v : g.summary.q) q.push_back(rounded(v));
        row["q"] = std::move(q);
        row["mean"] = rounded(g.summary.mean);
        groups.push_back(std::move(row));
    }
    j["cohort"] = std::move(groups);
    j["unknown_metadata"] = report.cohort.unknown_ids;
    ordered_json segments = ordered_json::array();
    for (const auto& s : report.segments) {
        segments.push_back({{"id", s.id}, {"offset", s.offset}, {"length", s.length}});
    }
    j["segments"] = std::move(segments);
    out << j.dump(2) << '\n';
}

std::vector<fs::path> write_reports(const AnalysisReport& report, const fs::path& dir) {
    fs::create_directories(dir);
    std::vector<fs::path> written;
    const auto emit = [&](const fs::path& path, auto&& writer) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw InputError("cannot write '" + path.string() + "'");
        writer(out);
        written.push_back(path);
    };
    const auto format = report.config.format;
    if (format == OutputFormat::csv || format == OutputFormat::both) {
        emit(dir / "persons.csv", [&](std::ostream& o) { write_persons_csv(o, report); });
        emit(dir / "cohort.csv", [&](std::ostream& o) { write_cohort_csv(o, report); });
    }
    if (format == OutputFormat::json || format == OutputFormat::both) {
        emit(dir / "report.json", [&](std::ostream& o) { write_json(o, report); });
    }
    return written;
}

std::vector<PersonResult> read_persons_csv(std::istream& in) {
    std::vector<PersonResult> out;
    std::string line;
    std::vector<std::string> header;
    std::size_t line_no = 0;
    const auto column = [&header](std::string_view name) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw InputError("persons CSV lacks column '" + std::string(name) + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    std::size_t id_col = 0, sex_col = 0, age_col = 0, mode_col = 0, eps_col = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        auto fields = split_csv(line);
        if (header.empty()) {
            header = std::move(fields);
            id_col = column("person_id");
            sex_col = column("sex");
            age_col = column("age");
            mode_col = column("mode");
            eps_col = column("eps_weighted");
            continue;
        }
        if (fields.size() != header.size()) {
            throw InputError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        PersonResult r;
        r.meta.id = fields[id_col];
        if (fields[sex_col] == "F") r.meta.sex = Sex::female;
        else if (fields[sex_col] == "M") r.meta.sex = Sex::male;
        try {
            if (!fields[age_col].empty()) r.meta.age = std::stoi(fields[age_col]);
            r.weighted = std::stod(fields[eps_col]);
        } catch (const std::exception&) {
            throw InputError("unparseable age or eps_weighted", line_no);
        }
        r.mode = fields[mode_col];
        out.push_back(std::move(r));
    }
    if (header.empty()) throw InputError("persons CSV has no header row");
    return out;
}

}  // namespace hrsv
