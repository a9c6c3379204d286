// hrsv: estimate how far a heart-rate bit stream is from an unbiased
// Santha-Vazirani source.
//
// Exit codes: 0 ok, 1 usage, 2 input error, 3 internal invariant violation.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "hrsv/bitseq.hpp"
#include "hrsv/cohort.hpp"
#include "hrsv/error.hpp"
#include "hrsv/ingest.hpp"
#include "hrsv/pipeline.hpp"
#include "hrsv/synth.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kInput = 2, kInternal = 3 };

struct PipelineFlags {
    std::string discretizer = "accel";
    std::optional<double> eta1;
    std::optional<double> eta2;
    std::string cut;
    bool cyclic = false;
    bool exclude_tail = false;
    std::string history = "auto";
    bool force_history = false;
    std::string mode = "full";
    std::string meta_pattern{hrsv::kDefaultMetaPattern};
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

void add_pipeline_flags(CLI::App& cmd, PipelineFlags& f) {
    cmd.add_option("--discretizer", f.discretizer, "accel, rapid or mono")
        ->check(CLI::IsMember({"accel", "rapid", "mono"}))
        ->capture_default_str();
    cmd.add_option("--eta1", f.eta1, "accel offset in seconds (default 0)");
    cmd.add_option("--eta2", f.eta2, "rapid-change threshold in seconds");
    cmd.add_option("--cut", f.cut, "cut out trends with pattern I,J (presets 3,3 .. 6,6)");
    cmd.add_flag("--cyclic", f.cyclic, "count patterns cyclically");
    cmd.add_flag("--exclude-tail", f.exclude_tail,
                 "drop the final, successor-less occurrence of a history from denominators");
    cmd.add_option("--h", f.history, "history bound: auto, loglog or an integer K")
        ->capture_default_str();
    cmd.add_flag("--force-h", f.force_history, "keep an explicit --h above floor(log2 n) - 1");
    cmd.add_option("--mode", f.mode, "full, trim, cut, med or merged")
        ->check(CLI::IsMember({"full", "trim", "cut", "med", "merged"}))
        ->capture_default_str();
    cmd.add_option("--meta-pattern", f.meta_pattern, "file-name metadata template")
        ->capture_default_str();
    cmd.add_option("--seed", f.seed, "recorded in the report for reproducibility");
    cmd.add_option("--threads", f.threads, "worker threads (0: all cores)");
}

hrsv::TrendCutPattern parse_cut(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw hrsv::ConfigError("--cut expects I,J, got '" + text + "'");
    hrsv::TrendCutPattern p;
    const auto parse = [&](std::string_view part, std::size_t& out) {
        const auto r = std::from_chars(part.data(), part.data() + part.size(), out);
        if (r.ec != std::errc{} || r.ptr != part.data() + part.size()) {
            throw hrsv::ConfigError("--cut expects I,J, got '" + text + "'");
        }
    };
    parse(std::string_view(text).substr(0, comma), p.accel);
    parse(std::string_view(text).substr(comma + 1), p.decel);
    return p;
}

hrsv::RunConfig make_config(const PipelineFlags& f, std::vector<std::string> inputs) {
    static const std::map<std::string, hrsv::Discretizer> discretizers{
        {"accel", hrsv::Discretizer::accel},
        {"rapid", hrsv::Discretizer::rapid},
        {"mono", hrsv::Discretizer::mono}};
    static const std::map<std::string, hrsv::ExperimentMode> modes{
        {"full", hrsv::ExperimentMode::full},
        {"trim", hrsv::ExperimentMode::trim},
        {"cut", hrsv::ExperimentMode::cut},
        {"med", hrsv::ExperimentMode::med},
        {"merged", hrsv::ExperimentMode::merged}};

    hrsv::RunConfig c;
    c.inputs = std::move(inputs);
    c.discretizer = discretizers.at(f.discretizer);
    c.eta1 = f.eta1;
    c.eta2 = f.eta2;
    if (!f.cut.empty()) c.cut = parse_cut(f.cut);
    c.count_mode = f.cyclic ? hrsv::CountMode::cyclic : hrsv::CountMode::linear;
    c.denominator = f.exclude_tail ? hrsv::Denominator::with_successor : hrsv::Denominator::raw;
    if (f.history == "auto") {
        c.history = hrsv::HistoryPolicy::automatic;
    } else if (f.history == "loglog") {
        c.history = hrsv::HistoryPolicy::loglog;
    } else {
        unsigned k = 0;
        const auto r = std::from_chars(f.history.data(), f.history.data() + f.history.size(), k);
        if (r.ec != std::errc{} || r.ptr != f.history.data() + f.history.size()) {
            throw hrsv::ConfigError("--h expects auto, loglog or an integer, got '" + f.history +
                                    "'");
        }
        c.history = hrsv::HistoryPolicy::fixed;
        c.fixed_history = k;
    }
    c.force_history = f.force_history;
    c.mode = modes.at(f.mode);
    c.meta_pattern = f.meta_pattern;
    c.seed = f.seed;
    c.threads = f.threads;
    c.validate();
    return c;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

std::optional<hrsv::Millis> parse_hhmmss(const std::string& text) {
    if (text.size() != 6) return std::nullopt;
    const auto meta = hrsv::parse_file_name(text, "<HHMMSS>");
    if (!meta) return std::nullopt;
    return meta->start_time;
}

int run(int argc, char** argv) {
    CLI::App app{"Santha-Vazirani epsilon estimation for RR-interval recordings"};
    app.require_subcommand(1);
    // -h would collide with --h; subcommands inherit this setting
    app.set_help_flag("--help", "Print this help message and exit");

    // analyze
    PipelineFlags analyze_flags;
    std::vector<std::string> analyze_inputs;
    std::string analyze_out = ".";
    std::string format = "csv";
    auto* analyze = app.add_subcommand("analyze", "estimate epsilons and write reports");
    analyze->add_option("inputs", analyze_inputs, "Holter files, directories or globs")->required();
    add_pipeline_flags(*analyze, analyze_flags);
    analyze->add_option("--format", format, "csv, json or both")
        ->check(CLI::IsMember({"csv", "json", "both"}))
        ->capture_default_str();
    analyze->add_option("-o,--output", analyze_out, "report directory")->capture_default_str();

    // synth
    std::string kind = "rr";
    hrsv::SyntheticRRSpec spec;
    double bias = 0.0;
    std::string start = "000000";
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "write a synthetic source");
    synth->add_option("--kind", kind, "rr (Holter listing) or coin (bit string)")
        ->check(CLI::IsMember({"rr", "coin"}))
        ->capture_default_str();
    synth->add_option("-n", spec.n, "beats (rr) or bits (coin)")->capture_default_str();
    synth->add_option("--seed", spec.seed, "generator seed")->capture_default_str();
    synth->add_option("--eps", bias, "coin bias: P(0) = 1/2 + eps")->capture_default_str();
    synth->add_option("--baseline", spec.baseline, "mean RR interval, s")->capture_default_str();
    synth->add_option("--amplitude", spec.amplitude, "sine amplitude, s")->capture_default_str();
    synth->add_option("--period", spec.period, "sine period, beats")->capture_default_str();
    synth->add_option("--noise", spec.noise, "uniform noise half-width, s")->capture_default_str();
    synth->add_option("--start", start, "start time HHMMSS")->capture_default_str();
    synth->add_option("-o,--output", synth_out, "output file (default stdout)");

    // debruijn
    unsigned order = 0;
    auto* debruijn = app.add_subcommand("debruijn", "print the least binary De Bruijn sequence");
    debruijn->add_option("k", order, "order")->required();

    // stats
    std::string stats_in;
    std::string stats_out;
    auto* stats = app.add_subcommand("stats", "cohort statistics from a persons CSV");
    stats->add_option("persons", stats_in, "persons.csv written by analyze")->required();
    stats->add_option("-o,--output", stats_out, "output file (default stdout)");

    // merge
    PipelineFlags merge_flags;
    std::vector<std::string> merge_inputs;
    std::string merge_out;
    std::string segments_out;
    auto* merge = app.add_subcommand("merge", "concatenate per-person bit sequences");
    merge->add_option("inputs", merge_inputs, "Holter files, directories or globs")->required();
    add_pipeline_flags(*merge, merge_flags);
    merge->add_option("-o,--output", merge_out, "bit string file (default stdout)");
    merge->add_option("--segments", segments_out, "write person boundaries to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    if (analyze->parsed()) {
        auto config = make_config(analyze_flags, analyze_inputs);
        config.format = format == "json"   ? hrsv::OutputFormat::json
                        : format == "both" ? hrsv::OutputFormat::both
                                           : hrsv::OutputFormat::csv;
        const auto report = hrsv::run_analysis(config);
        print_warnings(report.warnings);
        for (const auto& path : hrsv::write_reports(report, analyze_out)) {
            std::cout << path.string() << '\n';
        }
        return kOk;
    }

    if (synth->parsed()) {
        std::ofstream file;
        if (!synth_out.empty()) {
            file.open(synth_out, std::ios::binary);
            if (!file) throw hrsv::InputError("cannot write '" + synth_out + "'");
        }
        std::ostream& out = synth_out.empty() ? std::cout : file;
        if (kind == "coin") {
            out << hrsv::biased_coin(spec.n, bias, spec.seed).to_string() << '\n';
        } else {
            const auto t = parse_hhmmss(start);
            if (!t) throw hrsv::ConfigError("--start expects HHMMSS, got '" + start + "'");
            spec.start_time = *t;
            hrsv::write_holter(out, hrsv::synthetic_rr(spec));
        }
        return kOk;
    }

    if (debruijn->parsed()) {
        std::cout << hrsv::debruijn(order).to_string() << '\n';
        return kOk;
    }

    if (stats->parsed()) {
        std::ifstream in(stats_in);
        if (!in) throw hrsv::InputError("cannot open '" + stats_in + "'");
        const auto persons = hrsv::read_persons_csv(in);
        const auto cohort = hrsv::bucket(persons);
        const std::string preamble = "# source: " + stats_in + "\n# quartiles: " +
                                     std::string(hrsv::kQuartileConvention) + "\n";
        if (stats_out.empty()) {
            hrsv::write_cohort_csv(std::cout, cohort, preamble);
        } else {
            std::ofstream out(stats_out, std::ios::binary);
            if (!out) throw hrsv::InputError("cannot write '" + stats_out + "'");
            hrsv::write_cohort_csv(out, cohort, preamble);
        }
        return kOk;
    }

    if (merge->parsed()) {
        const auto config = make_config(merge_flags, merge_inputs);
        std::vector<std::string> warnings;
        const auto merged = hrsv::merge_inputs(config, warnings);
        print_warnings(warnings);
        if (merge_out.empty()) {
            std::cout << merged.bits.to_string() << '\n';
        } else {
            std::ofstream out(merge_out, std::ios::binary);
            if (!out) throw hrsv::InputError("cannot write '" + merge_out + "'");
            out << merged.bits.to_string() << '\n';
        }
        if (!segments_out.empty()) {
            std::ofstream out(segments_out, std::ios::binary);
            if (!out) throw hrsv::InputError("cannot write '" + segments_out + "'");
            out << "id,offset,length\n";
            for (const auto& s : merged.segments) {
                out << s.id << ',' << s.offset << ',' << s.length << '\n';
            }
        }
        return kOk;
    }
    return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const hrsv::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch (const hrsv::InvariantError& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::length_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}
