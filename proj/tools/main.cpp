// ipikit command line: synthesize interval data, score it as a randomness
// source, run the martingale extractor and check its output.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ipikit/dependency.hpp"
#include "ipikit/error.hpp"
#include "ipikit/extractor.hpp"
#include "ipikit/ipi.hpp"
#include "ipikit/reports.hpp"
#include "ipikit/rng.hpp"
#include "ipikit/secrecy.hpp"
#include "ipikit/sv.hpp"
#include "ipikit/testkit.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Flag combinations the parser cannot express; distinct from analysis
// failures so the exit code stays a usage error.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

struct SourceOpts {
    std::vector<std::string> inputs; // subject files
    std::string synth_kind;
    std::size_t count = 100000; // intervals per synthetic subject
    std::size_t subjects = 1;
    double mean = 150.0;
    double ar = 0.9;
    double noise_sd = 10.0;
    std::uint64_t seed = 0;
};

void add_source_flags(CLI::App* cmd, SourceOpts& o, bool synth_only = false) {
    if (!synth_only)
        cmd->add_option("--input", o.inputs,
                        "subject interval file (repeatable)");
    auto* synth = cmd->add_option("--synth", o.synth_kind,
                                  "synthesize input: iid-uniform-bits, "
                                  "iid-histogram or ar1");
    synth->check(CLI::IsMember({"iid-uniform-bits", "iid-histogram", "ar1"}));
    if (synth_only) synth->required();
    cmd->add_option("--count", o.count, "intervals per synthetic subject")
        ->capture_default_str();
    cmd->add_option("--subjects", o.subjects, "number of synthetic subjects")
        ->capture_default_str();
    cmd->add_option("--mean", o.mean, "synthetic mean interval (centiseconds)")
        ->capture_default_str();
    cmd->add_option("--ar", o.ar, "ar1 feedback coefficient")
        ->check(CLI::Range(0.0, 0.999999))
        ->capture_default_str();
    cmd->add_option("--noise-sd", o.noise_sd,
                    "synthetic noise s.d. (centiseconds)")
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "base seed for all randomized steps")
        ->capture_default_str();
}

ipikit::SynthModel model_for(const SourceOpts& o, std::size_t subject_index) {
    ipikit::SynthModel m;
    const auto kind = ipikit::synth_kind_from_string(o.synth_kind);
    if (!kind) throw ipikit::Error("config: unknown synth kind " + o.synth_kind);
    m.kind = *kind;
    m.mean = o.mean;
    m.ar_coefficient = m.kind == ipikit::SynthKind::Ar1 ? o.ar : 0.0;
    m.noise_sd = o.noise_sd;
    m.seed = ipikit::derive_seed(o.seed, subject_index);
    return m;
}

std::string synth_subject_id(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "synth-%03zu", i);
    return buf;
}

void check_source(const SourceOpts& o) {
    if (!o.inputs.empty() && !o.synth_kind.empty())
        throw UsageError("--input and --synth are exclusive");
    if (o.inputs.empty() && o.synth_kind.empty())
        throw UsageError("need --input or --synth");
}

// Materializes the selected subjects, from files or the synthesizer.
std::vector<ipikit::IpiSeries> load_subjects(const SourceOpts& o) {
    check_source(o);
    std::vector<ipikit::IpiSeries> out;
    if (!o.inputs.empty()) {
        for (const auto& path : o.inputs)
            out.push_back(ipikit::parse_ipi_file(ipikit::read_file(path)));
        return out;
    }
    for (std::size_t s = 0; s < o.subjects; ++s)
        out.push_back(ipikit::synth_generate(model_for(o, s), o.count,
                                             synth_subject_id(s)));
    return out;
}

std::string describe_source(const SourceOpts& o) {
    std::string d;
    if (!o.inputs.empty()) {
        d = "inputs:";
        for (const auto& p : o.inputs) d += ' ' + fs::path(p).filename().string();
    } else {
        d = "synth: " + o.synth_kind + " count=" + std::to_string(o.count) +
            " subjects=" + std::to_string(o.subjects) +
            " seed=" + std::to_string(o.seed);
        if (o.synth_kind != "iid-uniform-bits") {
            d += " mean=" + ipikit::format_double(o.mean) +
                 " noise_sd=" + ipikit::format_double(o.noise_sd);
            if (o.synth_kind == "ar1")
                d += " ar=" + ipikit::format_double(o.ar);
        }
    }
    return d;
}

void ensure_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ipikit::IoError("cannot create " + dir.string());
}

void write_json(const fs::path& path, const json& j) {
    ipikit::write_file_atomic(path, j.dump(2) + "\n");
}

ipikit::BitStream load_bits(const std::string& path,
                            const std::string& format,
                            std::size_t bit_length) {
    const std::string raw = ipikit::read_file(path);
    if (format == "ascii") return ipikit::import_ascii(raw);
    return ipikit::import_packed(raw,
                                 bit_length == 0 ? raw.size() * 8 : bit_length);
}

// ---- subcommand bodies ----

int cmd_synth(const SourceOpts& src, const fs::path& out_dir) {
    ensure_out_dir(out_dir);
    for (std::size_t s = 0; s < src.subjects; ++s) {
        const auto series = ipikit::synth_generate(model_for(src, s),
                                                   src.count,
                                                   synth_subject_id(s));
        ipikit::write_file_atomic(out_dir / (series.subject_id + ".txt"),
                                  ipikit::serialize_ipi_file(series));
    }
    std::cout << "wrote " << src.subjects << " subject file(s) to "
              << out_dir.string() << "\n";
    return 0;
}

int cmd_analyze(const SourceOpts& src, const std::vector<int>& ks, int n_max,
                const fs::path& out_dir, const std::string& format) {
    const auto subjects = load_subjects(src);
    ensure_out_dir(out_dir);

    std::vector<std::string> ids;
    for (const auto& s : subjects) ids.push_back(s.subject_id);

    json entropy_json = {{"command", "analyze"},
                         {"source", describe_source(src)},
                         {"subjects", ids},
                         {"n_max", n_max},
                         {"per_k", json::array()}};
    json sv_json = entropy_json;

    for (int k : ks) {
        // Pool subjects by summing their per-n circulation counts; the
        // subjects' streams are never concatenated, so no artificial
        // cross-subject n-grams appear.
        std::vector<ipikit::NgramDistribution> pooled;
        for (const auto& subject : subjects) {
            const auto bits =
                ipikit::concat_series(ipikit::normalize_series(subject), k);
            for (int n = 1; n <= n_max; ++n) {
                auto d = ipikit::circular_ngram_distribution(bits, n);
                if (pooled.size() < static_cast<std::size_t>(n)) {
                    pooled.push_back(std::move(d));
                } else {
                    auto& agg = pooled[static_cast<std::size_t>(n) - 1];
                    for (std::size_t i = 0; i < d.counts.size(); ++i)
                        agg.counts[i] += d.counts[i];
                    agg.total += d.total;
                }
            }
        }
        std::vector<ipikit::EntropyReport> entropy;
        std::vector<ipikit::SvDeltaReport> sv;
        for (const auto& d : pooled) {
            entropy.push_back(ipikit::entropy_report(d));
            sv.push_back(ipikit::sv_delta(d));
        }
        entropy_json["per_k"].push_back({{"k", k}, {"reports", entropy}});
        sv_json["per_k"].push_back({{"k", k}, {"reports", sv}});

        if (format != "json") {
            const std::vector<std::string> comments = {
                "ipikit analyze k=" + std::to_string(k) +
                    " n_max=" + std::to_string(n_max),
                describe_source(src)};
            ipikit::write_file_atomic(
                out_dir / ("entropy_k" + std::to_string(k) + ".csv"),
                ipikit::entropy_csv(entropy, comments));
            ipikit::write_file_atomic(
                out_dir / ("sv_k" + std::to_string(k) + ".csv"),
                ipikit::sv_csv(sv, comments));
        }
    }
    if (format != "csv") {
        write_json(out_dir / "entropy.json", entropy_json);
        write_json(out_dir / "sv.json", sv_json);
    }
    std::cout << "analyzed " << subjects.size() << " subject(s) at "
              << ks.size() << " bit depth(s) into " << out_dir.string() << "\n";
    return 0;
}

int cmd_extract(const SourceOpts& src, const ipikit::ExtractorConfig& cfg,
                const fs::path& out_dir) {
    ipikit::validate(cfg);
    ensure_out_dir(out_dir);

    ipikit::BitStream output;
    json subjects = json::array();
    std::uint64_t total_ipis = 0, total_triads = 0;

    check_source(src);

    // Each subject gets a fresh walk; outputs are concatenated in subject
    // order. Synthetic subjects stream straight into the extractor so the
    // interval series is never materialized.
    if (!src.inputs.empty()) {
        const auto series_list = load_subjects(src);
        for (const auto& subject : series_list) {
            const auto norm = ipikit::normalize_series(subject);
            const auto res = ipikit::extract(norm, cfg);
            output.append(res.output);
            total_ipis += res.input_ipis;
            total_triads += res.input_triads;
            subjects.push_back({{"id", subject.subject_id},
                                {"ipis", res.input_ipis},
                                {"triads", res.input_triads},
                                {"bits", res.output.size()}});
        }
    } else {
        for (std::size_t s = 0; s < src.subjects; ++s) {
            ipikit::SynthStream stream(model_for(src, s));
            ipikit::StreamExtractor ex(cfg);
            for (std::size_t i = 0; i < src.count; ++i) {
                const auto norm = ipikit::normalize(stream.next());
                ex.feed_word(ipikit::k_lsb(norm, cfg.k), cfg.k);
            }
            output.append(ex.output());
            total_ipis += src.count;
            total_triads += ex.state().triads_consumed;
            subjects.push_back({{"id", synth_subject_id(s)},
                                {"ipis", src.count},
                                {"triads", ex.state().triads_consumed},
                                {"bits", ex.output().size()}});
        }
    }

    ipikit::write_file_atomic(out_dir / "output.bin",
                              ipikit::export_raw(output,
                                                 ipikit::ExportFormat::Packed));
    ipikit::write_file_atomic(out_dir / "output.txt",
                              ipikit::export_raw(output,
                                                 ipikit::ExportFormat::Ascii));
    const json yield = {
        {"command", "extract"},
        {"source", describe_source(src)},
        {"k", cfg.k},
        {"t_high", cfg.t_high},
        {"t_low", cfg.t_low},
        {"input_ipis", total_ipis},
        {"input_triads", total_triads},
        {"output_bits", output.size()},
        {"yield_rate", total_ipis == 0
                           ? 0.0
                           : static_cast<double>(output.size()) /
                                 static_cast<double>(total_ipis)},
        {"subjects", subjects}};
    write_json(out_dir / "yield.json", yield);
    std::cout << "extracted " << output.size() << " bits from " << total_ipis
              << " intervals into " << out_dir.string() << "\n";
    return 0;
}

int cmd_battery(const std::string& input, const std::string& bits_format,
                std::size_t bit_length, std::size_t seq_len,
                std::vector<double> alphas, const fs::path& out_dir,
                const std::string& format) {
    const auto bits = load_bits(input, bits_format, bit_length);
    std::vector<ipikit::BatteryReport> reports;
    for (double a : alphas)
        reports.push_back(ipikit::run_battery(bits, seq_len, a));
    ensure_out_dir(out_dir);

    if (format != "csv") {
        json j = {{"command", "battery"},
                  {"input", fs::path(input).filename().string()},
                  {"bits", bits.size()},
                  {"reports", reports}};
        write_json(out_dir / "battery.json", j);
    }
    if (format != "json") {
        const std::vector<std::string> comments = {
            "ipikit battery seq_len=" + std::to_string(seq_len),
            "input: " + fs::path(input).filename().string() + " (" +
                std::to_string(bits.size()) + " bits)"};
        ipikit::write_file_atomic(out_dir / "battery.csv",
                                  ipikit::battery_csv(reports, comments));
    }
    bool all = true;
    for (const auto& r : reports) all = all && r.all_pass;
    std::cout << "battery on " << bits.size() << " bits, " << reports.size()
              << " significance level(s): " << (all ? "pass" : "FAIL") << "\n";
    return 0;
}

int cmd_scatter(const std::string& input, const std::string& bits_format,
                std::size_t bit_length, int word_size,
                const fs::path& out_dir) {
    const auto bits = load_bits(input, bits_format, bit_length);
    const auto points = ipikit::scatter_points(bits, word_size);
    ensure_out_dir(out_dir);
    const std::vector<std::string> comments = {
        "ipikit scatter word_size=" + std::to_string(word_size),
        "input: " + fs::path(input).filename().string() + " (" +
            std::to_string(bits.size()) + " bits)"};
    ipikit::write_file_atomic(out_dir / "scatter.csv",
                              ipikit::scatter_csv(points, comments));
    ipikit::write_file_atomic(out_dir / "scatter.svg",
                              ipikit::scatter_svg(points));
    std::cout << "plotted " << points.points.size() << " points into "
              << out_dir.string() << "\n";
    return 0;
}

int cmd_pairdep(const SourceOpts& src, std::size_t trials,
                std::size_t min_length, int n, const fs::path& out_dir,
                const std::string& format) {
    const auto subjects = load_subjects(src);
    const auto summary =
        ipikit::pair_sampling(subjects, trials, min_length, n, src.seed);
    ensure_out_dir(out_dir);

    if (format != "csv") {
        json j = summary;
        j["command"] = "pairdep";
        j["source"] = describe_source(src);
        j["min_length"] = min_length;
        j["seed"] = src.seed;
        write_json(out_dir / "pairdep.json", j);
    }
    if (format != "json") {
        const std::vector<std::string> comments = {
            "ipikit pairdep trials=" + std::to_string(trials) +
                " n=" + std::to_string(n) +
                " min_length=" + std::to_string(min_length) +
                " seed=" + std::to_string(src.seed),
            describe_source(src)};
        ipikit::write_file_atomic(out_dir / "pairdep_trials.csv",
                                  ipikit::pair_trials_csv(summary.all, comments));
    }
    std::cout << "pair dependency over " << trials
              << " trial(s): median e_indp = "
              << ipikit::format_double(summary.median) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"interpulse-interval randomness toolkit"};
    app.require_subcommand(1);

    std::string out = "ipikit_out";
    app.add_option("--out", out, "output directory")->capture_default_str();

    // synth
    auto* synth = app.add_subcommand("synth", "write synthetic subject files");
    SourceOpts synth_src;
    add_source_flags(synth, synth_src, /*synth_only=*/true);

    // analyze
    auto* analyze =
        app.add_subcommand("analyze", "secrecy measures and weak-source bias");
    SourceOpts analyze_src;
    add_source_flags(analyze, analyze_src);
    std::vector<int> analyze_k = {2};
    int analyze_nmax = 8;
    std::string analyze_format = "both";
    analyze->add_option("--k", analyze_k, "low bits per interval (repeatable)")
        ->check(CLI::Range(1, 8))
        ->capture_default_str();
    analyze->add_option("--n-max", analyze_nmax, "largest n-gram size")
        ->check(CLI::Range(1, ipikit::kMaxNgramBits))
        ->capture_default_str();
    analyze->add_option("--format", analyze_format, "json, csv or both")
        ->check(CLI::IsMember({"json", "csv", "both"}))
        ->capture_default_str();

    // extract
    auto* extract = app.add_subcommand("extract", "run the martingale extractor");
    SourceOpts extract_src;
    add_source_flags(extract, extract_src);
    ipikit::ExtractorConfig extract_cfg;
    extract->add_option("--k", extract_cfg.k, "low bits per interval")
        ->check(CLI::Range(1, 8))
        ->capture_default_str();
    extract->add_option("--t-high", extract_cfg.t_high, "upper walk threshold")
        ->capture_default_str();
    extract->add_option("--t-low", extract_cfg.t_low, "lower walk threshold")
        ->capture_default_str();

    // battery
    auto* battery =
        app.add_subcommand("battery", "statistical tests on extracted bits");
    std::string battery_input, battery_bits_format = "ascii",
                battery_format = "both";
    std::size_t battery_bit_length = 0, battery_seq_len = 10000;
    std::vector<double> battery_alphas = {0.10, 0.05, 0.01};
    battery->add_option("--input", battery_input, "bit file to test")
        ->required();
    battery->add_option("--bits-format", battery_bits_format,
                        "bit file encoding: ascii or packed")
        ->check(CLI::IsMember({"ascii", "packed"}))
        ->capture_default_str();
    battery->add_option("--bit-length", battery_bit_length,
                        "bit count for packed input (default: all bytes)");
    battery->add_option("--seq-len", battery_seq_len,
                        "sequence length (10000 or 1000000)")
        ->capture_default_str();
    battery->add_option("--alpha", battery_alphas,
                        "significance level (repeatable)")
        ->check(CLI::Range(1e-9, 0.999999999))
        ->capture_default_str();
    battery->add_option("--format", battery_format, "json, csv or both")
        ->check(CLI::IsMember({"json", "csv", "both"}))
        ->capture_default_str();

    // scatter
    auto* scatter =
        app.add_subcommand("scatter", "successive-word scatter of a bit file");
    std::string scatter_input, scatter_bits_format = "ascii";
    std::size_t scatter_bit_length = 0;
    int scatter_word_size = 8;
    scatter->add_option("--input", scatter_input, "bit file to plot")
        ->required();
    scatter->add_option("--bits-format", scatter_bits_format,
                        "bit file encoding: ascii or packed")
        ->check(CLI::IsMember({"ascii", "packed"}))
        ->capture_default_str();
    scatter->add_option("--bit-length", scatter_bit_length,
                        "bit count for packed input (default: all bytes)");
    scatter->add_option("--word-size", scatter_word_size, "bits per word")
        ->check(CLI::Range(1, 32))
        ->capture_default_str();

    // pairdep
    auto* pairdep =
        app.add_subcommand("pairdep", "cross-subject dependency sampling");
    SourceOpts pairdep_src;
    add_source_flags(pairdep, pairdep_src);
    std::size_t pairdep_trials = 10000, pairdep_min_length = 100000;
    int pairdep_n = 8;
    std::string pairdep_format = "both";
    pairdep->add_option("--trials", pairdep_trials, "pairs to sample")
        ->capture_default_str();
    pairdep->add_option("--min-length", pairdep_min_length,
                        "minimum intervals per eligible subject")
        ->capture_default_str();
    pairdep->add_option("--n", pairdep_n, "block size for e_indp")
        ->check(CLI::Range(1, ipikit::kMaxJointBits))
        ->capture_default_str();
    pairdep->add_option("--format", pairdep_format, "json, csv or both")
        ->check(CLI::IsMember({"json", "csv", "both"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const fs::path out_dir(out);
        if (synth->parsed()) return cmd_synth(synth_src, out_dir);
        if (analyze->parsed())
            return cmd_analyze(analyze_src, analyze_k, analyze_nmax, out_dir,
                               analyze_format);
        if (extract->parsed())
            return cmd_extract(extract_src, extract_cfg, out_dir);
        if (battery->parsed())
            return cmd_battery(battery_input, battery_bits_format,
                               battery_bit_length, battery_seq_len,
                               battery_alphas, out_dir, battery_format);
        if (scatter->parsed())
            return cmd_scatter(scatter_input, scatter_bits_format,
                               scatter_bit_length, scatter_word_size, out_dir);
        if (pairdep->parsed())
            return cmd_pairdep(pairdep_src, pairdep_trials, pairdep_min_length,
                               pairdep_n, out_dir, pairdep_format);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const ipikit::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 1;
    } catch (const ipikit::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
