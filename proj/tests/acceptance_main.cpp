// Acceptance gate: exercises the nine delivery criteria end to end and
// prints one verdict line per criterion. Exits with the number of failed
// criteria.
//
// The cross-subject independence criterion has one sub-check whose numeric
// bound is unreachable for any faithful plug-in estimator at the specified
// sample sizes (the estimator bias alone is ~40x the bound). That sub-check
// runs exactly as specified under --only-unattainable and is registered in
// CTest as an expected failure; the default run covers everything else and
// prints the same diagnostic numbers for the record.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "ipikit/bitstream.hpp"
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
using namespace ipikit;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void verdict(bool ok, const std::string& label) {
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", label.c_str());
    if (!ok) ++g_failures;
}

void info(const std::string& line) { std::printf("       %s\n", line.c_str()); }

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

BitStream random_stream(std::uint64_t seed, std::size_t len) {
    SplitMix64 g(seed);
    BitStream bs;
    for (std::size_t i = 0; i < len; ++i) bs.push_back(g.next() & 1);
    return bs;
}

// ---- criterion 1: worked example, end to end, under a second ----

void criterion_ingest_worked_example() {
    const auto t0 = Clock::now();
    bool ok = true;

    const auto series = parse_ipi_file(
        "# subject: worked\n160\n125\n132\n171\n148\n130\n");
    const auto normd = normalize_series(series);
    ok = ok && normd.size() == 6 && normd[0].value == 140;

    const auto z2 = concat_series(normd, 2);
    ok = ok && z2.to_string() == "000100110010";

    const auto d1 = circular_ngram_distribution(z2, 1);
    const auto d2 = circular_ngram_distribution(z2, 2);
    const auto d3 = circular_ngram_distribution(z2, 3);
    ok = ok && d1.counts == std::vector<std::uint64_t>{8, 4};
    ok = ok && d2.counts == std::vector<std::uint64_t>{5, 3, 3, 1};
    ok = ok && d3.counts == std::vector<std::uint64_t>{2, 3, 2, 1, 3, 0, 1, 0};
    ok = ok && d1.total == 12 && d2.total == 12 && d3.total == 12;

    const double elapsed = seconds_since(t0);
    ok = ok && elapsed < 1.0;
    verdict(ok, "ingest worked example reproduces the 2-bit stream and "
                "n-gram counts (" +
                    format_double(elapsed) + " s)");
}

// ---- criterion 2: measure ordering and oracle agreement ----

void criterion_measure_ordering() {
    bool ok = true;
    double worst_gap = 0.0;
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(trial % 8);
        SplitMix64 g(trial * 7919 + 3);
        std::vector<double> p(std::size_t{1} << n);
        double sum = 0;
        for (auto& x : p) {
            x = g.below(5) == 0 ? 0.0 : static_cast<double>(1 + g.below(10000));
            sum += x;
        }
        if (sum == 0) {
            p[0] = 1;
            sum = 1;
        }
        for (auto& x : p) x /= sum;

        const double h = shannon_entropy(p, n);
        const double h2 = collision_entropy(p, n);
        const double hmin = min_entropy(p, n);
        ok = ok && hmin <= h2 + 1e-9 && h2 <= h + 1e-9 && h <= 1.0 + 1e-9 &&
             hmin >= 0.0;

        long double oracle = 0;
        for (double x : p)
            if (x > 0) oracle -= static_cast<long double>(x) *
                                 std::log2(static_cast<long double>(x));
        const double gap =
            std::abs(h - static_cast<double>(oracle) / n);
        worst_gap = std::max(worst_gap, gap);
        ok = ok && gap <= 1e-9;
    }
    verdict(ok, "1000 random distributions: min <= collision <= shannon <= 1 "
                "and extended-precision agreement (worst gap " +
                    format_double(worst_gap) + ")");
}

// ---- criterion 3: semi-random bias inversion is exact ----

void criterion_sv_exact() {
    bool ok = true;
    for (std::uint64_t r : {1, 2, 3, 10}) {
        const NgramDistribution d{1, {r * 40, 40}, (r + 1) * 40};
        const double want = static_cast<double>(r - 1) /
                            static_cast<double>(r + 1);
        ok = ok && sv_delta(d).delta == want; // bitwise equality
    }
    ok = ok && sv_delta(NgramDistribution{2, {9, 9, 9, 9}, 36}).delta == 0.0;
    const auto z = sv_delta(NgramDistribution{2, {20, 0, 10, 10}, 40});
    ok = ok && z.delta == 1.0 && z.unseen_patterns == 1;
    verdict(ok, "planted count ratios invert to delta = (r-1)/(r+1) exactly, "
                "unseen patterns force delta = 1");
}

// ---- criterion 4: dependency identity + independence floor ----

void criterion_dependency_identity() {
    const auto t0 = Clock::now();
    bool ok = true;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const int n = 1 + static_cast<int>(seed % 6);
        SplitMix64 g(seed * 13 + 5);
        BitStream x;
        const std::size_t len = 400 + seed * 31;
        for (std::size_t i = 0; i < len; ++i)
            x.push_back(g.below(4) < 1 + seed % 3);
        const auto r = e_indp(x, x, n);
        ok = ok && r.e_indp == r.h_x && r.h_xy == r.h_x;
    }
    const double elapsed = seconds_since(t0);
    verdict(ok && elapsed < 60.0,
            "100 self-comparisons return e_indp identical to the stream "
            "entropy (bitwise)");
}

// The sub-check with the unreachable bound, exactly as specified:
// 100 trials of independent 10^6-bit streams at n = 8 should give
// e_indp < 0.01 in at least 95 trials.
void criterion_dependency_independent_streams(bool as_specified) {
    const auto t0 = Clock::now();
    std::size_t below_bound_n8 = 0, below_bound_n4 = 0;
    std::vector<double> values_n8;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        const auto x = random_stream(trial * 2 + 90001, 1000000);
        const auto y = random_stream(trial * 2 + 90002, 1000000);
        const double e8 = e_indp(x, y, 8).e_indp;
        values_n8.push_back(e8);
        below_bound_n8 += e8 < 0.01;
        below_bound_n4 += e_indp(x, y, 4).e_indp < 0.01;
    }
    std::sort(values_n8.begin(), values_n8.end());
    const double median_n8 = values_n8[50];
    const double bias_n8 = 65025.0 / (2.0 * 125000.0 * std::log(2.0));
    const double elapsed = seconds_since(t0);

    info("n = 8: e_indp < 0.01 in " + std::to_string(below_bound_n8) +
         "/100 trials (need 95); median " + format_double(median_n8));
    info("plug-in bias floor at n = 8, N = 125000 blocks: (2^8-1)^2/(2 N ln 2)"
         " = " + format_double(bias_n8) + " -- 37x the 0.01 bound");
    info("same streams at n = 4 (bias floor 6.5e-4): e_indp < 0.01 in " +
         std::to_string(below_bound_n4) + "/100 trials");
    info("elapsed " + format_double(elapsed) + " s (bound 60 s)");

    if (as_specified) {
        verdict(below_bound_n8 >= 95 && elapsed < 60.0,
                "independent 10^6-bit streams at n = 8 stay under 0.01 bits "
                "in 95/100 trials (unreachable: estimator bias ~0.38)");
    } else {
        // Attainable form of the same intent: the estimator sits at its
        // theoretical bias floor at n = 8 and under the bound at n = 4.
        const bool ok = below_bound_n4 >= 95 &&
                        median_n8 > bias_n8 * 0.8 &&
                        median_n8 < bias_n8 * 1.5 && elapsed < 60.0;
        verdict(ok, "independent-stream estimates sit at the plug-in bias "
                    "floor (n = 8) and under 0.01 bits at n = 4");
    }
}

// ---- criterion 5: extractor mechanics ----

void criterion_extractor_mechanics() {
    bool ok = true;
    const ExtractorConfig cfg;
    for (std::uint8_t t = 0; t < 8; ++t) {
        const int parity = std::popcount(static_cast<unsigned>(t)) % 2;
        ok = ok && classify_triad(t, cfg) == (parity == 0 ? +1 : -1);
    }

    std::vector<NormalizedIpi> zeros(6, normalize(20));
    const auto res = extract(zeros, cfg);
    ok = ok && res.output.to_string() == "1" && res.input_triads == 4;

    SplitMix64 g(900913);
    MartingaleState st;
    std::uint64_t crossings = 0;
    for (std::uint64_t i = 0; i < 1000000; ++i)
        if (mre_step(st, static_cast<std::uint8_t>(g.next() & 7), cfg))
            ++crossings;
    const double mean = 1000000.0 / static_cast<double>(crossings);
    ok = ok && mean > 15.8 && mean < 16.2;
    verdict(ok, "parity grouping, barrier emission on an all-zero stream, "
                "and mean crossing time " +
                    format_double(mean) + " in [15.8, 16.2]");
}

// ---- criterion 6: extraction quality vs the gray-code baseline ----

void criterion_extraction_quality() {
    const auto t0 = Clock::now();
    bool ok = true;

    // Stage A: 10^7 synthetic ideal intervals, as specified.
    SynthModel ideal;
    ideal.seed = 60001;
    SynthStream sa(ideal);
    StreamExtractor ea({});
    for (std::size_t i = 0; i < 10000000; ++i) {
        const auto n = normalize(sa.next());
        ea.feed_word(k_lsb(n, 2), 2);
    }
    const auto& bits_a = ea.output();
    info("stage A: 10^7 ideal intervals -> " + std::to_string(bits_a.size()) +
         " extracted bits (yield " +
         format_double(static_cast<double>(bits_a.size()) / 1e7) +
         " per interval, theory 1/24)");

    const auto rep_a = run_battery(bits_a, 10000, 0.01);
    ok = ok && rep_a.all_pass;
    info(std::string("stage A battery, 10^4-bit sequences, alpha 0.01: ") +
         (rep_a.all_pass ? "all rows pass" : "ROW FAILED"));

    // The 10^6-length battery cannot run on stage A output: the yield
    // arithmetic (2 bits x 10^7 / 3 triads / 16 per crossing ~ 4.2e5) never
    // reaches one sequence. Record that, then resize the input so the long
    // battery is actually exercised.
    try {
        run_battery(bits_a, 1000000, 0.01);
        ok = false; // reaching here would mean the arithmetic above is wrong
    } catch (const Error& e) {
        info(std::string("10^6-length battery on stage A output correctly "
                         "refuses: ") + e.what());
    }

    // Stage B: 2.4e8 intervals -> ~10^7 bits; both lengths run.
    SynthModel big;
    big.seed = 60002;
    SynthStream sb(big);
    StreamExtractor eb({});
    for (std::size_t i = 0; i < 240000000; ++i) {
        const auto n = normalize(sb.next());
        eb.feed_word(k_lsb(n, 2), 2);
    }
    const auto& bits_b = eb.output();
    info("stage B (disclosed resize): 2.4e8 intervals -> " +
         std::to_string(bits_b.size()) + " extracted bits");
    const auto rep_b10k = run_battery(bits_b, 10000, 0.01);
    const auto rep_b1m = run_battery(bits_b, 1000000, 0.01);
    ok = ok && rep_b10k.all_pass && rep_b1m.all_pass;
    info("stage B batteries: 10^4-bit x " +
         std::to_string(rep_b10k.sequences) + " -> " +
         (rep_b10k.all_pass ? std::string("pass") : std::string("FAIL")) +
         "; 10^6-bit x " + std::to_string(rep_b1m.sequences) + " -> " +
         (rep_b1m.all_pass ? std::string("pass") : std::string("FAIL")));

    // Gray-code baseline on a strongly autocorrelated source must fail.
    SynthModel ar;
    ar.kind = SynthKind::Ar1;
    ar.ar_coefficient = 0.99;
    ar.noise_sd = 2.0;
    ar.seed = 60003;
    const auto ar_series = synth_generate(ar, 2000000);
    const auto gray = gray_code_baseline(normalize_series(ar_series), 2);
    const auto rep_gray = run_battery(gray, 10000, 0.01);
    ok = ok && !rep_gray.all_pass;
    std::string failed_rows;
    for (const auto& line : rep_gray.tests)
        if (!line.proportion_pass) failed_rows += ' ' + line.name;
    info("gray baseline on ar1 (0.99): failing rows:" +
         (failed_rows.empty() ? " none" : failed_rows));

    const double elapsed = seconds_since(t0);
    ok = ok && elapsed < 300.0;
    verdict(ok, "extractor output passes both battery lengths, gray baseline "
                "on correlated input fails (" +
                    format_double(elapsed) + " s, bound 300)");
}

// ---- criterion 7: proportion band arithmetic ----

void criterion_proportion_band() {
    bool ok = true;
    const double ci = proportion_ci_low(0.01, 100);
    ok = ok && std::abs(ci - 0.9601504) < 1e-6;
    ok = ok && 0.96 < ci;  // 96/100 must be flagged
    ok = ok && 0.97 >= ci; // 97/100 must pass
    verdict(ok, "alpha 0.01, m = 100 gives ci_low " + format_double(ci) +
                    "; 96/100 flagged, 97/100 accepted");
}

// ---- criterion 8: export round trip ----

void criterion_export_round_trip() {
    bool ok = true;
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        SplitMix64 g(trial + 80000);
        const std::size_t len = 1 + g.below(100000);
        const auto bs = random_stream(trial + 81000, len);
        const auto packed = export_raw(bs, ExportFormat::Packed);
        ok = ok && packed.size() == (len + 7) / 8;
        const auto back = import_packed(packed, len);
        ok = ok && back.size() == bs.size();
        // Compare packed words rather than strings to keep this cheap.
        ok = ok && back.words() == bs.words();
        if (trial % 50 == 0) {
            const auto ascii = export_raw(bs, ExportFormat::Ascii);
            ok = ok && import_ascii(ascii).words() == bs.words();
        }
    }
    verdict(ok, "1000 packed and ascii round trips at lengths 1..10^5 are "
                "bit-exact");
}

// ---- criterion 9: CLI determinism ----

int run_cli(const std::string& cli, const std::string& args) {
    const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    return std::system(cmd.c_str());
}

bool dirs_identical(const fs::path& a, const fs::path& b,
                    std::string& detail) {
    std::vector<fs::path> names;
    for (const auto& e : fs::directory_iterator(a))
        names.push_back(e.path().filename());
    std::sort(names.begin(), names.end());
    for (const auto& name : names) {
        if (!fs::exists(b / name)) {
            detail = name.string() + " missing from rerun";
            return false;
        }
        if (read_file(a / name) != read_file(b / name)) {
            detail = name.string() + " differs between runs";
            return false;
        }
    }
    return !names.empty();
}

void criterion_cli_determinism(const std::string& cli) {
    if (cli.empty()) {
        verdict(false, "cli determinism (no --cli path supplied)");
        return;
    }
    const auto root = fs::temp_directory_path() /
                      ("ipikit_accept_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);

    const auto subjects = root / "subjects";
    bool ok = run_cli(cli, "--out " + subjects.string() +
                               " synth --synth ar1 --count 20000 --subjects 2 "
                               "--seed 11 --ar 0.8 --noise-sd 6") == 0;

    struct Step {
        const char* name;
        std::string args;
    };
    const std::string subj_inputs =
        "--input " + (subjects / "synth-000.txt").string() + " --input " +
        (subjects / "synth-001.txt").string();
    const std::vector<Step> steps = {
        {"synth", "synth --synth iid-histogram --count 5000 --subjects 2 "
                  "--seed 21 --noise-sd 9"},
        {"analyze", "analyze " + subj_inputs + " --k 1 --k 2 --n-max 6"},
        {"extract", "extract --synth iid-uniform-bits --count 3000000 "
                    "--seed 5"},
        {"battery", ""}, // filled below, needs the extract output path
        {"scatter", ""},
        {"pairdep", "pairdep --synth iid-uniform-bits --count 20000 "
                    "--subjects 6 --seed 3 --trials 50 --min-length 10000 "
                    "--n 4"},
    };

    std::string detail;
    for (const auto& step : steps) {
        for (const char* tag : {"a", "b"}) {
            const fs::path out = root / (std::string(step.name) + "_" + tag);
            std::string args = step.args;
            if (std::string(step.name) == "battery")
                args = "battery --input " +
                       (root / "extract_a" / "output.txt").string() +
                       " --seq-len 10000";
            if (std::string(step.name) == "scatter")
                args = "scatter --input " +
                       (root / "extract_a" / "output.bin").string() +
                       " --bits-format packed --word-size 8";
            if (run_cli(cli, "--out " + out.string() + " " + args) != 0) {
                ok = false;
                detail = std::string(step.name) + " exited nonzero";
            }
        }
        if (!ok) break;
        std::string mismatch;
        if (!dirs_identical(root / (std::string(step.name) + "_a"),
                            root / (std::string(step.name) + "_b"),
                            mismatch)) {
            ok = false;
            detail = std::string(step.name) + ": " + mismatch;
        }
    }
    if (!detail.empty()) info(detail);

    // Exit-code contract: missing input file is a usage/io failure (1),
    // impossible analysis request is an analysis failure (2).
    const int missing =
        run_cli(cli, "--out " + (root / "x1").string() +
                         " analyze --input " + (root / "absent.txt").string());
    const int too_short =
        run_cli(cli, "--out " + (root / "x2").string() +
                         " battery --input " +
                         (root / "extract_a" / "output.txt").string() +
                         " --seq-len 1000000");
    ok = ok && WEXITSTATUS(missing) == 1 && WEXITSTATUS(too_short) == 2;
    info("exit codes: missing input -> " +
         std::to_string(WEXITSTATUS(missing)) + ", undersized battery -> " +
         std::to_string(WEXITSTATUS(too_short)));

    fs::remove_all(root);
    verdict(ok, "every subcommand run twice produces byte-identical output "
                "trees and the documented exit codes");
}

} // namespace

int main(int argc, char** argv) {
    std::string cli;
    bool only_unattainable = false;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--cli" && i + 1 < argc) cli = argv[++i];
        if (arg == "--only-unattainable") only_unattainable = true;
    }

    if (only_unattainable) {
        std::printf("== sub-check specified with an unreachable bound, run "
                    "as written ==\n");
        criterion_dependency_independent_streams(/*as_specified=*/true);
        std::printf("%d criterion(s) failed\n", g_failures);
        return g_failures;
    }

    criterion_ingest_worked_example();
    criterion_measure_ordering();
    criterion_sv_exact();
    criterion_dependency_identity();
    criterion_dependency_independent_streams(/*as_specified=*/false);
    criterion_extractor_mechanics();
    criterion_extraction_quality();
    criterion_proportion_band();
    criterion_export_round_trip();
    criterion_cli_determinism(cli);

    std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures;
}
