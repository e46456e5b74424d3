#include "ipikit/reports.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ipikit/error.hpp"

namespace ipikit {

void to_json(nlohmann::json& j, const EntropyReport& r) {
    j = {{"n", r.n},
         {"shannon", r.shannon_rate},
         {"collision", r.collision_rate},
         {"guessing_gap", r.guessing_gap},
         {"min_entropy", r.min_entropy_rate},
         {"l1", r.l1_distance}};
}

void to_json(nlohmann::json& j, const SvDeltaReport& r) {
    j = {{"n", r.n},
         {"p_max", r.p_max},
         {"p_min", r.p_min},
         {"delta", r.delta},
         {"unseen", r.unseen_patterns}};
}

void to_json(nlohmann::json& j, const DependencyReport& r) {
    j = {{"n", r.n},
         {"h_x", r.h_x},
         {"h_y", r.h_y},
         {"h_xy", r.h_xy},
         {"e_indp", r.e_indp}};
}

void to_json(nlohmann::json& j, const PairTrial& t) {
    j = {{"trial", t.trial},
         {"subject_a", t.subject_a},
         {"subject_b", t.subject_b},
         {"e_indp", t.e_indp}};
}

void to_json(nlohmann::json& j, const PairSampleSummary& s) {
    j = {{"trials", s.trials}, {"n", s.n},       {"min", s.min},
         {"q1", s.q1},         {"median", s.median}, {"q3", s.q3},
         {"max", s.max},       {"mean", s.mean},     {"outliers", s.outliers}};
}

void to_json(nlohmann::json& j, const TestLine& l) {
    j = {{"name", l.name},
         {"pass_count", l.pass_count},
         {"proportion", l.proportion},
         {"ci_low", l.ci_low},
         {"pass", l.proportion_pass},
         {"p_values", l.p_values}};
}

void to_json(nlohmann::json& j, const BatteryReport& r) {
    j = {{"seq_len", r.seq_len},
         {"sequences", r.sequences},
         {"alpha", r.alpha},
         {"all_pass", r.all_pass},
         {"tests", r.tests}};
}

std::string format_double(double x) {
    // Shortest decimal that round-trips; stable across platforms for the
    // deterministic-output guarantee.
    char buf[40];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc{} ? std::string(buf, p) : std::string("nan");
}

namespace {

std::string comment_block(std::span<const std::string> comments) {
    std::string out;
    for (const auto& c : comments) {
        out += "# ";
        out += c;
        out += '\n';
    }
    return out;
}

} // namespace

std::string entropy_csv(std::span<const EntropyReport> reports,
                        std::span<const std::string> comments) {
    std::string out = comment_block(comments);
    out += "n,shannon,collision,guessing_gap,min_entropy,l1\n";
    for (const auto& r : reports) {
        out += std::to_string(r.n) + ',' + format_double(r.shannon_rate) + ',' +
               format_double(r.collision_rate) + ',' +
               format_double(r.guessing_gap) + ',' +
               format_double(r.min_entropy_rate) + ',' +
               format_double(r.l1_distance) + '\n';
    }
    return out;
}

std::string sv_csv(std::span<const SvDeltaReport> reports,
                   std::span<const std::string> comments) {
    std::string out = comment_block(comments);
    out += "n,p_max,p_min,delta,unseen\n";
    for (const auto& r : reports) {
        out += std::to_string(r.n) + ',' + format_double(r.p_max) + ',' +
               format_double(r.p_min) + ',' + format_double(r.delta) + ',' +
               std::to_string(r.unseen_patterns) + '\n';
    }
    return out;
}

std::string battery_csv(std::span<const BatteryReport> reports,
                        std::span<const std::string> comments) {
    std::string out = comment_block(comments);
    out += "name,alpha,seq_len,sequences,pass_count,proportion,ci_low,pass\n";
    for (const auto& rep : reports)
        for (const auto& l : rep.tests) {
            out += l.name + ',' + format_double(rep.alpha) + ',' +
                   std::to_string(rep.seq_len) + ',' +
                   std::to_string(rep.sequences) + ',' +
                   std::to_string(l.pass_count) + ',' +
                   format_double(l.proportion) + ',' + format_double(l.ci_low) +
                   ',' + (l.proportion_pass ? "true" : "false") + '\n';
        }
    return out;
}

std::string pair_trials_csv(std::span<const PairTrial> trials,
                            std::span<const std::string> comments) {
    std::string out = comment_block(comments);
    out += "trial,subject_a,subject_b,e_indp\n";
    for (const auto& t : trials)
        out += std::to_string(t.trial) + ',' + t.subject_a + ',' +
               t.subject_b + ',' + format_double(t.e_indp) + '\n';
    return out;
}

std::string scatter_csv(const ScatterSet& points,
                        std::span<const std::string> comments) {
    std::string out = comment_block(comments);
    out += "u,v\n";
    for (const auto& [u, v] : points.points)
        out += format_double(u) + ',' + format_double(v) + '\n';
    return out;
}

std::string scatter_svg(const ScatterSet& points) {
    std::string out =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"512\" "
        "height=\"512\" viewBox=\"0 0 512 512\">\n"
        "<rect width=\"512\" height=\"512\" fill=\"white\"/>\n";
    for (const auto& [u, v] : points.points) {
        out += "<circle cx=\"" + format_double(u * 512.0) + "\" cy=\"" +
               format_double((1.0 - v) * 512.0) +
               "\" r=\"1\" fill=\"black\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content) {
    const auto tmp = path.parent_path() /
                     (path.filename().string() + ".tmp");
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open for writing: " + tmp.string());
        f.write(content.data(),
                static_cast<std::streamsize>(content.size()));
        if (!f) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename failed: " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace ipikit
