#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "json.hpp"

#include "ipikit/dependency.hpp"
#include "ipikit/extractor.hpp"
#include "ipikit/secrecy.hpp"
#include "ipikit/sv.hpp"
#include "ipikit/testkit.hpp"

namespace ipikit {

// nlohmann ADL hooks; `nlohmann::json j = report;` works for all of these.
void to_json(nlohmann::json& j, const EntropyReport& r);
void to_json(nlohmann::json& j, const SvDeltaReport& r);
void to_json(nlohmann::json& j, const DependencyReport& r);
void to_json(nlohmann::json& j, const PairTrial& t);
void to_json(nlohmann::json& j, const PairSampleSummary& s);
void to_json(nlohmann::json& j, const TestLine& l);
void to_json(nlohmann::json& j, const BatteryReport& r);

// Shortest-exact decimal rendering used by every CSV writer.
std::string format_double(double x);

// CSV bodies. `comments` lines are emitted first, each prefixed with "# ".
std::string entropy_csv(std::span<const EntropyReport> reports,
                        std::span<const std::string> comments);
std::string sv_csv(std::span<const SvDeltaReport> reports,
                   std::span<const std::string> comments);
std::string battery_csv(std::span<const BatteryReport> reports,
                        std::span<const std::string> comments);
std::string pair_trials_csv(std::span<const PairTrial> trials,
                            std::span<const std::string> comments);
std::string scatter_csv(const ScatterSet& points,
                        std::span<const std::string> comments);

std::string scatter_svg(const ScatterSet& points);

// Writes via a temporary in the same directory plus rename, so readers never
// observe a half-written file.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

std::string read_file(const std::filesystem::path& path);

} // namespace ipikit
