#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "pinchlab/acceptance.hpp"

namespace pinchlab::cli {

using Json = nlohmann::ordered_json;

// Semantic version of the report layout.
std::string report_schema_version();

class SchemaVersionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses a report and requires a schema version with the same major number.
Json parse_report(const std::string& text);

// Outcome of one subcommand: the JSON summary, CSV files by name and the contract verdict.
struct Outcome {
  Json summary = Json::object();
  std::map<std::string, std::string> csv;
  std::vector<std::string> failures;
  bool asserted = true;  // false for runs whose outcome is logged only
};

Json check_json(const Check& c);
// Adds the check to the claim and records a failure line when it does not hold.
void add_check(Outcome& out, Json& claim, const Check& c);
Json claim(const std::string& id, const std::string& title);

// Wraps the summary with command, config, seed and schema version.
Json envelope(const std::string& command, const Json& config, std::uint64_t seed, const Outcome& out);

// Fixed-format CSV number.
std::string csv_number(double v);

// Writes report.json and every CSV into dir; returns the written paths.
std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir, const Json& report,
                                                 const Outcome& out);

}  // namespace pinchlab::cli
