#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace pinchlab::cli {

std::string report_schema_version() { return "1.0.0"; }

namespace {

int major_of(const std::string& version) {
  auto dot = version.find('.');
  if (dot == std::string::npos || dot == 0) throw SchemaVersionError("malformed schema version '" + version + "'");
  for (std::size_t i = 0; i < dot; ++i)
    if (version[i] < '0' || version[i] > '9') throw SchemaVersionError("malformed schema version '" + version + "'");
  return std::stoi(version.substr(0, dot));
}

}  // namespace

Json parse_report(const std::string& text) {
  Json j = Json::parse(text);
  if (!j.is_object() || !j.contains("schema_version") || !j["schema_version"].is_string())
    throw SchemaVersionError("report carries no schema_version");
  const std::string v = j["schema_version"].get<std::string>();
  if (major_of(v) != major_of(report_schema_version()))
    throw SchemaVersionError("report schema " + v + " is incompatible with reader schema " + report_schema_version());
  return j;
}

Json check_json(const Check& c) {
  Json j;
  j["name"] = c.name;
  if (!c.timing) j["value"] = c.value;
  j["relation"] = c.relation == Relation::le ? "<=" : ">=";
  j["threshold"] = c.threshold;
  if (c.timing) j["timing"] = true;
  j["pass"] = c.pass();
  return j;
}

Json claim(const std::string& id, const std::string& title) {
  Json j;
  j["id"] = id;
  j["title"] = title;
  j["checks"] = Json::array();
  return j;
}

void add_check(Outcome& out, Json& cl, const Check& c) {
  cl["checks"].push_back(check_json(c));
  if (!c.pass()) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s: %s = %.6g violates %s %.6g", cl["id"].get<std::string>().c_str(),
                  c.name.c_str(), c.value, c.relation == Relation::le ? "<=" : ">=", c.threshold);
    out.failures.emplace_back(buf);
  }
}

Json envelope(const std::string& command, const Json& config, std::uint64_t seed, const Outcome& out) {
  Json j;
  j["schema_version"] = report_schema_version();
  j["command"] = command;
  j["seed"] = seed;
  j["config"] = config;
  j["asserted"] = out.asserted;
  j["pass"] = out.failures.empty();
  j["failures"] = out.failures;
  for (auto it = out.summary.begin(); it != out.summary.end(); ++it) j[it.key()] = it.value();
  return j;
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir, const Json& report,
                                                 const Outcome& out) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << text;
    written.push_back(p);
  };
  put(dir / "report.json", report.dump(2) + "\n");
  for (const auto& [name, text] : out.csv) put(dir / (name + ".csv"), text);
  return written;
}

}  // namespace pinchlab::cli
