#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace pinchlab {

enum class Relation { le, ge };

struct Check {
  std::string name;
  double value = 0.0;
  Relation relation = Relation::le;
  double threshold = 0.0;
  bool timing = false;  // wall-clock value, excluded from deterministic reports
  bool pass() const { return relation == Relation::le ? value <= threshold : value >= threshold; }
};

struct CriterionReport {
  int id = 0;
  std::string key;    // stable claim identifier
  std::string title;
  std::vector<Check> checks;
  std::vector<std::pair<std::string, double>> logged;  // recorded, not asserted
  std::vector<std::string> notes;
  double seconds = 0.0;
  bool pass() const;
};

struct AcceptanceConfig {
  std::uint64_t seed = 7;
  // Multiplies the randomized sample counts (1 = full suite).
  double sample_scale = 1.0;
};

inline constexpr int kCriterionCount = 11;

// Keys of criteria 1..11.
std::string criterion_key(int id);
// Throws DomainError for ids outside 1..11.
CriterionReport run_criterion(int id, const AcceptanceConfig& cfg = {});
std::vector<CriterionReport> run_acceptance(const AcceptanceConfig& cfg = {}, const std::vector<int>& ids = {});

}  // namespace pinchlab
