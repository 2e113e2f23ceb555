#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "report.hpp"

namespace pinchlab::cli {

// Invalid targets or parameter combinations; reported with exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::vector<std::string> targets;  // model, experiment or criteria
  std::uint64_t seed = 7;
  std::string out = "pinchlab-out";
  std::optional<double> tol;
  std::optional<double> R;
  std::optional<double> r_min, r_max;
  double step = 1e-3;
  double core_length = 0.05;
  double delta = 0.01;
  double m = 2.0;
  double lambda = 1.0;
  int max_iter = 40;
  std::string policy = "match";
  std::string cutoff = "flat";
  std::vector<double> values;  // sweep parameters
  int resolution = 64;
  double scale = 1.0;
};

Outcome run_verify(const Options& o, Json& config);
Outcome run_solve(const Options& o, Json& config);
Outcome run_sweep(const Options& o, Json& config);
Outcome run_accept(const Options& o, Json& config);

}  // namespace pinchlab::cli
