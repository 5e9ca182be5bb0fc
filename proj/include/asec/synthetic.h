#pragma once

#include "asec/manifest.h"
#include "asec/task.h"

#include <cstdint>
#include <span>
#include <string>

namespace asec {

// Synthetic estimator chains. Per action a hidden true cost c is drawn
// uniformly from [cost_min, cost_max]. Level j (1-based) takes
// base_time_ms * time_scale^(j-1) and reports an interval of width
// width * decay^(j-1) that contains c and lies inside level j-1. With
// exact_final the last level is [c, c]. The default prior of the manifest
// is [cost_min, cost_max].
struct SyntheticConfig {
  int levels = 3;
  double base_time_ms = 1.0;
  double time_scale = 10.0;
  double width = 8.0;
  double decay = 0.5;
  bool exact_final = true;
  double cost_min = 1.0;
  double cost_max = 10.0;

  // Throws ConfigError.
  void validate() const;
};

// Output depends only on (action names, seed, config).
EstimatorManifest generate_synthetic(std::span<const std::string> action_names,
                                     std::uint64_t seed,
                                     const SyntheticConfig &config);

EstimatorManifest generate_synthetic(const PlanningTask &task,
                                     std::uint64_t seed,
                                     const SyntheticConfig &config);

// Small deterministic generator shared by the synthetic manifests and the
// instance generators. Independent of the standard library's distribution
// implementations so outputs are stable across toolchains.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

} // namespace asec
