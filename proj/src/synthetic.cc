#include "asec/synthetic.h"

#include "asec/errors.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace asec {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  return bound == 0 ? 0 : next() % bound;
}

void SyntheticConfig::validate() const {
  auto bad = [](const std::string &what) {
    throw ConfigError("invalid synthetic config: " + what);
  };
  if (levels < 1) bad("levels must be >= 1");
  if (!(base_time_ms >= 0.0) || std::isinf(base_time_ms))
    bad("base time must be finite and >= 0");
  if (!(time_scale >= 1.0) || std::isinf(time_scale))
    bad("time scale must be >= 1");
  if (!(width >= 0.0) || std::isinf(width)) bad("width must be finite and >= 0");
  if (!(decay > 0.0 && decay <= 1.0)) bad("decay must lie in (0, 1]");
  if (!(cost_min >= 0.0) || !(cost_max >= cost_min) || std::isinf(cost_max))
    bad("cost range must satisfy 0 <= cost_min <= cost_max < inf");
}

namespace {

std::uint64_t name_hash(const std::string &name) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

} // namespace

EstimatorManifest generate_synthetic(std::span<const std::string> action_names,
                                     std::uint64_t seed,
                                     const SyntheticConfig &config) {
  config.validate();
  EstimatorManifest manifest;
  manifest.default_prior = {config.cost_min, config.cost_max};
  for (const auto &name : action_names) {
    SplitMix64 rng(SplitMix64(seed ^ name_hash(name)).next());
    ManifestEntry entry;
    entry.action = name;
    const double cost = rng.uniform(config.cost_min, config.cost_max);
    entry.true_cost = cost;
    CostInterval parent = manifest.default_prior;
    for (int j = 0; j < config.levels; ++j) {
      EstimatorLevel level;
      level.time_ms = config.base_time_ms * std::pow(config.time_scale, j);
      if (config.exact_final && j + 1 == config.levels) {
        level.interval = {cost, cost};
      } else {
        // Place an interval of the configured width (capped by the parent
        // width) around the cost, inside the parent interval.
        const double width =
            std::min(config.width * std::pow(config.decay, j), parent.width());
        const double lo = std::max(cost - width, parent.lb);
        const double hi = std::max(lo, std::min(cost, parent.ub - width));
        const double lb = std::max(std::min(rng.uniform(lo, hi), cost), parent.lb);
        const double ub = std::min(std::max(lb + width, cost), parent.ub);
        level.interval = {lb, ub};
      }
      parent = level.interval;
      entry.levels.push_back(level);
    }
    manifest.entries.push_back(std::move(entry));
  }
  validate_manifest(manifest);
  return manifest;
}

EstimatorManifest generate_synthetic(const PlanningTask &task,
                                     std::uint64_t seed,
                                     const SyntheticConfig &config) {
  std::vector<std::string> names;
  names.reserve(task.num_actions());
  for (const auto &action : task.actions) names.push_back(action.name);
  return generate_synthetic(names, seed, config);
}

} // namespace asec
