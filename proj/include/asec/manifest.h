#pragma once

#include "asec/task.h"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace asec {

struct ManifestEntry {
  std::string action;
  std::optional<double> true_cost;
  std::vector<EstimatorLevel> levels;
};

// The serialized form of an estimator set:
//   {"default": {"prior": [lb, ub|null]},
//    "actions": [{"action": name, "true_cost": c,
//                 "estimators": [{"time_ms": t, "interval": [lb, ub|null]}]}]}
// The default prior is the starting interval of every action.
struct EstimatorManifest {
  CostInterval default_prior{0.0, kInfinity};
  std::vector<ManifestEntry> entries;

  const ManifestEntry *find(std::string_view action) const;
};

// Throws ManifestError on schema violations, duplicate entries, or broken
// chain invariants (the message names the entry and level).
EstimatorManifest parse_manifest(std::string_view text);

// Chain invariants: nondecreasing times, nested intervals, true cost inside
// every level.
void validate_manifest(const EstimatorManifest &manifest);

std::string dump_manifest(const EstimatorManifest &manifest);

EstimatorManifest read_manifest_file(const std::string &path);
void write_manifest_file(const EstimatorManifest &manifest,
                         const std::string &path);

} // namespace asec
