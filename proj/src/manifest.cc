#include "asec/manifest.h"

#include "asec/errors.h"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace asec {

using nlohmann::json;

namespace {

double number(const json &value, const std::string &where) {
  if (!value.is_number())
    throw ManifestError("schema error: " + where + " must be a number");
  return value.get<double>();
}

CostInterval interval_from(const json &value, const std::string &where) {
  if (!value.is_array() || value.size() != 2)
    throw ManifestError("schema error: " + where + " must be [lb, ub]");
  double lb = number(value[0], where + ".lb");
  double ub = value[1].is_null() ? kInfinity : number(value[1], where + ".ub");
  if (lb < 0.0 || lb > ub)
    throw ManifestError("schema error: " + where + " is not a valid interval");
  return {lb, ub};
}

json interval_to(const CostInterval &interval) {
  json ub = std::isinf(interval.ub) ? json(nullptr) : json(interval.ub);
  return json::array({interval.lb, ub});
}

std::string level_tag(const ManifestEntry &entry, std::size_t level) {
  return "entry '" + entry.action + "' level " + std::to_string(level + 1);
}

} // namespace

const ManifestEntry *EstimatorManifest::find(std::string_view action) const {
  for (const auto &entry : entries)
    if (entry.action == action) return &entry;
  return nullptr;
}

void validate_manifest(const EstimatorManifest &manifest) {
  std::unordered_set<std::string> seen;
  for (const auto &entry : manifest.entries) {
    if (!seen.insert(entry.action).second)
      throw ManifestError("duplicate entry for action '" + entry.action + "'");
    for (std::size_t j = 0; j < entry.levels.size(); ++j) {
      const auto &level = entry.levels[j];
      if (level.time_ms < 0.0)
        throw ManifestError(level_tag(entry, j) + ": negative time_ms");
      if (j > 0) {
        const auto &prev = entry.levels[j - 1];
        if (level.time_ms < prev.time_ms)
          throw ManifestError(level_tag(entry, j) +
                              ": time_ms decreases along the chain");
        if (!level.interval.within(prev.interval))
          throw ManifestError(level_tag(entry, j) +
                              ": interval is not nested in the previous level");
      }
      if (entry.true_cost && !level.interval.contains(*entry.true_cost))
        throw ManifestError(level_tag(entry, j) +
                            ": interval excludes true_cost");
    }
  }
}

EstimatorManifest parse_manifest(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ManifestError(std::string("schema error: ") + e.what());
  }
  if (!doc.is_object()) throw ManifestError("schema error: expected object");
  EstimatorManifest manifest;
  if (auto it = doc.find("default"); it != doc.end()) {
    if (!it->is_object())
      throw ManifestError("schema error: default must be an object");
    if (auto prior = it->find("prior"); prior != it->end())
      manifest.default_prior = interval_from(*prior, "default.prior");
  }
  if (auto it = doc.find("actions"); it != doc.end()) {
    if (!it->is_array())
      throw ManifestError("schema error: actions must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json &item = (*it)[i];
      const std::string where = "actions[" + std::to_string(i) + "]";
      if (!item.is_object() || !item.contains("action") ||
          !item["action"].is_string())
        throw ManifestError("schema error: " + where + ".action missing");
      ManifestEntry entry;
      entry.action = item["action"].get<std::string>();
      if (auto c = item.find("true_cost"); c != item.end() && !c->is_null()) {
        entry.true_cost = number(*c, where + ".true_cost");
        if (*entry.true_cost < 0.0)
          throw ManifestError("schema error: " + where +
                              ".true_cost is negative");
      }
      if (auto levels = item.find("estimators"); levels != item.end()) {
        if (!levels->is_array())
          throw ManifestError("schema error: " + where +
                              ".estimators must be an array");
        for (std::size_t j = 0; j < levels->size(); ++j) {
          const json &level = (*levels)[j];
          const std::string lw = where + ".estimators[" + std::to_string(j) + "]";
          if (!level.is_object() || !level.contains("time_ms") ||
              !level.contains("interval"))
            throw ManifestError("schema error: " + lw +
                                " needs time_ms and interval");
          entry.levels.push_back({number(level["time_ms"], lw + ".time_ms"),
                                  interval_from(level["interval"],
                                                lw + ".interval")});
        }
      }
      manifest.entries.push_back(std::move(entry));
    }
  }
  validate_manifest(manifest);
  return manifest;
}

std::string dump_manifest(const EstimatorManifest &manifest) {
  json actions = json::array();
  for (const auto &entry : manifest.entries) {
    json item;
    item["action"] = entry.action;
    if (entry.true_cost) item["true_cost"] = *entry.true_cost;
    json levels = json::array();
    for (const auto &level : entry.levels)
      levels.push_back(
          {{"time_ms", level.time_ms}, {"interval", interval_to(level.interval)}});
    item["estimators"] = std::move(levels);
    actions.push_back(std::move(item));
  }
  json doc;
  doc["default"] = {{"prior", interval_to(manifest.default_prior)}};
  doc["actions"] = std::move(actions);
  return doc.dump(2) + "\n";
}

EstimatorManifest read_manifest_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ManifestError("cannot open manifest " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_manifest(buffer.str());
}

void write_manifest_file(const EstimatorManifest &manifest,
                         const std::string &path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << dump_manifest(manifest);
}

} // namespace asec
