#include "hjmm/report.hpp"

#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <sstream>

#include "hjmm/errors.hpp"

namespace hjmm {

const char* to_string(CheckOutcome o) {
  switch (o) {
    case CheckOutcome::passed: return "passed";
    case CheckOutcome::failed: return "failed";
    case CheckOutcome::inconclusive: return "inconclusive";
  }
  return "?";
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void CheckReport::add(CheckItem item) {
  if (item.outcome == CheckOutcome::failed && !item.witness)
    throw StructuralError("failed check item '" + item.name + "' has no witness");
  items.push_back(std::move(item));
}

CheckOutcome CheckReport::overall() const {
  if (items.empty()) throw StructuralError("empty check report");
  CheckOutcome out = CheckOutcome::passed;
  for (const auto& it : items) {
    if (it.outcome == CheckOutcome::failed) return CheckOutcome::failed;
    if (it.outcome == CheckOutcome::inconclusive) out = CheckOutcome::inconclusive;
  }
  return out;
}

std::string CheckReport::to_text() const {
  std::ostringstream os;
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016" PRIx64, spec_hash);
  os << "model " << (spec_fingerprint.empty() ? "(unnamed)" : spec_fingerprint) << " [" << hex
     << "]\n";
  if (!tolerances.empty()) {
    os << "tolerances:";
    for (const auto& [k, v] : tolerances) os << " " << k << "=" << v;
    os << "\n";
  }
  for (const auto& it : items) {
    const char* tag = it.outcome == CheckOutcome::passed
                          ? "PASS"
                          : (it.outcome == CheckOutcome::failed ? "FAIL" : "INCONCLUSIVE");
    os << "[" << tag << "] " << it.name << "  estimate=" << it.estimate
       << " bound=" << it.bound << " samples=" << it.samples_used;
    if (!it.note.empty()) os << "  (" << it.note << ")";
    os << "\n";
    if (it.witness) {
      os << "       witness #" << it.witness->sample_index;
      if (!it.witness->description.empty()) os << ": " << it.witness->description;
      for (const auto& [k, v] : it.witness->data) os << " " << k << "=" << v;
      os << "\n";
    }
  }
  os << "overall: " << to_string(overall()) << "\n";
  return os.str();
}

std::string CheckReport::to_json() const {
  nlohmann::json j;
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016" PRIx64, spec_hash);
  j["model"] = spec_fingerprint;
  j["model_hash"] = hex;
  j["overall"] = to_string(overall());
  j["tolerances"] = tolerances;
  j["items"] = nlohmann::json::array();
  for (const auto& it : items) {
    nlohmann::json ji;
    ji["name"] = it.name;
    ji["outcome"] = to_string(it.outcome);
    ji["passed"] = it.passed();
    ji["estimate"] = it.estimate;
    ji["bound"] = it.bound;
    ji["samples_used"] = it.samples_used;
    if (!it.note.empty()) ji["note"] = it.note;
    if (it.witness) {
      ji["witness"] = {{"sample_index", it.witness->sample_index},
                       {"description", it.witness->description},
                       {"data", it.witness->data}};
    }
    j["items"].push_back(std::move(ji));
  }
  return j.dump(2) + "\n";
}

}  // namespace hjmm
