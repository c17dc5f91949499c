#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hjmm {

enum class CheckOutcome { passed, failed, inconclusive };
const char* to_string(CheckOutcome o);

/// Offending input of a failed audit, replayable through the predicate that
/// produced it: the sample index regenerates the exact curves/marks.
struct Witness {
  std::uint64_t sample_index = 0;
  std::string description;
  std::map<std::string, double> data;  // named scalars (z, mark, margin, ...)
};

struct CheckItem {
  std::string name;
  CheckOutcome outcome = CheckOutcome::passed;
  double estimate = 0.0;  // worst constant / margin found over the samples
  double bound = 0.0;     // the declared or configured bound it was held against
  std::size_t samples_used = 0;
  std::string note;
  std::optional<Witness> witness;

  bool passed() const { return outcome == CheckOutcome::passed; }
};

std::uint64_t fnv1a(std::string_view s);

/// Audit results for one model.  The audits are falsifiers, not provers: a
/// passing item means "no violation found at this sampling effort".
class CheckReport {
 public:
  std::string spec_fingerprint;
  std::uint64_t spec_hash = 0;  // fnv1a of the fingerprint
  std::map<std::string, double> tolerances;
  std::vector<CheckItem> items;

  /// Enforces that failed items carry a witness.
  void add(CheckItem item);

  CheckOutcome overall() const;  // failed dominates, then inconclusive
  bool all_passed() const { return overall() == CheckOutcome::passed; }

  std::string to_text() const;
  std::string to_json() const;
};

}  // namespace hjmm
