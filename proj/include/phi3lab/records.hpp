#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace phi3lab {

// One output row of an experiment.  params must carry every input that
// affects value; wall_ms is informational and never enters the CSV, so
// reruns with the same config and seed are byte-identical there.
struct ExperimentRecord {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> params;  // insertion order
  double value = 0.0;
  std::optional<double> stderr_value;
  std::string error;  // nonempty marks a failed row
  std::uint64_t seed = 0;
  std::int64_t wall_ms = 0;

  void set(const std::string& key, const std::string& v);
  void set(const std::string& key, double v);
  const std::string* find(const std::string& key) const;
};

// Shortest round-trip decimal form (%.17g trimmed via parse-back check).
std::string format_real(double v);

// Compact JSON object for a labeled numeric breakdown; keys come out in
// map order, so serialization is deterministic.
std::string components_json(const std::map<std::string, double>& m);

// Fixed column set shared by every command:
// experiment,sigma,A,A_over_A0,regime,q,N,value,stderr,components_json,seed
std::string csv_header();
std::string csv_row(const ExperimentRecord& r);

std::string records_to_json(const std::vector<ExperimentRecord>& rs);

// Atomic append: existing content plus the new rows go to a temp file next
// to the target, which is then renamed over it.  CSV gains rows under a
// single header; JSON stays one merged array.
void append_records_csv(const std::string& path,
                        const std::vector<ExperimentRecord>& rs);
void append_records_json(const std::string& path,
                         const std::vector<ExperimentRecord>& rs);

}  // namespace phi3lab
