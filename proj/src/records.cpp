#include "phi3lab/records.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "phi3lab/errors.hpp"

namespace phi3lab {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += "\"";
  return out;
}

std::string error_marker(const std::string& msg) {
  std::string clean = msg;
  for (char& c : clean)
    if (c == '\n' || c == '\r') c = ' ';
  return "ERROR(" + clean + ")";
}

std::string read_all(const std::string& path, bool& existed) {
  std::ifstream in(path, std::ios::binary);
  existed = in.good();
  if (!existed) return "";
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoFailure("cannot read " + path);
  return buf.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open " + tmp + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoFailure("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw IoFailure("cannot rename " + tmp + " over " + path);
}

ordered_json record_json(const ExperimentRecord& r) {
  ordered_json j;
  j["experiment"] = r.experiment;
  ordered_json p = ordered_json::object();
  for (const auto& kv : r.params) p[kv.first] = kv.second;
  j["params"] = p;
  if (r.error.empty() && std::isfinite(r.value))
    j["value"] = r.value;
  else
    j["value"] = nullptr;
  if (r.stderr_value)
    j["stderr"] = *r.stderr_value;
  else
    j["stderr"] = nullptr;
  if (!r.error.empty()) j["error"] = r.error;
  j["seed"] = r.seed;
  j["wall_ms"] = r.wall_ms;
  return j;
}

}  // namespace

void ExperimentRecord::set(const std::string& key, const std::string& v) {
  for (auto& kv : params)
    if (kv.first == key) {
      kv.second = v;
      return;
    }
  params.emplace_back(key, v);
}

void ExperimentRecord::set(const std::string& key, double v) {
  set(key, format_real(v));
}

const std::string* ExperimentRecord::find(const std::string& key) const {
  for (const auto& kv : params)
    if (kv.first == key) return &kv.second;
  return nullptr;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

std::string components_json(const std::map<std::string, double>& m) {
  ordered_json j = ordered_json::object();
  for (const auto& kv : m) {
    if (std::isfinite(kv.second))
      j[kv.first] = kv.second;
    else
      j[kv.first] = format_real(kv.second);
  }
  return j.dump();
}

std::string csv_header() {
  return "experiment,sigma,A,A_over_A0,regime,q,N,value,stderr,"
         "components_json,seed";
}

std::string csv_row(const ExperimentRecord& r) {
  auto col = [&](const char* key) {
    const std::string* v = r.find(key);
    return v ? csv_escape(*v) : std::string();
  };
  std::string value_col = r.error.empty() ? format_real(r.value)
                                          : error_marker(r.error);
  std::string stderr_col =
      r.stderr_value ? format_real(*r.stderr_value) : std::string();
  std::string row;
  row += csv_escape(r.experiment);
  row += "," + col("sigma");
  row += "," + col("A");
  row += "," + col("A_over_A0");
  row += "," + col("regime");
  row += "," + col("q");
  row += "," + col("N");
  row += "," + csv_escape(value_col);
  row += "," + stderr_col;
  row += "," + col("components_json");
  row += "," + std::to_string(r.seed);
  return row;
}

std::string records_to_json(const std::vector<ExperimentRecord>& rs) {
  ordered_json arr = ordered_json::array();
  for (const ExperimentRecord& r : rs) arr.push_back(record_json(r));
  return arr.dump(2);
}

void append_records_csv(const std::string& path,
                        const std::vector<ExperimentRecord>& rs) {
  bool existed = false;
  std::string content = read_all(path, existed);
  if (!existed || content.empty()) content = csv_header() + "\n";
  if (!content.empty() && content.back() != '\n') content += "\n";
  for (const ExperimentRecord& r : rs) content += csv_row(r) + "\n";
  write_atomic(path, content);
}

void append_records_json(const std::string& path,
                         const std::vector<ExperimentRecord>& rs) {
  bool existed = false;
  const std::string content = read_all(path, existed);
  ordered_json arr = ordered_json::array();
  if (existed && !content.empty()) {
    arr = ordered_json::parse(content, nullptr, false);
    if (arr.is_discarded() || !arr.is_array())
      throw IoFailure(path + " does not hold a record array");
  }
  for (const ExperimentRecord& r : rs) arr.push_back(record_json(r));
  write_atomic(path, arr.dump(2));
}

}  // namespace phi3lab
