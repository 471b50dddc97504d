#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sarfusion/brovey.hpp"
#include "sarfusion/cdl.hpp"
#include "sarfusion/metrics.hpp"
#include "sarfusion/io/run_config.hpp"

namespace sarfusion::io {

/// Ordered `key = value` document. Keys are dotted paths such as
/// `metrics.distortion.overall`; undefined values are written as `undefined`.
class Report {
 public:
  void add(std::string key, std::string value);
  void add(std::string key, double value);
  void add(std::string key, long long value);
  void add(std::string key, const std::optional<double>& value);

  void add_metrics(const MetricsReport& m);
  void add_config(const RunConfig& cfg);
  /// Objective values and atom statistics; wall-clock times are left out so
  /// reports stay byte-identical across runs.
  void add_trace(const TrainTrace& t);
  void add_brovey(const BroveyResult& b);

  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }
  std::string str() const;

  /// Entries whose key starts with `prefix`.
  std::vector<std::pair<std::string, std::string>> section(std::string_view prefix) const;

  static Report parse(std::string_view text);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

void write_report(const Report& report, const std::filesystem::path& path);
Report read_report(const std::filesystem::path& path);

}  // namespace sarfusion::io
