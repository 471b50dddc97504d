#include "sarfusion/io/report.hpp"

#include <algorithm>
#include <string>

#include "sarfusion/errors.hpp"
#include "sarfusion/io/files.hpp"

namespace sarfusion::io {

namespace {

const char* band_key(std::size_t b) {
  static constexpr const char* kKeys[] = {"band1", "band2", "band3"};
  return kKeys[b];
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

void Report::add(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }
void Report::add(std::string key, double value) { add(std::move(key), format_double(value)); }
void Report::add(std::string key, long long value) { add(std::move(key), std::to_string(value)); }
void Report::add(std::string key, const std::optional<double>& value) {
  add(std::move(key), value ? format_double(*value) : std::string("undefined"));
}

void Report::add_metrics(const MetricsReport& m) {
  add("metrics.scale", m.scale);
  for (std::size_t b = 0; b < 3; ++b) add(std::string("metrics.distortion.") + band_key(b), m.distortion[b]);
  add("metrics.distortion.overall", m.distortion_overall);
  for (std::size_t b = 0; b < 3; ++b) add(std::string("metrics.cc_ms.") + band_key(b), m.cc_ms[b]);
  add("metrics.cc_ms.mean", m.cc_ms_mean);
  for (std::size_t b = 0; b < 3; ++b) add(std::string("metrics.cc_sar.") + band_key(b), m.cc_sar[b]);
  add("metrics.cc_sar.mean", m.cc_sar_mean);
  add("metrics.cc.overall", m.cc_overall);
  for (std::size_t b = 0; b < 3; ++b) add(std::string("metrics.mse.") + band_key(b), m.mse[b]);
  add("metrics.mse.overall", m.mse_overall);
  for (std::size_t b = 0; b < 3; ++b) add(std::string("metrics.rmse.") + band_key(b), m.rmse[b]);
  add("metrics.rmse.overall", m.rmse_overall);
}

void Report::add_config(const RunConfig& cfg) {
  const auto& t = cfg.fusion.training;
  add("config.patch_side", static_cast<long long>(cfg.fusion.patch_side));
  add("config.stride", static_cast<long long>(cfg.fusion.stride));
  add("config.atom_count", static_cast<long long>(t.atom_count));
  add("config.sparsity", static_cast<long long>(t.sparsity));
  add("config.rounds", static_cast<long long>(t.rounds));
  add("config.seed", std::to_string(t.seed));
  add("config.residual_tol", t.residual_tol);
  add("config.refresh_empty_atoms", std::string(t.refresh_empty_atoms ? "true" : "false"));
  add("config.coefficient_scaling",
      std::string(t.scaling == CoefficientScaling::kLeastSquares ? "least_squares" : "unit_stack"));
  add("config.brovey_epsilon", cfg.fusion.brovey.epsilon);
  add("config.metric_scale", cfg.metric_scale);
}

void Report::add_trace(const TrainTrace& t) {
  add("trace.rounds", static_cast<long long>(t.rounds()));
  add("trace.initial_objective", t.initial_objective);
  add("trace.final_objective", t.objective.empty() ? t.initial_objective : t.objective.back());
  std::string values;
  long long empty_total = 0;
  long long degenerate_total = 0;
  for (std::size_t r = 0; r < t.rounds(); ++r) {
    if (r) values += ", ";
    values += format_double(t.objective[r]);
    empty_total += t.empty_atoms[r];
    degenerate_total += t.degenerate_updates[r];
  }
  add("trace.objective", values.empty() ? std::string("none") : values);
  add("trace.empty_atoms_total", empty_total);
  add("trace.degenerate_updates_total", degenerate_total);
  double worst = 0.0;
  for (double d : t.max_norm_deviation) worst = std::max(worst, d);
  add("trace.max_norm_deviation", worst);
}

void Report::add_brovey(const BroveyResult& b) {
  add("brovey.clipped_samples", static_cast<long long>(b.clipped_samples));
  add("brovey.dark_pixels", static_cast<long long>(b.dark_pixels));
}

std::string Report::str() const {
  std::string out = "# sarfusion report\n";
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

std::vector<std::pair<std::string, std::string>> Report::section(std::string_view prefix) const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : entries_) {
    if (std::string_view(e.first).starts_with(prefix)) out.push_back(e);
  }
  return out;
}

Report Report::parse(std::string_view text) {
  Report r;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find(" = ");
    if (eq == std::string_view::npos) throw DataError("malformed report line: " + std::string(line));
    r.add(std::string(line.substr(0, eq)), std::string(line.substr(eq + 3)));
  }
  return r;
}

void write_report(const Report& report, const std::filesystem::path& path) {
  write_atomically(path, report.str());
}

Report read_report(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return Report::parse(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace sarfusion::io
