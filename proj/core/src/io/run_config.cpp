#include "sarfusion/io/run_config.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include "sarfusion/errors.hpp"
#include "sarfusion/io/files.hpp"

namespace sarfusion::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

int parse_int(std::string_view key, std::string_view value) { return parse_number<int>(key, value); }

double parse_real(std::string_view key, std::string_view value) {
  const double v = parse_number<double>(key, value);
  if (!std::isfinite(v)) throw ConfigError("non-finite value for " + std::string(key));
  return v;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("invalid boolean '" + std::string(value) + "' for " + std::string(key));
}

}  // namespace

std::string_view to_string(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::kBrovey: return "brovey";
    case BaselineMethod::kPca: return "pca";
    case BaselineMethod::kHsv: return "hsv";
  }
  return "brovey";
}

BaselineMethod parse_baseline(std::string_view name) {
  if (name == "brovey") return BaselineMethod::kBrovey;
  if (name == "pca") return BaselineMethod::kPca;
  if (name == "hsv") return BaselineMethod::kHsv;
  throw ConfigError("unknown baseline method '" + std::string(name) + "'");
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  auto& t = cfg.fusion.training;
  if (key == "ms") {
    cfg.ms_path = std::string(value);
  } else if (key == "sar") {
    cfg.sar_path = std::string(value);
  } else if (key == "out") {
    cfg.output_path = std::string(value);
  } else if (key == "patch_side") {
    cfg.fusion.patch_side = parse_int(key, value);
  } else if (key == "stride") {
    cfg.fusion.stride = parse_int(key, value);
  } else if (key == "atom_count") {
    t.atom_count = parse_int(key, value);
  } else if (key == "sparsity") {
    t.sparsity = parse_int(key, value);
  } else if (key == "rounds") {
    t.rounds = parse_int(key, value);
  } else if (key == "seed") {
    t.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "residual_tol") {
    t.residual_tol = parse_real(key, value);
  } else if (key == "threads") {
    t.threads = parse_int(key, value);
  } else if (key == "refresh_empty_atoms") {
    t.refresh_empty_atoms = parse_bool(key, value);
  } else if (key == "coefficient_scaling") {
    if (value == "least_squares") {
      t.scaling = CoefficientScaling::kLeastSquares;
    } else if (value == "unit_stack") {
      t.scaling = CoefficientScaling::kUnitStack;
    } else {
      throw ConfigError("coefficient_scaling must be least_squares or unit_stack");
    }
  } else if (key == "brovey_epsilon") {
    cfg.fusion.brovey.epsilon = parse_real(key, value);
  } else if (key == "metric_scale") {
    cfg.metric_scale = parse_real(key, value);
  } else if (key == "baseline") {
    cfg.baseline = parse_baseline(value);
  } else if (key == "pca_match") {
    cfg.pca_match = parse_bool(key, value);
  } else if (key == "output_depth") {
    cfg.output_depth = parse_int(key, value);
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
    }
    set_config_value(base, key, value);
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  const auto bytes = read_file(path);
  return parse_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                      std::move(base));
}

void RunConfig::validate() const {
  try {
    fusion.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.message());
  }
  if (!(metric_scale > 0.0)) throw ConfigError("metric_scale must be > 0");
  if (output_depth != 0 && output_depth != 8 && output_depth != 16) {
    throw ConfigError("output_depth must be 0, 8 or 16");
  }
}

}  // namespace sarfusion::io
