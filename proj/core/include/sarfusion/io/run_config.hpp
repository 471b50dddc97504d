#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "sarfusion/fusion.hpp"

namespace sarfusion::io {

enum class BaselineMethod { kBrovey, kPca, kHsv };

std::string_view to_string(BaselineMethod m);
BaselineMethod parse_baseline(std::string_view name);

/// Everything a command run needs. Defaults: s=8, stride=4, A=256, H0=4,
/// R=20, tol=1e-8, epsilon=1e-6, seed=42.
struct RunConfig {
  std::filesystem::path ms_path;
  std::filesystem::path sar_path;
  std::filesystem::path output_path;

  FusionConfig fusion;
  double metric_scale = 255.0;
  BaselineMethod baseline = BaselineMethod::kBrovey;
  bool pca_match = true;
  /// 0 keeps the multispectral input's depth.
  int output_depth = 0;

  void validate() const;
};

/// Applies `key = value` lines (with `#` comments) on top of `base`. Unknown
/// keys and malformed values raise ConfigError.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Applies a single key/value pair; used by both the file parser and CLI flags.
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace sarfusion::io
