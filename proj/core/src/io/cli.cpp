#include "sarfusion/io/cli.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "sarfusion/baselines.hpp"
#include "sarfusion/errors.hpp"
#include "sarfusion/fusion.hpp"
#include "sarfusion/io/dictionary_file.hpp"
#include "sarfusion/io/image_io.hpp"
#include "sarfusion/io/report.hpp"
#include "sarfusion/io/run_config.hpp"
#include "sarfusion/metrics.hpp"

namespace sarfusion::io {

namespace {

/// Flags that map one-to-one onto configuration keys. Values are kept as
/// strings and applied through set_config_value so they get the same
/// validation as the config file.
class Overrides {
 public:
  void attach(CLI::App& cmd, bool training) {
    add(cmd, "--epsilon", "brovey_epsilon", "Brovey band-sum guard");
    add(cmd, "--metric-scale", "metric_scale", "Metric reporting scale");
    add(cmd, "--depth", "output_depth", "Output bit depth (8 or 16; 0 = input depth)");
    if (!training) return;
    add(cmd, "--patch-side", "patch_side", "Patch side in pixels");
    add(cmd, "--stride", "stride", "Patch stride in pixels");
    add(cmd, "--atoms", "atom_count", "Dictionary atoms A");
    add(cmd, "--sparsity", "sparsity", "Non-zeros per code H0");
    add(cmd, "--rounds", "rounds", "Training rounds R");
    add(cmd, "--seed", "seed", "Random seed");
    add(cmd, "--tol", "residual_tol", "OMP residual tolerance");
    add(cmd, "--threads", "threads", "Worker threads for sparse coding");
    add(cmd, "--scaling", "coefficient_scaling", "least_squares or unit_stack");
  }

  void apply(RunConfig& cfg) const {
    for (const auto& [key, value] : values_) {
      if (value) set_config_value(cfg, key, *value);
    }
  }

 private:
  void add(CLI::App& cmd, const std::string& flag, const std::string& key, const std::string& help) {
    auto& slot = values_[key];
    cmd.add_option_function<std::string>(flag, [&slot](const std::string& v) { slot = v; }, help);
  }

  std::map<std::string, std::optional<std::string>> values_;
};

struct CommonArgs {
  std::string ms;
  std::string sar;
  std::string out;
  std::string config;
  std::string report;
};

RunConfig resolve_config(const CommonArgs& args, const Overrides& overrides) {
  RunConfig cfg;
  if (!args.config.empty()) cfg = load_config(args.config);
  overrides.apply(cfg);
  if (!args.ms.empty()) cfg.ms_path = args.ms;
  if (!args.sar.empty()) cfg.sar_path = args.sar;
  if (!args.out.empty()) cfg.output_path = args.out;
  cfg.validate();
  if (cfg.ms_path.empty() || cfg.sar_path.empty()) throw ConfigError("--ms and --sar are required");
  if (cfg.output_path.empty()) throw ConfigError("--out is required");
  return cfg;
}

int output_depth(const RunConfig& cfg, const MultiBandImage& ms) {
  return cfg.output_depth != 0 ? cfg.output_depth : ms.bit_depth_origin();
}

void warn_small_training_set(const RunConfig& cfg, const MultiBandImage& ms, std::ostream& err) {
  if (ms.height() < cfg.fusion.patch_side || ms.width() < cfg.fusion.patch_side) return;
  const auto grid = build_patch_grid(ms.height(), ms.width(), cfg.fusion.patch_side, cfg.fusion.stride);
  if (static_cast<int>(grid.size()) < cfg.fusion.training.atom_count) {
    err << "warning: " << grid.size() << " patches for " << cfg.fusion.training.atom_count
        << " atoms; some atoms start from random vectors\n";
  }
}

void print_trace(const TrainTrace& trace, std::ostream& err) {
  double seconds = 0.0;
  for (double s : trace.seconds) seconds += s;
  err << "training: " << trace.rounds() << " rounds, objective "
      << format_double(trace.initial_objective) << " -> "
      << format_double(trace.objective.empty() ? trace.initial_objective : trace.objective.back())
      << ", " << seconds << " s\n";
}

int cmd_fuse(const CommonArgs& args, const Overrides& overrides, const std::string& save_dict,
             const std::string& dict_in, std::ostream& err) {
  const RunConfig cfg = resolve_config(args, overrides);
  const auto ms = load_image(cfg.ms_path);
  const auto sar = load_image(cfg.sar_path);

  FusionResult result;
  if (!dict_in.empty()) {
    result = fuse_with_dictionary(ms, sar, load_dictionary(dict_in), cfg.fusion);
  } else {
    warn_small_training_set(cfg, ms, err);
    result = fuse_pipeline(ms, sar, cfg.fusion);
    print_trace(result.trace, err);
  }
  const int depth = output_depth(cfg, ms);
  const auto fused = quantize(result.fused, depth);
  save_image(fused, cfg.output_path, depth);
  if (!save_dict.empty()) save_dictionary(result.dictionary, save_dict);
  if (!args.report.empty()) {
    Report report;
    report.add("command", std::string("fuse"));
    report.add_config(cfg);
    report.add("output.depth", static_cast<long long>(depth));
    report.add("patches.count", static_cast<long long>(result.grid.size()));
    long long ms_patches = 0;
    for (auto l : result.labels) ms_patches += l == PatchLabel::kMultispectral;
    report.add("patches.multispectral", ms_patches);
    report.add("mask.mean", result.mask.plane.mean());
    report.add_brovey(result.brovey);
    report.add_trace(result.trace);
    report.add_metrics(metrics_report(fused, ms, sar, cfg.metric_scale));
    write_report(report, args.report);
  }
  return kExitOk;
}

int cmd_train(const CommonArgs& args, const Overrides& overrides, std::ostream& err) {
  const RunConfig cfg = resolve_config(args, overrides);
  const auto ms = load_image(cfg.ms_path);
  const auto sar = load_image(cfg.sar_path);
  warn_small_training_set(cfg, ms, err);
  const auto trained = train_on_images(ms, sar, cfg.fusion);
  print_trace(trained.trace, err);
  save_dictionary(trained.dictionary, cfg.output_path);
  if (!args.report.empty()) {
    Report report;
    report.add("command", std::string("train-dict"));
    report.add_config(cfg);
    report.add_trace(trained.trace);
    write_report(report, args.report);
  }
  return kExitOk;
}

int cmd_evaluate(const std::string& fused_path, const CommonArgs& args, const Overrides& overrides) {
  RunConfig cfg;
  if (!args.config.empty()) cfg = load_config(args.config);
  overrides.apply(cfg);
  cfg.validate();
  const auto fused = load_image(fused_path);
  const auto ms = load_image(args.ms);
  const auto sar = load_image(args.sar);
  Report report;
  report.add("command", std::string("evaluate"));
  report.add_metrics(metrics_report(fused, ms, sar, cfg.metric_scale));
  write_report(report, args.report);
  return kExitOk;
}

int cmd_baseline(const std::string& method, bool no_match, const CommonArgs& args,
                 const Overrides& overrides) {
  RunConfig cfg = resolve_config(args, overrides);
  cfg.baseline = parse_baseline(method);
  if (no_match) cfg.pca_match = false;
  const auto ms = load_image(cfg.ms_path);
  const auto sar = load_image(cfg.sar_path);

  Report report;
  report.add("command", std::string("baseline"));
  report.add("baseline.method", std::string(to_string(cfg.baseline)));
  std::optional<MultiBandImage> out;
  switch (cfg.baseline) {
    case BaselineMethod::kBrovey: {
      auto b = brovey_fuse(ms, sar, cfg.fusion.brovey);
      report.add_brovey(b);
      out = std::move(b.image);
      break;
    }
    case BaselineMethod::kPca:
      report.add("baseline.pca_match", std::string(cfg.pca_match ? "true" : "false"));
      out = pca_fuse(ms, sar, {cfg.pca_match});
      break;
    case BaselineMethod::kHsv:
      out = hsv_fuse(ms, sar);
      break;
  }
  const int depth = output_depth(cfg, ms);
  const auto fused = quantize(*out, depth);
  save_image(fused, cfg.output_path, depth);
  if (!args.report.empty()) {
    report.add_metrics(metrics_report(fused, ms, sar, cfg.metric_scale));
    write_report(report, args.report);
  }
  return kExitOk;
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidArgument*>(&e) ||
      dynamic_cast<const DimensionError*>(&e) || dynamic_cast<const BandCountError*>(&e)) {
    return kExitConfig;
  }
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const UnsupportedFormat*>(&e) ||
      dynamic_cast<const ChecksumError*>(&e) || dynamic_cast<const VersionError*>(&e)) {
    return kExitIo;
  }
  return kExitNumerical;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"SAR and multispectral pseudo-color fusion with coupled dictionaries", "sarfuse"};
  app.require_subcommand(1);

  CommonArgs common;
  Overrides overrides;
  std::string save_dict;
  std::string dict_in;
  std::string fused_path;
  std::string method = "brovey";
  bool no_match = false;

  auto* fuse = app.add_subcommand("fuse", "Run the full fusion pipeline");
  fuse->add_option("--ms", common.ms, "3-band multispectral image")->required();
  fuse->add_option("--sar", common.sar, "1-band SAR image")->required();
  fuse->add_option("--out", common.out, "Fused image output (.png/.tif)")->required();
  fuse->add_option("--config", common.config, "key = value configuration file");
  fuse->add_option("--save-dict", save_dict, "Write the trained dictionary");
  fuse->add_option("--dict", dict_in, "Use a trained dictionary instead of training");
  fuse->add_option("--report", common.report, "Write a metrics report");
  overrides.attach(*fuse, true);

  auto* train_cmd = app.add_subcommand("train-dict", "Train the coupled dictionary only");
  train_cmd->add_option("--ms", common.ms, "3-band multispectral image")->required();
  train_cmd->add_option("--sar", common.sar, "1-band SAR image")->required();
  train_cmd->add_option("--out", common.out, "Dictionary output file")->required();
  train_cmd->add_option("--config", common.config, "key = value configuration file");
  train_cmd->add_option("--report", common.report, "Write a training report");
  overrides.attach(*train_cmd, true);

  auto* evaluate = app.add_subcommand("evaluate", "Compute quality metrics of a fused image");
  evaluate->add_option("--fused", fused_path, "Fused image")->required();
  evaluate->add_option("--ms", common.ms, "Multispectral reference")->required();
  evaluate->add_option("--sar", common.sar, "SAR reference")->required();
  evaluate->add_option("--report", common.report, "Report output")->required();
  evaluate->add_option("--config", common.config, "key = value configuration file");
  overrides.attach(*evaluate, false);

  auto* baseline = app.add_subcommand("baseline", "Component-substitution baseline fusion");
  baseline->add_option("--method", method, "brovey, pca or hsv")
      ->check(CLI::IsMember({"brovey", "pca", "hsv"}));
  baseline->add_option("--ms", common.ms, "3-band multispectral image")->required();
  baseline->add_option("--sar", common.sar, "1-band SAR image")->required();
  baseline->add_option("--out", common.out, "Fused image output (.png/.tif)")->required();
  baseline->add_option("--config", common.config, "key = value configuration file");
  baseline->add_option("--report", common.report, "Write a metrics report");
  baseline->add_flag("--no-match", no_match, "PCA: substitute the SAR band without mean/std matching");
  overrides.attach(*baseline, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (fuse->parsed()) return cmd_fuse(common, overrides, save_dict, dict_in, err);
    if (train_cmd->parsed()) return cmd_train(common, overrides, err);
    if (evaluate->parsed()) return cmd_evaluate(fused_path, common, overrides);
    if (baseline->parsed()) return cmd_baseline(method, no_match, common, overrides);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}

}  // namespace sarfusion::io
