#include <CLI11.hpp>

#include <iostream>

#include "wide/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Wavelet-domain feature extraction and recommendation for two-class signal data"};
  app.require_subcommand(1);

  wide::CliOverrides o;
  std::string manifest;
  std::string config;
  std::string out;
  std::string report_dir;

  auto add_run_options = [&](CLI::App* sub) {
    sub->add_option("--manifest", manifest, "Dataset manifest (JSON)")->required();
    sub->add_option("--config", config, "Run config (JSON)");
    sub->add_option("--out", out, "Output root (default $WIDE_OUT_DIR or ./wide_runs)");
    sub->add_option("--tau", o.tau, "Target metric threshold");
    sub->add_option("--folds", o.folds, "Number of stratified folds");
    sub->add_option("--seed", o.seed, "Fold assignment seed");
    sub->add_option("--k", o.k, "Feature-count schedule")->delimiter(',');
    sub->add_option("--metric", o.metric, "accuracy|sensitivity|specificity|precision|f_score");
    sub->add_option("--max-level", o.max_level, "Highest feature level (0-2)");
  };
  auto* extract = app.add_subcommand("extract", "Extract the feature matrix");
  auto* recommend = app.add_subcommand("recommend", "Recommend feature sets");
  auto* baseline = app.add_subcommand("baseline-pca", "PCA + SVM baseline");
  auto* report = app.add_subcommand("report", "Compare finished runs");
  for (auto* sub : {extract, recommend, baseline}) add_run_options(sub);
  report->add_option("dir", report_dir, "Directory of runs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const std::optional<std::filesystem::path> config_path =
        config.empty() ? std::nullopt : std::optional<std::filesystem::path>(config);
    const std::filesystem::path out_dir = out.empty() ? wide::default_out_dir() : std::filesystem::path(out);
    wide::RunArtifacts a;
    if (*extract) {
      a = wide::cmd_extract(manifest, config_path, out_dir, o, std::cout);
    } else if (*recommend) {
      a = wide::cmd_recommend(manifest, config_path, out_dir, o, std::cout);
    } else if (*baseline) {
      a = wide::cmd_baseline_pca(manifest, config_path, out_dir, o, std::cout);
    } else {
      wide::cmd_report(report_dir, std::cout);
      return 0;
    }
    std::cout << "run " << a.run_id << " written to " << a.dir.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return wide::exit_code_for(e);
  }
  return 0;
}
