#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "camsim/error.hpp"
#include "camsim/experiments.hpp"

namespace fs = std::filesystem;

namespace {

int report(const camsim::CommandStatus& st, bool verbose) {
  if (verbose || st.exit_code != 0) {
    for (const auto& e : st.errors) std::cerr << "error: " << e << "\n";
  }
  return st.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"camsim: spectral camera simulation and detection-range experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  bool verbose = false;
  std::optional<std::uint64_t> seed;
  app.add_flag("-v,--verbose", verbose, "Print per-scene errors and warnings");
  app.add_option("--seed", seed, "Override the config seed");

  std::string config_path;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "Run config JSON")->required();
  };

  auto* synth = app.add_subcommand("synth", "Generate seeded scenes");
  add_config(synth);
  std::string synth_out;
  synth->add_option("out_dir", synth_out, "Output directory")->required();

  auto* run = app.add_subcommand("run", "Full pipeline over the configured scenes");
  add_config(run);
  auto* sweep_pixel = app.add_subcommand("sweep-pixel", "Pixel-size sweep");
  add_config(sweep_pixel);
  auto* sweep_exposure = app.add_subcommand("sweep-exposure", "Exposure plan and illuminance sweep");
  add_config(sweep_exposure);
  auto* edge = app.add_subcommand("edge-case", "Edge-case scene, centre-weighted vs bracketed");
  add_config(edge);

  auto* eval = app.add_subcommand("eval", "Score detections.json against dataset.json");
  std::string dets_path, dataset_path, eval_out;
  double bin_m = 10.0;
  std::optional<double> max_m;
  eval->add_option("detections", dets_path)->required();
  eval->add_option("dataset", dataset_path)->required();
  eval->add_option("out_dir", eval_out)->required();
  eval->add_option("--bin", bin_m, "Distance bin width in metres");
  eval->add_option("--max-distance", max_m, "Upper edge of the last bin");

  auto* plot = app.add_subcommand("plot", "Render metrics CSVs as one SVG");
  std::vector<std::string> csvs, labels;
  std::string svg_out, title = "AP vs distance";
  plot->add_option("csv", csvs, "metrics.csv files")->required();
  plot->add_option("-o,--out", svg_out, "Output SVG")->required();
  plot->add_option("-l,--label", labels, "Series labels, in CSV order");
  plot->add_option("--title", title);

  CLI11_PARSE(app, argc, argv);

  try {
    auto load = [&] {
      camsim::RunConfig cfg = camsim::load_run_config(config_path);
      if (seed) cfg.seed = *seed;
      return cfg;
    };
    if (synth->parsed()) return report(camsim::cmd_synth(load(), synth_out), verbose);
    if (run->parsed()) return report(camsim::cmd_run(load()), verbose);
    if (sweep_pixel->parsed()) return report(camsim::cmd_sweep_pixel(load()), verbose);
    if (sweep_exposure->parsed()) return report(camsim::cmd_sweep_exposure(load()), verbose);
    if (edge->parsed()) return report(camsim::cmd_edge_case(load()), verbose);
    if (eval->parsed()) return report(camsim::cmd_eval(dets_path, dataset_path, eval_out, bin_m, max_m), verbose);
    if (plot->parsed()) {
      std::vector<fs::path> paths(csvs.begin(), csvs.end());
      return report(camsim::cmd_plot(paths, labels, svg_out, title), verbose);
    }
  } catch (const camsim::Error& e) {
    if (e.code() == camsim::ErrorCode::kConfig) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    }
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
