#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qurate/commands.hpp"
#include "qurate/config.hpp"

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_dir;
  int64_t seed = -1;
  unsigned workers = 0;
  bool mock = false;
};

qurate::cli::RunConfig resolve_config(const GlobalArgs& args) {
  qurate::cli::RunConfig config = args.config_path.empty()
                                      ? qurate::cli::default_config()
                                      : qurate::cli::load_config(args.config_path);
  if (args.seed >= 0) config.seed = uint64_t(args.seed);
  if (args.workers > 0) config.workers = args.workers;
  if (args.mock) config.mock.enabled = true;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reliability-guided curation of weakly annotated text via "
               "per-frame QUBO subset selection"};
  app.require_subcommand(1);

  GlobalArgs args;
  app.add_option("--config", args.config_path, "Run configuration (JSON)");
  app.add_option("--seed", args.seed, "Override the config seed");
  app.add_option("--out", args.out_dir, "Output directory");
  app.add_option("--workers", args.workers, "Worker threads");
  app.add_flag("--mock", args.mock, "Use the deterministic mock backends");

  std::string method = "qubo";

  auto* demo = app.add_subcommand(
      "demo", "Generate the planted-signal synthetic corpus and gold set");
  auto* annotate = app.add_subcommand(
      "annotate", "Run the two-labeler + critic protocol over the pool");
  auto* score = app.add_subcommand(
      "score", "Train the reliability discriminator and score the pool");
  auto* select = app.add_subcommand(
      "select", "Select per-frame subsets (QUBO or DistMatch)");
  select->add_option("--method", method, "qubo or distmatch")
      ->check(CLI::IsMember({"qubo", "distmatch"}));
  auto* sweep = app.add_subcommand(
      "sweep", "Lambda grid sweep with Pareto flags and the delta-F1 map");
  auto* transfer = app.add_subcommand(
      "transfer", "Seven-configuration downstream sentiment experiment");

  for (auto* sub : {demo, annotate, score, select, sweep, transfer}) {
    sub->fallthrough();
  }

  CLI11_PARSE(app, argc, argv);

  try {
    qurate::cli::RunConfig config = resolve_config(args);
    if (demo->parsed()) return qurate::cli::cmd_demo(config, args.out_dir);
    if (annotate->parsed())
      return qurate::cli::cmd_annotate(config, args.out_dir);
    if (score->parsed()) return qurate::cli::cmd_score(config, args.out_dir);
    if (select->parsed()) {
      auto m = method == "qubo" ? qurate::eval::Method::qubo
                                : qurate::eval::Method::distmatch;
      return qurate::cli::cmd_select(config, args.out_dir, m);
    }
    if (sweep->parsed()) return qurate::cli::cmd_sweep(config, args.out_dir);
    if (transfer->parsed())
      return qurate::cli::cmd_transfer(config, args.out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no subcommand\n";
  return 1;
}
