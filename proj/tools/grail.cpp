// grail: goal recognition from demonstrations.
//
// Subcommands:
//   gen-demos --config F [--out DIR]        write demonstration JSONL files
//   train     --config F [--seed-index N]   train policy banks for one seed
//   infer     --bank DIR --traj FILE ...    one-shot goal inference
//   eval      --config F                    run the full evaluation grid
//   report    --dir D                       render result tables
//   heatmap   --bank DIR --out F            Q-learning visit-count export
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "grail/config.hpp"
#include "grail/harness.hpp"
#include "grail/recognizer.hpp"
#include "grail/traj_io.hpp"
#include "grail/version.hpp"

namespace fs = std::filesystem;
using namespace grail;

namespace {

int cmd_gen_demos(const std::string& config_path, std::string out_dir) {
  const ExperimentConfig c = load_config(config_path);
  if (out_dir.empty()) out_dir = (fs::path(c.out_dir) / "demos").string();
  fs::create_directories(out_dir);
  for (int k = 0; k < c.seeds; ++k) {
    const std::uint64_t run_seed = derive_seed(c.master_seed, "seed/" + std::to_string(k));
    const DemoSet demos = generate_demos(c, run_seed);
    for (const auto& g : c.goals) {
      const std::string name = to_string(c.env) + "_" + g.label + "_" + c.regime + "_" +
                               std::to_string(k) + ".jsonl";
      write_trajectories((fs::path(out_dir) / name).string(), demos.per_goal.at(g.index));
    }
  }
  std::cout << "wrote demonstrations for " << c.seeds << " seeds to " << out_dir << '\n';
  return 0;
}

int cmd_train(const std::string& config_path, int seed_index, std::string out_dir) {
  const ExperimentConfig c = load_config(config_path);
  if (out_dir.empty()) out_dir = (fs::path(c.out_dir) / "banks").string();
  const std::uint64_t run_seed =
      derive_seed(c.master_seed, "seed/" + std::to_string(seed_index));

  const DemoSet all = generate_demos(c, run_seed);
  DemoSet train;
  std::map<int, std::vector<Trajectory>> test;
  split_demos(c, all, train, test);

  TrainInputs inputs;
  inputs.env = c.env;
  inputs.grid = c.grid;
  inputs.reach = c.reach;
  inputs.goals = c.goals;
  inputs.demos = &train;
  inputs.horizon = c.horizon;
  const int threads =
      c.threads > 0 ? c.threads : std::max(1u, std::thread::hardware_concurrency());

  for (const auto learner : c.learners) {
    const PolicyBank bank = train_bank(inputs, learner, c.hp, run_seed, threads);
    const auto dir =
        fs::path(out_dir) / (to_string(learner) + "_seed" + std::to_string(seed_index));
    save_bank(bank, dir.string());
    std::cout << "saved " << to_string(learner) << " bank (" << bank.entries.size()
              << " goals) to " << dir.string() << '\n';
  }
  return 0;
}

int cmd_infer(const std::string& bank_dir, const std::string& traj_file, double fraction,
              const std::string& metric_name, int index, const std::string& basis_name,
              std::uint64_t seed) {
  const PolicyBank bank = load_bank(bank_dir);
  const auto trajs = read_trajectories(traj_file);
  if (index < 0 || index >= static_cast<int>(trajs.size()))
    throw std::runtime_error("trajectory index out of range (file has " +
                             std::to_string(trajs.size()) + " lines)");
  ScoreParams params;
  params.metric = metric_from_string(metric_name);
  const auto prefix = observe_prefix(trajs[static_cast<std::size_t>(index)], fraction,
                                     prefix_basis_from_string(basis_name));
  RngStream rng = derive_stream(seed, "infer/cli");
  const ScoreReport report = infer_goal(prefix, bank, params, rng);
  std::cout << report.to_json().dump() << '\n';
  return 0;
}

int cmd_eval(const std::string& config_path) {
  const ExperimentConfig c = load_config(config_path);
  const ExperimentOutput out = run_experiment(c);
  std::cout << "raw:        " << out.raw_csv.string() << '\n'
            << "aggregated: " << out.aggregated_csv.string() << '\n'
            << "manifest:   " << out.manifest.string() << '\n';
  if (!out.failures.empty()) {
    for (const auto& f : out.failures) std::cerr << "failure: " << f << '\n';
    return 2;
  }
  return 0;
}

int cmd_report(const std::string& dir) {
  const auto [txt, md] = render_report(dir);
  std::ofstream(fs::path(dir) / "report.txt", std::ios::binary) << txt;
  std::ofstream(fs::path(dir) / "report.md", std::ios::binary) << md;
  std::cout << txt;
  return 0;
}

int cmd_heatmap(const std::string& bank_dir, const std::string& out_file) {
  const PolicyBank bank = load_bank(bank_dir);
  export_visit_heatmap(bank, out_file);
  std::cout << "wrote " << out_file << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"goal recognition from demonstrations"};
  app.set_version_flag("--version", kGrailVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir, bank_dir, traj_file, results_dir, out_file;
  std::string metric_name = "mse", basis_name = "meaningful";
  double fraction = 0.3;
  int seed_index = 0, traj_index = 0;
  std::uint64_t infer_seed = 0;

  auto* gen = app.add_subcommand("gen-demos", "write demonstration JSONL files");
  gen->add_option("--config", config_path, "experiment config file")->required();
  gen->add_option("--out", out_dir, "output directory (default: {out_dir}/demos)");

  auto* train = app.add_subcommand("train", "train policy banks for one seed");
  train->add_option("--config", config_path, "experiment config file")->required();
  train->add_option("--seed-index", seed_index, "seed index (default 0)");
  train->add_option("--out", out_dir, "output directory (default: {out_dir}/banks)");

  auto* infer = app.add_subcommand("infer", "score a trajectory prefix against a bank");
  infer->add_option("--bank", bank_dir, "policy bank directory")->required();
  infer->add_option("--traj", traj_file, "trajectory JSONL file")->required();
  infer->add_option("--fraction", fraction, "observability fraction in (0,1]")->required();
  infer->add_option("--metric", metric_name, "mse | kl | w1")->required();
  infer->add_option("--index", traj_index, "trajectory line index (default 0)");
  infer->add_option("--basis", basis_name, "prefix basis: meaningful | horizon");
  infer->add_option("--seed", infer_seed, "stream seed for sampled metrics (w1)");

  auto* eval = app.add_subcommand("eval", "run the configured evaluation grid");
  eval->add_option("--config", config_path, "experiment config file")->required();

  auto* report = app.add_subcommand("report", "render tables from aggregated results");
  report->add_option("--dir", results_dir, "results directory")->required();

  auto* heatmap = app.add_subcommand("heatmap", "export Q-learning visit counts");
  heatmap->add_option("--bank", bank_dir, "policy bank directory")->required();
  heatmap->add_option("--out", out_file, "output CSV path")->required();

  try {
    app.parse(argc, argv);
    if (gen->parsed()) return cmd_gen_demos(config_path, out_dir);
    if (train->parsed()) return cmd_train(config_path, seed_index, out_dir);
    if (infer->parsed())
      return cmd_infer(bank_dir, traj_file, fraction, metric_name, traj_index, basis_name,
                       infer_seed);
    if (eval->parsed()) return cmd_eval(config_path);
    if (report->parsed()) return cmd_report(results_dir);
    if (heatmap->parsed()) return cmd_heatmap(bank_dir, out_file);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const MetricCompatibilityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
