#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "grail/bank.hpp"
#include "grail/demogen.hpp"
#include "grail/grid_env.hpp"
#include "grail/learners/hyperparams.hpp"
#include "grail/planner.hpp"
#include "grail/reach_env.hpp"
#include "grail/recognizer.hpp"
#include "grail/scoring.hpp"
#include "grail/types.hpp"

namespace grail {

/// Invalid experiment configuration; the CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::vector<GoalId> goal_preset(const std::string& name) {
  if (name == "grid2") return {make_grid_goal(0, 7, 1), make_grid_goal(1, 7, 7)};
  if (name == "grid4")
    return {make_grid_goal(0, 7, 1), make_grid_goal(1, 7, 7), make_grid_goal(2, 7, 3),
            make_grid_goal(3, 7, 5)};
  if (name == "grid6")
    return {make_grid_goal(0, 7, 1), make_grid_goal(1, 7, 7), make_grid_goal(2, 7, 3),
            make_grid_goal(3, 7, 5), make_grid_goal(4, 5, 1), make_grid_goal(5, 5, 7)};
  if (name == "reach4")
    return {make_reach_goal(0), make_reach_goal(1), make_reach_goal(2), make_reach_goal(3)};
  throw ConfigError("unknown goal preset: " + name);
}

struct ExperimentConfig {
  EnvKind env = EnvKind::grid;
  std::string goals_name = "grid2";
  std::vector<GoalId> goals = goal_preset("grid2");
  std::string regime = "biased";  // optimal | biased | suboptimal | noise
  NoiseSpec::Kind noise_kind = NoiseSpec::Kind::gaussian;
  double noise_level = 0.0;  // regime "noise" only; 0 disables
  double turn_insertion_p = 0.5;
  std::vector<LearnerKind> learners{LearnerKind::bc};
  std::vector<ScoreMetric> metrics{ScoreMetric::neg_mse};
  std::vector<double> fractions{0.2, 0.3, 0.4};
  PrefixBasis prefix_basis = PrefixBasis::meaningful;
  int demos_per_goal = 10;
  int train_per_goal = 7;
  int seeds = 10;
  std::uint64_t master_seed = 42;
  std::size_t horizon = 50;
  GridSpec grid;
  ReachSpec reach;
  LearnerHyperparams hp;
  double kl_eps = 0.01;
  std::string kl_direction = "policy_to_pseudo";
  int w1_samples = 16;
  std::string out_dir = "results";
  int threads = 0;  // 0 = hardware concurrency

  ScoreParams score_params(ScoreMetric metric) const {
    ScoreParams p;
    p.metric = metric;
    p.kl_eps = kl_eps;
    p.kl_direction = kl_direction == "pseudo_to_policy" ? KlDirection::pseudo_to_policy
                                                        : KlDirection::policy_to_pseudo;
    p.w1_samples = w1_samples;
    return p;
  }

  GridRegime grid_regime() const {
    if (regime == "optimal") return GridRegime::optimal;
    if (regime == "biased") return GridRegime::biased;
    if (regime == "suboptimal") return GridRegime::suboptimal;
    throw ConfigError("regime '" + regime + "' is not a grid regime");
  }

  void validate() const {
    if (goals.empty()) throw ConfigError("no goals configured");
    if (fractions.empty()) throw ConfigError("no observability fractions configured");
    for (double f : fractions)
      if (!(f > 0.0) || f > 1.0) throw ConfigError("fractions must lie in (0, 1]");
    if (demos_per_goal < 2) throw ConfigError("demos_per_goal must be >= 2");
    if (train_per_goal < 1 || train_per_goal >= demos_per_goal)
      throw ConfigError("train/test split must leave at least one trajectory on each side");
    if (seeds < 1) throw ConfigError("seeds must be >= 1");
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    if (learners.empty()) throw ConfigError("no learners configured");
    if (metrics.empty()) throw ConfigError("no metrics configured");

    if (env == EnvKind::grid) {
      if (regime == "noise") throw ConfigError("action-noise regime applies to reach only");
      for (const auto& g : goals) {
        const auto [x, y] = grid_goal_cell(g);  // throws on reach labels
        if (!grid_free_cell(grid, x, y))
          throw ConfigError("goal " + g.label + " is not a free cell");
        if (x == grid.start_x && y == grid.start_y)
          throw ConfigError("goal " + g.label + " coincides with the start cell");
      }
    } else {
      if (regime == "biased" || regime == "suboptimal")
        throw ConfigError("regime '" + regime + "' applies to the grid domain only");
      if (regime == "noise" && !(noise_level > 0.0))
        throw ConfigError("noise regime requires noise_level > 0");
      const double reachable = reach.step_scale * static_cast<double>(reach.horizon);
      for (const auto& g : goals) {
        const int t = reach_goal_target(g);  // throws on grid labels
        if (t < 0 || t >= static_cast<int>(reach.goals.size()))
          throw ConfigError("goal " + g.label + " has no target position");
        if (distance3(reach.goals[static_cast<std::size_t>(t)], reach.start) > reachable)
          throw ConfigError("goal " + g.label + " lies outside the reachable ball");
      }
      for (const auto m : metrics)
        if (m == ScoreMetric::neg_kl)
          throw ConfigError("neg_kl cannot score continuous policies (reach domain)");
    }
    if (turn_insertion_p < 0.0 || turn_insertion_p > 1.0)
      throw ConfigError("turn_insertion_p must lie in [0, 1]");
    if (!(kl_eps > 0.0) || kl_eps >= 0.25) throw ConfigError("kl_eps must lie in (0, 0.25)");
    if (w1_samples < 1) throw ConfigError("w1_samples must be >= 1");
  }
};

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.env = env_kind_from_string(j.value("env", std::string("grid")));
  if (c.env == EnvKind::reach) {  // reach defaults per the evaluation protocol
    c.goals_name = "reach4";
    c.demos_per_goal = 200;
    c.train_per_goal = 150;
    c.regime = "optimal";
  }
  c.goals_name = j.value("goals", c.goals_name);
  c.goals = goal_preset(c.goals_name);
  c.regime = j.value("regime", c.regime);
  if (j.contains("noise")) {
    const auto& n = j["noise"];
    const auto kind = n.value("kind", std::string("gaussian"));
    if (kind == "gaussian") c.noise_kind = NoiseSpec::Kind::gaussian;
    else if (kind == "uniform") c.noise_kind = NoiseSpec::Kind::uniform;
    else throw ConfigError("unknown noise kind: " + kind);
    c.noise_level = n.value("level", 0.1);
  }
  c.turn_insertion_p = j.value("turn_insertion_p", c.turn_insertion_p);
  if (j.contains("learners")) {
    c.learners.clear();
    for (const auto& l : j["learners"]) c.learners.push_back(learner_from_string(l));
  }
  if (j.contains("metrics")) {
    c.metrics.clear();
    for (const auto& m : j["metrics"]) c.metrics.push_back(metric_from_string(m));
  }
  if (j.contains("fractions")) c.fractions = j["fractions"].get<std::vector<double>>();
  c.prefix_basis = prefix_basis_from_string(j.value("prefix_basis", std::string("meaningful")));
  c.demos_per_goal = j.value("demos_per_goal", c.demos_per_goal);
  c.train_per_goal = j.value("train_per_goal", c.train_per_goal);
  c.seeds = j.value("seeds", c.seeds);
  c.master_seed = j.value("master_seed", c.master_seed);
  c.horizon = j.value("horizon", c.horizon);
  c.grid.max_steps = j.value("max_steps", c.grid.max_steps);
  if (j.contains("hp")) from_json(j["hp"], c.hp);
  c.kl_eps = j.value("kl_eps", c.kl_eps);
  c.kl_direction = j.value("kl_direction", c.kl_direction);
  c.w1_samples = j.value("w1_samples", c.w1_samples);
  c.out_dir = j.value("out_dir", c.out_dir);
  c.threads = j.value("threads", c.threads);
  c.validate();
  return c;
}

/// Reads a config file (JSON, // and /* */ comments allowed).
inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return config_from_json(j);
}

/// Full configuration echo for run manifests.
inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["env"] = to_string(c.env);
  j["goals"] = c.goals_name;
  auto labels = nlohmann::json::array();
  for (const auto& g : c.goals) labels.push_back(g.label);
  j["goal_labels"] = labels;
  j["regime"] = c.regime;
  if (c.regime == "noise")
    j["noise"] = {{"kind", c.noise_kind == NoiseSpec::Kind::gaussian ? "gaussian" : "uniform"},
                  {"level", c.noise_level}};
  j["turn_insertion_p"] = c.turn_insertion_p;
  auto learners = nlohmann::json::array();
  for (const auto l : c.learners) learners.push_back(to_string(l));
  j["learners"] = learners;
  auto metrics = nlohmann::json::array();
  for (const auto m : c.metrics) metrics.push_back(to_string(m));
  j["metrics"] = metrics;
  j["fractions"] = c.fractions;
  j["prefix_basis"] = to_string(c.prefix_basis);
  j["demos_per_goal"] = c.demos_per_goal;
  j["train_per_goal"] = c.train_per_goal;
  j["seeds"] = c.seeds;
  j["master_seed"] = c.master_seed;
  j["horizon"] = c.horizon;
  j["max_steps"] = c.grid.max_steps;
  j["hp"] = to_json(c.hp);
  j["kl_eps"] = c.kl_eps;
  j["kl_direction"] = c.kl_direction;
  j["w1_samples"] = c.w1_samples;
  j["out_dir"] = c.out_dir;
  j["threads"] = c.threads;
  return j;
}

}  // namespace grail
