#pragma once

#include <json.hpp>

namespace grail {

/// Behavioral cloning. The tabular (grid) fit is a closed-form count model;
/// batch/lr/epochs apply to the continuous MLP fit.
struct BcHp {
  int batch = 8;
  double lr = 0.001;
  int epochs = 50;
};

/// Adversarial imitation (shared by GAIL and AIRL).
struct AdvHp {
  int batch = 32;                // PPO minibatch
  double gamma = 0.95;
  double lr = 0.0003;            // policy/value network learning rate (continuous)
  int disc_updates_per_round = 8;
  int replay_capacity = 512;
  int demo_batch = 16;
  int rounds_grid = 150;         // training budget, flagged in config
  int rounds_reach = 200;
  int steps_per_round = 512;     // rollout buffer per round
  double clip = 0.2;
  double entropy_coef = 0.01;
  int ppo_epochs = 4;
  double tabular_lr = 0.02;      // logit/value table step size (discrete)
  double disc_lr_tabular = 0.05;
  double disc_lr_mlp = 0.001;
};

/// Tabular Q-learning (the GRAQL-style baseline). Optimistic initialization
/// (q_init above the best reachable return) keeps every optimal route
/// explored instead of locking onto the first one found.
struct QHp {
  double alpha = 0.1;
  double eps = 0.1;
  double gamma = 0.95;
  int episodes = 20000;
  double temperature = 1.0;  // softmax beta for the derived policy
  double q_init = 10.0;
};

/// PPO on the true environment reward (the DRACO-style baseline).
struct PpoHp {
  double clip = 0.2;
  double gamma = 0.95;
  double lr = 0.0003;        // continuous nets
  double tabular_lr = 0.05;  // discrete tables
  int epochs = 10;
  int minibatch = 128;
  int steps_per_round = 512;
  int rounds_grid = 400;
  int rounds_reach = 150;
  double entropy_coef = 0.01;
  double init_scale = 0.2;   // initial Gaussian action scale
};

struct LearnerHyperparams {
  BcHp bc;
  AdvHp gail;
  AdvHp airl;
  QHp qlearn;
  PpoHp ppo;
};

inline nlohmann::json to_json(const BcHp& h) {
  return {{"batch", h.batch}, {"lr", h.lr}, {"epochs", h.epochs}};
}

inline nlohmann::json to_json(const AdvHp& h) {
  return {{"batch", h.batch},
          {"gamma", h.gamma},
          {"lr", h.lr},
          {"disc_updates_per_round", h.disc_updates_per_round},
          {"replay_capacity", h.replay_capacity},
          {"demo_batch", h.demo_batch},
          {"rounds_grid", h.rounds_grid},
          {"rounds_reach", h.rounds_reach},
          {"steps_per_round", h.steps_per_round},
          {"clip", h.clip},
          {"entropy_coef", h.entropy_coef},
          {"ppo_epochs", h.ppo_epochs},
          {"tabular_lr", h.tabular_lr},
          {"disc_lr_tabular", h.disc_lr_tabular},
          {"disc_lr_mlp", h.disc_lr_mlp}};
}

inline nlohmann::json to_json(const QHp& h) {
  return {{"alpha", h.alpha},
          {"eps", h.eps},
          {"gamma", h.gamma},
          {"episodes", h.episodes},
          {"temperature", h.temperature},
          {"q_init", h.q_init}};
}

inline nlohmann::json to_json(const PpoHp& h) {
  return {{"clip", h.clip},
          {"gamma", h.gamma},
          {"lr", h.lr},
          {"tabular_lr", h.tabular_lr},
          {"epochs", h.epochs},
          {"minibatch", h.minibatch},
          {"steps_per_round", h.steps_per_round},
          {"rounds_grid", h.rounds_grid},
          {"rounds_reach", h.rounds_reach},
          {"entropy_coef", h.entropy_coef},
          {"init_scale", h.init_scale}};
}

inline void from_json(const nlohmann::json& j, BcHp& h) {
  h.batch = j.value("batch", h.batch);
  h.lr = j.value("lr", h.lr);
  h.epochs = j.value("epochs", h.epochs);
}

inline void from_json(const nlohmann::json& j, AdvHp& h) {
  h.batch = j.value("batch", h.batch);
  h.gamma = j.value("gamma", h.gamma);
  h.lr = j.value("lr", h.lr);
  h.disc_updates_per_round = j.value("disc_updates_per_round", h.disc_updates_per_round);
  h.replay_capacity = j.value("replay_capacity", h.replay_capacity);
  h.demo_batch = j.value("demo_batch", h.demo_batch);
  h.rounds_grid = j.value("rounds_grid", h.rounds_grid);
  h.rounds_reach = j.value("rounds_reach", h.rounds_reach);
  h.steps_per_round = j.value("steps_per_round", h.steps_per_round);
  h.clip = j.value("clip", h.clip);
  h.entropy_coef = j.value("entropy_coef", h.entropy_coef);
  h.ppo_epochs = j.value("ppo_epochs", h.ppo_epochs);
  h.tabular_lr = j.value("tabular_lr", h.tabular_lr);
  h.disc_lr_tabular = j.value("disc_lr_tabular", h.disc_lr_tabular);
  h.disc_lr_mlp = j.value("disc_lr_mlp", h.disc_lr_mlp);
}

inline void from_json(const nlohmann::json& j, QHp& h) {
  h.alpha = j.value("alpha", h.alpha);
  h.eps = j.value("eps", h.eps);
  h.gamma = j.value("gamma", h.gamma);
  h.episodes = j.value("episodes", h.episodes);
  h.temperature = j.value("temperature", h.temperature);
  h.q_init = j.value("q_init", h.q_init);
}

inline void from_json(const nlohmann::json& j, PpoHp& h) {
  h.clip = j.value("clip", h.clip);
  h.gamma = j.value("gamma", h.gamma);
  h.lr = j.value("lr", h.lr);
  h.tabular_lr = j.value("tabular_lr", h.tabular_lr);
  h.epochs = j.value("epochs", h.epochs);
  h.minibatch = j.value("minibatch", h.minibatch);
  h.steps_per_round = j.value("steps_per_round", h.steps_per_round);
  h.rounds_grid = j.value("rounds_grid", h.rounds_grid);
  h.rounds_reach = j.value("rounds_reach", h.rounds_reach);
  h.entropy_coef = j.value("entropy_coef", h.entropy_coef);
  h.init_scale = j.value("init_scale", h.init_scale);
}

inline nlohmann::json to_json(const LearnerHyperparams& h) {
  return {{"bc", to_json(h.bc)},
          {"gail", to_json(h.gail)},
          {"airl", to_json(h.airl)},
          {"qlearn", to_json(h.qlearn)},
          {"ppo", to_json(h.ppo)}};
}

inline void from_json(const nlohmann::json& j, LearnerHyperparams& h) {
  if (j.contains("bc")) from_json(j["bc"], h.bc);
  if (j.contains("gail")) from_json(j["gail"], h.gail);
  if (j.contains("airl")) from_json(j["airl"], h.airl);
  if (j.contains("qlearn")) from_json(j["qlearn"], h.qlearn);
  if (j.contains("ppo")) from_json(j["ppo"], h.ppo);
}

}  // namespace grail
