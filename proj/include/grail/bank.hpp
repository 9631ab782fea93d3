#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "grail/policies.hpp"
#include "grail/rng.hpp"
#include "grail/types.hpp"

namespace grail {

enum class LearnerKind { bc, gail, airl, qlearn, ppo };

inline std::string to_string(LearnerKind k) {
  switch (k) {
    case LearnerKind::bc: return "bc";
    case LearnerKind::gail: return "gail";
    case LearnerKind::airl: return "airl";
    case LearnerKind::qlearn: return "qlearn";
    case LearnerKind::ppo: return "ppo";
  }
  return "?";
}

inline LearnerKind learner_from_string(const std::string& s) {
  if (s == "bc") return LearnerKind::bc;
  if (s == "gail") return LearnerKind::gail;
  if (s == "airl") return LearnerKind::airl;
  if (s == "qlearn") return LearnerKind::qlearn;
  if (s == "ppo") return LearnerKind::ppo;
  throw std::invalid_argument("unknown learner: " + s);
}

using PolicyModel = std::variant<TabularPolicy, GaussianMlpPolicy, QTable>;

/// 9x9 grid state indexing shared by tabular models and learners.
inline int grid_state_index(const GridState& s) {
  return ((s.y - 1) * 7 + (s.x - 1)) * 4 + s.dir;
}

inline constexpr int kGridStateCount = 7 * 7 * 4;

/// Evaluates a bank model on a domain state.
inline ActionDistribution eval_policy(const PolicyModel& model, const State& state) {
  if (const auto* gs = std::get_if<GridState>(&state)) {
    if (const auto* tab = std::get_if<TabularPolicy>(&model))
      return tab->act_index(static_cast<std::size_t>(grid_state_index(*gs)));
    if (const auto* qt = std::get_if<QTable>(&model))
      return qt->act_index(static_cast<std::size_t>(grid_state_index(*gs)));
    throw std::runtime_error("continuous policy cannot score grid states");
  }
  const auto& rs = std::get<ReachState>(state);
  if (const auto* mlp = std::get_if<GaussianMlpPolicy>(&model)) return mlp->act(rs);
  throw std::runtime_error("tabular policy cannot score reach states");
}

inline bool policy_is_discrete(const PolicyModel& model) {
  return !std::holds_alternative<GaussianMlpPolicy>(model);
}

struct PolicyEntry {
  GoalId goal;
  PolicyModel model;
  double train_seconds = 0.0;
  std::uint64_t env_calls_train = 0;
};

/// One trained policy per goal plus the metadata needed to reproduce the
/// training run. Immutable after construction or load.
struct PolicyBank {
  EnvKind env = EnvKind::grid;
  LearnerKind learner = LearnerKind::bc;
  std::uint64_t seed = 0;
  nlohmann::json hyperparams;
  std::vector<PolicyEntry> entries;  // ordered by goal index

  const PolicyEntry& entry_for(int goal_index) const {
    for (const auto& e : entries)
      if (e.goal.index == goal_index) return e;
    throw std::out_of_range("bank has no goal index " + std::to_string(goal_index));
  }
};

namespace detail {

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

inline nlohmann::json model_to_json(const PolicyModel& model) {
  nlohmann::json j;
  if (const auto* tab = std::get_if<TabularPolicy>(&model)) {
    j["format"] = "tabular";
    j["shape"] = {tab->n_states, tab->n_actions};
    j["params"] = tab->probs;
  } else if (const auto* mlp = std::get_if<GaussianMlpPolicy>(&model)) {
    j["format"] = "mlp";
    j["shape"] = mlp->mean.sizes();
    j["params"] = mlp->mean.params();
    j["log_scale"] = mlp->log_scale;
  } else {
    const auto& qt = std::get<QTable>(model);
    j["format"] = "qtable";
    j["shape"] = {qt.n_states, qt.n_actions};
    j["temperature"] = qt.temperature;
    j["params"] = qt.q;
    j["visits"] = qt.visits;
  }
  return j;
}

inline PolicyModel model_from_json(const nlohmann::json& j) {
  const auto format = j.at("format").get<std::string>();
  if (format == "tabular") {
    TabularPolicy tab(j.at("shape")[0].get<std::size_t>(), j.at("shape")[1].get<std::size_t>());
    tab.probs = j.at("params").get<std::vector<double>>();
    if (tab.probs.size() != tab.n_states * tab.n_actions)
      throw std::runtime_error("tabular policy shape/params mismatch");
    return tab;
  }
  if (format == "mlp") {
    GaussianMlpPolicy p;
    p.mean = nn::Mlp(j.at("shape").get<std::vector<std::size_t>>());
    auto params = j.at("params").get<std::vector<double>>();
    if (params.size() != p.mean.param_count())
      throw std::runtime_error("mlp policy shape/params mismatch");
    p.mean.params() = std::move(params);
    p.log_scale = j.at("log_scale").get<std::vector<double>>();
    return p;
  }
  if (format == "qtable") {
    QTable qt(j.at("shape")[0].get<std::size_t>(), j.at("shape")[1].get<std::size_t>(),
              j.at("temperature").get<double>());
    qt.q = j.at("params").get<std::vector<double>>();
    qt.visits = j.at("visits").get<std::vector<std::uint64_t>>();
    if (qt.q.size() != qt.n_states * qt.n_actions || qt.visits.size() != qt.q.size())
      throw std::runtime_error("qtable shape/params mismatch");
    return qt;
  }
  throw std::runtime_error("unknown policy format tag: " + format);
}

}  // namespace detail

/// Writes one {learner}_{goal}.policy file per goal plus a manifest with
/// content digests.
inline void save_bank(const PolicyBank& bank, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  nlohmann::json manifest;
  manifest["env"] = to_string(bank.env);
  manifest["learner"] = to_string(bank.learner);
  manifest["seed"] = bank.seed;
  manifest["hyperparams"] = bank.hyperparams;
  auto goals = nlohmann::json::array();

  for (const auto& e : bank.entries) {
    nlohmann::json j = detail::model_to_json(e.model);
    j["meta"] = {{"goal", e.goal.label},
                 {"goal_index", e.goal.index},
                 {"learner", to_string(bank.learner)},
                 {"seed", bank.seed},
                 {"hyperparams", bank.hyperparams},
                 {"train_seconds", e.train_seconds},
                 {"env_calls_train", e.env_calls_train}};
    const std::string content = j.dump();
    const std::string fname = to_string(bank.learner) + "_" + e.goal.label + ".policy";
    std::ofstream out(fs::path(dir) / fname, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write policy file: " + fname);
    out << content;
    goals.push_back({{"index", e.goal.index},
                     {"label", e.goal.label},
                     {"file", fname},
                     {"digest", "fnv1a64:" + detail::hex64(fnv1a64(content))}});
  }
  manifest["goals"] = std::move(goals);
  std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary);
  out << manifest.dump(2) << '\n';
}

/// Loads and verifies a bank directory. Digest or format problems abort the
/// whole load; a bank is never partially constructed.
inline PolicyBank load_bank(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream min(fs::path(dir) / "manifest.json", std::ios::binary);
  if (!min) throw std::runtime_error("bank manifest missing in " + dir);
  nlohmann::json manifest = nlohmann::json::parse(min);

  PolicyBank bank;
  bank.env = env_kind_from_string(manifest.at("env").get<std::string>());
  bank.learner = learner_from_string(manifest.at("learner").get<std::string>());
  bank.seed = manifest.at("seed").get<std::uint64_t>();
  bank.hyperparams = manifest.at("hyperparams");

  for (const auto& g : manifest.at("goals")) {
    const std::string label = g.at("label").get<std::string>();
    const fs::path file = fs::path(dir) / g.at("file").get<std::string>();
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("bank file missing for goal " + label);
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string content = ss.str();
    const std::string digest = "fnv1a64:" + detail::hex64(fnv1a64(content));
    if (digest != g.at("digest").get<std::string>())
      throw std::runtime_error("bank corruption: digest mismatch for goal " + label);

    nlohmann::json j = nlohmann::json::parse(content);
    PolicyEntry e;
    e.goal = GoalId{g.at("index").get<int>(), label};
    e.model = detail::model_from_json(j);
    if (j.contains("meta")) {
      e.train_seconds = j["meta"].value("train_seconds", 0.0);
      e.env_calls_train = j["meta"].value("env_calls_train", std::uint64_t{0});
    }
    bank.entries.push_back(std::move(e));
  }
  std::sort(bank.entries.begin(), bank.entries.end(),
            [](const PolicyEntry& a, const PolicyEntry& b) { return a.goal.index < b.goal.index; });
  return bank;
}

}  // namespace grail
