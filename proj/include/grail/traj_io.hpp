#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "grail/types.hpp"

namespace grail {

// Trajectory wire format, one JSON object per line:
//   {"env":"grid"|"reach","goal":label|null,"seed":int,"horizon":int,
//    "steps":[{"s":[...],"a":[...]}],"final":[...]}
// Grid state encodes as [x,y,dir], grid action as [code];
// reach state as [px,py,pz], reach action as [a1,a2,a3].

namespace detail {

inline nlohmann::json encode_state(const State& s) {
  if (const auto* g = std::get_if<GridState>(&s))
    return nlohmann::json::array({g->x, g->y, g->dir});
  const auto& r = std::get<ReachState>(s);
  return nlohmann::json::array({r.p[0], r.p[1], r.p[2]});
}

inline nlohmann::json encode_action(const Action& a) {
  if (const auto* d = std::get_if<DiscreteAction>(&a))
    return nlohmann::json::array({d->code});
  const auto& c = std::get<ContinuousAction>(a);
  return nlohmann::json::array({c.v[0], c.v[1], c.v[2]});
}

inline State decode_state(const nlohmann::json& j, EnvKind env) {
  if (env == EnvKind::grid) {
    if (j.size() != 3) throw std::invalid_argument("grid state needs 3 components");
    return GridState{j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
  }
  if (j.size() != 3) throw std::invalid_argument("reach state needs 3 components");
  return ReachState{{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()}};
}

inline Action decode_action(const nlohmann::json& j, EnvKind env) {
  if (env == EnvKind::grid) {
    if (j.size() != 1) throw std::invalid_argument("grid action needs 1 component");
    return DiscreteAction{j[0].get<int>()};
  }
  if (j.size() != 3) throw std::invalid_argument("reach action needs 3 components");
  return ContinuousAction{{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()}};
}

}  // namespace detail

inline std::string encode_trajectory(const Trajectory& t) {
  nlohmann::json j;
  j["env"] = to_string(t.env);
  j["goal"] = t.goal ? nlohmann::json(t.goal->label) : nlohmann::json(nullptr);
  j["seed"] = t.seed;
  j["horizon"] = t.horizon;
  auto steps = nlohmann::json::array();
  for (const auto& st : t.steps) {
    nlohmann::json js;
    js["s"] = detail::encode_state(st.s);
    js["a"] = detail::encode_action(st.a);
    steps.push_back(std::move(js));
  }
  j["steps"] = std::move(steps);
  j["final"] = detail::encode_state(t.final_state);
  return j.dump();
}

/// Decodes one JSONL line. Goal indices are recovered from labels by the
/// caller when needed; here the label is kept with index -1 unless resolvable.
inline Trajectory decode_trajectory(const std::string& line,
                                    const std::vector<GoalId>* known_goals = nullptr) {
  const auto j = nlohmann::json::parse(line);
  Trajectory t;
  t.env = env_kind_from_string(j.at("env").get<std::string>());
  if (!j.at("goal").is_null()) {
    const auto label = j.at("goal").get<std::string>();
    GoalId g{-1, label};
    if (known_goals) {
      for (const auto& k : *known_goals)
        if (k.label == label) g = k;
    }
    t.goal = g;
  }
  t.seed = j.at("seed").get<std::int64_t>();
  t.horizon = j.at("horizon").get<std::size_t>();
  for (const auto& js : j.at("steps")) {
    Step st;
    st.s = detail::decode_state(js.at("s"), t.env);
    st.a = detail::decode_action(js.at("a"), t.env);
    t.steps.push_back(std::move(st));
  }
  t.final_state = detail::decode_state(j.at("final"), t.env);
  return t;
}

inline void write_trajectories(const std::string& path, const std::vector<Trajectory>& trajs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const auto& t : trajs) out << encode_trajectory(t) << '\n';
}

inline std::vector<Trajectory> read_trajectories(const std::string& path,
                                                 const std::vector<GoalId>* known_goals = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::vector<Trajectory> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(decode_trajectory(line, known_goals));
  }
  return out;
}

}  // namespace grail
