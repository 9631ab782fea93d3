#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <thread>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "grail/config.hpp"
#include "grail/counters.hpp"
#include "grail/demogen.hpp"
#include "grail/learners.hpp"
#include "grail/recognizer.hpp"
#include "grail/stats.hpp"
#include "grail/traj_io.hpp"
#include "grail/version.hpp"

namespace grail {

/// Shortest round-trip decimal form; keeps CSV output byte-stable.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline const char* kRawCsvHeader =
    "env,regime,goals,learner,metric,fraction,seed,accuracy,precision,recall,f1,ties,"
    "train_s,infer_s,env_calls_train,env_calls_infer";

struct RawRow {
  int seed = 0;
  LearnerKind learner = LearnerKind::bc;
  ScoreMetric metric = ScoreMetric::neg_mse;
  double fraction = 0.0;
  ClassificationMetrics cm;
  int ties = 0;
  double train_s = 0.0;
  double infer_s = 0.0;
  std::uint64_t env_calls_train = 0;
  std::uint64_t env_calls_infer = 0;
};

inline std::string raw_row_csv(const ExperimentConfig& c, const RawRow& r) {
  std::ostringstream os;
  os << to_string(c.env) << ',' << c.regime << ',' << c.goals_name << ','
     << to_string(r.learner) << ',' << to_string(r.metric) << ',' << format_double(r.fraction)
     << ',' << r.seed << ',' << format_double(r.cm.accuracy) << ','
     << format_double(r.cm.macro_precision) << ',' << format_double(r.cm.macro_recall) << ','
     << format_double(r.cm.macro_f1) << ',' << r.ties << ',' << format_double(r.train_s) << ','
     << format_double(r.infer_s) << ',' << r.env_calls_train << ',' << r.env_calls_infer;
  return os.str();
}

/// Demonstrations for one seed of the configured experiment.
inline DemoSet generate_demos(const ExperimentConfig& c, std::uint64_t run_seed) {
  DemoSet demos;
  demos.goals = c.goals;
  const BiasSpec bias =
      c.env == EnvKind::grid ? default_bias_spec(c.grid, c.goals) : BiasSpec{};
  for (const auto& g : c.goals) {
    RngStream rng = derive_stream(run_seed, "demos/" + g.label);
    if (c.env == EnvKind::grid) {
      demos.per_goal[g.index] =
          gen_grid_demos(c.grid, g, c.grid_regime(), c.demos_per_goal, c.horizon, rng,
                         TurnInsertionSpec{c.turn_insertion_p}, &bias);
    } else {
      std::optional<NoiseSpec> noise;
      if (c.regime == "noise" && c.noise_level > 0.0)
        noise = NoiseSpec{c.noise_kind, c.noise_level};
      demos.per_goal[g.index] = gen_reach_demos(c.reach, g, noise, c.demos_per_goal, rng);
    }
  }
  return demos;
}

inline void split_demos(const ExperimentConfig& c, const DemoSet& all, DemoSet& train,
                        std::map<int, std::vector<Trajectory>>& test) {
  train.goals = all.goals;
  for (const auto& g : all.goals) {
    const auto& ts = all.per_goal.at(g.index);
    train.per_goal[g.index] =
        std::vector<Trajectory>(ts.begin(), ts.begin() + c.train_per_goal);
    test[g.index] = std::vector<Trajectory>(ts.begin() + c.train_per_goal, ts.end());
  }
}

/// Everything produced by one seed: one row per learner x metric x fraction.
inline std::vector<RawRow> run_seed(const ExperimentConfig& c, int seed_index) {
  const std::uint64_t run_seed_value =
      derive_seed(c.master_seed, "seed/" + std::to_string(seed_index));
  const DemoSet all = generate_demos(c, run_seed_value);
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
  const int threads = c.threads > 0
                          ? c.threads
                          : std::max(1u, std::thread::hardware_concurrency());

  std::vector<RawRow> rows;
  for (const auto learner : c.learners) {
    const auto t0 = std::chrono::steady_clock::now();
    const PolicyBank bank = train_bank(inputs, learner, c.hp, run_seed_value, threads);
    const double train_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::uint64_t env_calls_train = 0;
    for (const auto& e : bank.entries) env_calls_train += e.env_calls_train;

    for (const auto metric : c.metrics) {
      const ScoreParams params = c.score_params(metric);
      for (const double fraction : c.fractions) {
        RawRow row;
        row.seed = seed_index;
        row.learner = learner;
        row.metric = metric;
        row.fraction = fraction;
        row.train_s = train_s;
        row.env_calls_train = env_calls_train;

        const auto i0 = std::chrono::steady_clock::now();
        std::vector<std::pair<int, int>> pairs;
        for (const auto& g : c.goals) {
          const auto& trajs = test.at(g.index);
          for (std::size_t idx = 0; idx < trajs.size(); ++idx) {
            const auto prefix = observe_prefix(trajs[idx], fraction, c.prefix_basis, c.reach);
            RngStream rng = derive_stream(
                run_seed_value, "infer/" + to_string(learner) + "/" + to_string(metric) + "/" +
                                    format_double(fraction) + "/" + g.label + "/" +
                                    std::to_string(idx));
            const ScoreReport report = infer_goal(prefix, bank, params, rng);
            pairs.emplace_back(g.index, report.chosen.index);
            row.ties += report.ties;
            row.env_calls_infer += report.env_calls;
          }
        }
        row.infer_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - i0).count();
        row.cm = classification_metrics(pairs, c.goals);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

struct ExperimentOutput {
  std::filesystem::path out_dir;
  std::filesystem::path raw_csv;
  std::filesystem::path aggregated_csv;
  std::filesystem::path manifest;
  std::vector<RawRow> rows;             // all seeds
  std::vector<std::string> failures;    // "seed k: cause"
};

inline const char* kAggregatedCsvHeader =
    "env,regime,goals,learner,metric,fraction,n,"
    "accuracy_mean,accuracy_std,accuracy_ci_low,accuracy_ci_high,"
    "precision_mean,precision_std,precision_ci_low,precision_ci_high,"
    "recall_mean,recall_std,recall_ci_low,recall_ci_high,"
    "f1_mean,f1_std,f1_ci_low,f1_ci_high,"
    "ties_total,env_calls_train_total,env_calls_infer_total";

/// Runs the full evaluation grid: per seed, generate demonstrations, split,
/// train one bank per learner, score every held-out prefix, then aggregate
/// mean/std/95%-CI per learner x metric x fraction. A failing seed is logged
/// and skipped; the other seeds proceed.
inline ExperimentOutput run_experiment(const ExperimentConfig& c, bool quiet = false) {
  namespace fs = std::filesystem;
  c.validate();
  ExperimentOutput out;
  out.out_dir = fs::path(c.out_dir);
  fs::create_directories(out.out_dir / "runs");

  for (int k = 0; k < c.seeds; ++k) {
    try {
      const auto rows = run_seed(c, k);
      std::ofstream seed_csv(out.out_dir / "runs" / ("seed_" + std::to_string(k) + ".csv"),
                             std::ios::binary);
      seed_csv << kRawCsvHeader << '\n';
      for (const auto& r : rows) seed_csv << raw_row_csv(c, r) << '\n';
      out.rows.insert(out.rows.end(), rows.begin(), rows.end());
      if (!quiet) std::cerr << "[grail] seed " << k << ": " << rows.size() << " rows\n";
    } catch (const std::exception& e) {
      out.failures.push_back("seed " + std::to_string(k) + ": " + e.what());
      std::cerr << "[grail] seed " << k << " failed: " << e.what() << '\n';
    }
  }

  out.raw_csv = out.out_dir / "raw.csv";
  {
    std::ofstream raw(out.raw_csv, std::ios::binary);
    raw << kRawCsvHeader << '\n';
    for (const auto& r : out.rows) raw << raw_row_csv(c, r) << '\n';
  }

  // Aggregate over seeds, preserving the configured ordering.
  out.aggregated_csv = out.out_dir / "aggregated.csv";
  {
    std::ofstream agg(out.aggregated_csv, std::ios::binary);
    agg << kAggregatedCsvHeader << '\n';
    for (const auto learner : c.learners)
      for (const auto metric : c.metrics)
        for (const double fraction : c.fractions) {
          std::vector<double> acc, prec, rec, f1;
          std::uint64_t ties = 0, calls_train = 0, calls_infer = 0;
          for (const auto& r : out.rows) {
            if (r.learner != learner || r.metric != metric || r.fraction != fraction) continue;
            acc.push_back(r.cm.accuracy);
            prec.push_back(r.cm.macro_precision);
            rec.push_back(r.cm.macro_recall);
            f1.push_back(r.cm.macro_f1);
            ties += static_cast<std::uint64_t>(r.ties);
            calls_train += r.env_calls_train;
            calls_infer += r.env_calls_infer;
          }
          if (acc.empty()) continue;
          const auto stats = {aggregate_stats(acc), aggregate_stats(prec),
                              aggregate_stats(rec), aggregate_stats(f1)};
          agg << to_string(c.env) << ',' << c.regime << ',' << c.goals_name << ','
              << to_string(learner) << ',' << to_string(metric) << ','
              << format_double(fraction) << ',' << acc.size();
          for (const auto& s : stats)
            agg << ',' << format_double(s.mean) << ',' << format_double(s.stddev) << ','
                << format_double(s.ci_low) << ',' << format_double(s.ci_high);
          agg << ',' << ties << ',' << calls_train << ',' << calls_infer << '\n';
        }
  }

  out.manifest = out.out_dir / "manifest.json";
  {
    nlohmann::json m;
    m["config"] = config_to_json(c);
    m["version"] = kGrailVersion;
    m["failures"] = out.failures;
    std::ofstream mf(out.manifest, std::ios::binary);
    mf << m.dump(2) << '\n';
  }
  return out;
}

/// Per-state visit counts of a Q-learning bank: one row per (goal, x, y,
/// dir) plus per-position totals with dir="all".
inline void export_visit_heatmap(const PolicyBank& bank, const std::string& path) {
  if (bank.learner != LearnerKind::qlearn)
    throw std::invalid_argument("heatmap export requires a Q-learning bank, got " +
                                to_string(bank.learner));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write heatmap: " + path);
  out << "goal,x,y,dir,visits\n";
  for (const auto& e : bank.entries) {
    const auto& qt = std::get<QTable>(e.model);
    for (int idx = 0; idx < static_cast<int>(qt.n_states); ++idx) {
      const int dir = idx % 4;
      const int cell = idx / 4;
      const int x = cell % 7 + 1;
      const int y = cell / 7 + 1;
      out << e.goal.label << ',' << x << ',' << y << ',' << dir << ','
          << qt.state_visits(static_cast<std::size_t>(idx)) << '\n';
    }
  }
  for (const auto& e : bank.entries) {
    const auto& qt = std::get<QTable>(e.model);
    for (int y = 1; y <= 7; ++y)
      for (int x = 1; x <= 7; ++x) {
        std::uint64_t total = 0;
        for (int dir = 0; dir < 4; ++dir)
          total += qt.state_visits(
              static_cast<std::size_t>(((y - 1) * 7 + (x - 1)) * 4 + dir));
        out << e.goal.label << ',' << x << ',' << y << ",all," << total << '\n';
      }
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

/// Renders the aggregated CSV as plain-text and Markdown tables: one row per
/// (goal set, fraction), one column per learner x metric, "mean ± std"
/// cells. The best mean F1 per row is bolded in Markdown; ties all bold.
inline std::pair<std::string, std::string> render_report(const std::string& results_dir) {
  namespace fs = std::filesystem;
  const auto path = fs::path(results_dir) / "aggregated.csv";
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("aggregated.csv not found in " + results_dir);

  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("aggregated.csv is empty");
  const auto cols = detail::split_csv_line(header);
  const auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (cols[i] == name) return i;
    throw std::runtime_error("aggregated.csv is missing column: " + name);
  };
  const std::size_t c_goals = col("goals"), c_learner = col("learner"), c_metric = col("metric"),
                    c_fraction = col("fraction"), c_mean = col("f1_mean"), c_std = col("f1_std");

  struct Cell {
    double mean = 0.0, stddev = 0.0;
    bool set = false;
  };
  std::map<std::pair<std::string, std::string>, std::map<std::string, Cell>> grid;
  std::vector<std::pair<std::string, std::string>> row_order;
  std::vector<std::string> col_order;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    const std::pair<std::string, std::string> row_key{f[c_goals], f[c_fraction]};
    const std::string col_key = f[c_learner] + "+" + f[c_metric];
    if (grid.find(row_key) == grid.end()) row_order.push_back(row_key);
    if (std::find(col_order.begin(), col_order.end(), col_key) == col_order.end())
      col_order.push_back(col_key);
    grid[row_key][col_key] = Cell{std::stod(f[c_mean]), std::stod(f[c_std]), true};
  }

  const auto cell_text = [](const Cell& c) {
    if (!c.set) return std::string("-");
    std::ostringstream os;
    os.precision(4);
    os << std::fixed << c.mean << " ± " << c.stddev;
    return os.str();
  };

  std::ostringstream txt, md;
  txt << "goals fraction";
  md << "| goals | fraction |";
  for (const auto& ck : col_order) {
    txt << " | " << ck;
    md << ' ' << ck << " |";
  }
  txt << '\n';
  md << "\n|---|---|";
  for (std::size_t i = 0; i < col_order.size(); ++i) md << "---|";
  md << '\n';

  for (const auto& rk : row_order) {
    double best = -1.0;
    for (const auto& ck : col_order) {
      const auto& cell = grid[rk][ck];
      if (cell.set) best = std::max(best, cell.mean);
    }
    txt << rk.first << ' ' << rk.second;
    md << "| " << rk.first << " | " << rk.second << " |";
    for (const auto& ck : col_order) {
      const auto& cell = grid[rk][ck];
      txt << " | " << cell_text(cell);
      if (cell.set && cell.mean == best) md << " **" << cell_text(cell) << "** |";
      else md << ' ' << cell_text(cell) << " |";
    }
    txt << '\n';
    md << '\n';
  }
  return {txt.str(), md.str()};
}

}  // namespace grail
