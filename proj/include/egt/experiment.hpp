#pragma once

// Sweep planning, parallel execution and CSV serialization. The unit of
// work is one (sweep point, replicate) pair with its own derived RNG
// stream, so results are identical for any worker count.

#include <atomic>
#include <cstdint>
#include <fstream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "config.hpp"

namespace egt {

using Cell = std::variant<std::int64_t, double, std::string>;

struct ResultRow {
  std::vector<std::pair<std::string, Cell>> cells;

  void add(const std::string& name, std::int64_t v) { cells.emplace_back(name, Cell(v)); }
  void add(const std::string& name, int v) { add(name, static_cast<std::int64_t>(v)); }
  void add(const std::string& name, double v) { cells.emplace_back(name, Cell(v)); }
  void add(const std::string& name, const std::string& v) { cells.emplace_back(name, Cell(v)); }
};

inline std::string cell_text(const Cell& c) {
  if (std::holds_alternative<std::int64_t>(c)) return std::to_string(std::get<std::int64_t>(c));
  if (std::holds_alternative<double>(c)) return format_double(std::get<double>(c));
  return std::get<std::string>(c);
}

// CSV with a header; every row must carry exactly the first row's columns.
inline void write_results(std::ostream& os, const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw InvalidParameter("write_results: no rows");
  const auto& head = rows.front().cells;
  for (std::size_t k = 0; k < head.size(); ++k)
    os << (k ? "," : "") << head[k].first;
  os << '\n';
  for (const auto& row : rows) {
    if (row.cells.size() != head.size())
      throw InvalidParameter("write_results: mixed row schemas");
    for (std::size_t k = 0; k < row.cells.size(); ++k) {
      if (row.cells[k].first != head[k].first)
        throw InvalidParameter("write_results: mixed row schemas");
      os << (k ? "," : "") << cell_text(row.cells[k].second);
    }
    os << '\n';
  }
}

inline void write_results(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: byte-stable on every platform
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  write_results(out, rows);
  out.flush();
  if (!out) throw ConfigError("write failed for output file '" + path + "'");
}

// results.csv -> results_density.csv (auxiliary table of the equilibria kind)
inline std::string density_path(const std::string& out) {
  const std::size_t dot = out.rfind('.');
  const std::size_t slash = out.find_last_of("/\\");
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return out + "_density";
  return out.substr(0, dot) + "_density" + out.substr(dot);
}

struct WorkItem {
  std::size_t index = 0;      // position in the merged output
  std::size_t sweep_idx = 0;  // sweep point (grid cell for ai_race_phase)
  int replicate = 0;
};

struct ExperimentPlan {
  ExperimentConfig cfg;
  std::size_t points = 1;  // sweep points, or race grid cells
  std::vector<WorkItem> items;
  int eq_prob_cols = 0;  // widest count histogram across equilibria sweep points
};

namespace detail {

inline std::uint64_t kind_tag(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::WellMixed: return 1;
    case ExperimentKind::Network: return 2;
    case ExperimentKind::Interference: return 3;
    case ExperimentKind::AiRacePhase: return 4;
    case ExperimentKind::RandomEquilibria: return 5;
  }
  return 0;
}

inline Cell json_cell(const json& v) {
  if (v.is_number_integer() || v.is_number_unsigned()) return Cell(v.get<std::int64_t>());
  if (v.is_number_float()) return Cell(v.get<double>());
  if (v.is_boolean()) return Cell(static_cast<std::int64_t>(v.get<bool>() ? 1 : 0));
  if (v.is_string()) return Cell(v.get<std::string>());
  throw ConfigError("sweep values must be numbers, booleans or strings");
}

// sweep-coordinate and replicate columns shared by all rows of one item
inline ResultRow row_prefix(const ExperimentConfig& cfg, const WorkItem& item) {
  ResultRow row;
  if (cfg.kind != ExperimentKind::AiRacePhase)
    for (const auto& [path, value] : sweep_point_coords(cfg, item.sweep_idx))
      row.cells.emplace_back(path, json_cell(value));
  row.add("replicate", item.replicate);
  return row;
}

}  // namespace detail

inline ExperimentPlan plan_experiment(ExperimentConfig cfg) {
  ExperimentPlan plan;
  plan.cfg = std::move(cfg);
  if (plan.cfg.kind == ExperimentKind::AiRacePhase) {
    const auto p = parse_ai_race_params(plan.cfg.params, plan.cfg.base_dir);
    plan.points = p.s_grid.size() * p.pr_grid.size();
  } else {
    plan.points = sweep_point_count(plan.cfg);
  }
  if (plan.cfg.kind == ExperimentKind::RandomEquilibria) {
    for (std::size_t idx = 0; idx < sweep_point_count(plan.cfg); ++idx) {
      const auto p = parse_random_equilibria_params(sweep_point_params(plan.cfg, idx),
                                                    plan.cfg.base_dir);
      const int cols = p.spec.n == 2 ? p.spec.d : 2;
      plan.eq_prob_cols = std::max(plan.eq_prob_cols, cols);
    }
  }
  const int reps = plan.cfg.replicates;
  plan.items.reserve(plan.points * static_cast<std::size_t>(reps));
  for (std::size_t s = 0; s < plan.points; ++s)
    for (int r = 0; r < reps; ++r)
      plan.items.push_back({plan.items.size(), s, r});
  return plan;
}

struct RunOutput {
  std::vector<ResultRow> rows;
  std::vector<ResultRow> density_rows;  // random_equilibria only
};

namespace detail {

inline RunOutput run_wellmixed_item(const ExperimentConfig& cfg, const WorkItem& item,
                                    RngStream& rng) {
  const auto p = parse_wellmixed_params(sweep_point_params(cfg, item.sweep_idx), cfg.base_dir);
  const PopulationState init(p.evo.Z, p.initial);
  const TrajectoryResult tr =
      simulate_trajectory(init, p.game, p.evo, p.has_scheme ? &p.scheme : nullptr, p.steps, rng,
                          p.record_every);
  RunOutput out;
  const ResultRow prefix = row_prefix(cfg, item);
  for (const auto& pt : tr.series) {
    ResultRow row = prefix;
    row.add("step", pt.step);
    for (std::size_t s = 0; s < pt.counts.size(); ++s)
      row.add("count_" + std::to_string(s), static_cast<std::int64_t>(pt.counts[s]));
    row.add("cumulative_cost", pt.cumulative_cost);
    out.rows.push_back(std::move(row));
  }
  return out;
}

inline RunOutput run_network_item(const ExperimentConfig& cfg, const WorkItem& item,
                                  RngStream& rng) {
  const auto p = parse_network_params(sweep_point_params(cfg, item.sweep_idx), cfg.base_dir);
  const Graph g = p.graph.build(rng);
  std::vector<StrategyId> strat(g.N);
  for (StrategyId& s : strat) {
    if (rng.bernoulli(p.initial_coop_fraction)) {
      s = p.coop_strategy;
    } else if (p.game.n == 2) {
      s = 1 - p.coop_strategy;
    } else {  // uniform over the non-focal strategies
      int k = static_cast<int>(rng.uniform_int(p.game.n - 1));
      if (k >= p.coop_strategy) ++k;
      s = k;
    }
  }
  const NetworkSimResult res =
      run_network_sim(g, std::move(strat), p.rule, p.game, p.has_scheme ? &p.scheme : nullptr,
                      p.generations, rng, p.coop_strategy, p.accumulated);
  RunOutput out;
  const ResultRow prefix = row_prefix(cfg, item);
  double cum = 0.0;
  for (std::size_t gen = 0; gen < res.coop_series.size(); ++gen) {
    if (gen > 0) cum += res.ledger.per_generation[gen - 1];
    ResultRow row = prefix;
    row.add("generation", static_cast<std::int64_t>(gen));
    row.add("coop_fraction", res.coop_series[gen]);
    row.add("cumulative_cost", cum);
    out.rows.push_back(std::move(row));
  }
  return out;
}

inline RunOutput run_interference_item(const ExperimentConfig& cfg, const WorkItem& item,
                                       RngStream& rng) {
  const auto p = parse_interference_params(sweep_point_params(cfg, item.sweep_idx), cfg.base_dir);
  const PopulationState init(p.evo.Z, p.initial);
  const TrajectoryResult tr =
      simulate_trajectory(init, p.game, p.evo, &p.scheme, p.steps, rng, p.record_every);
  const EfficiencyReport rep =
      efficiency_report(coop_fraction_series(tr, p.coop_strategy, p.evo.Z), tr.ledger);
  RunOutput out;
  ResultRow row = row_prefix(cfg, item);
  row.add("final_coop", rep.final_coop);
  row.add("mean_coop", rep.mean_coop);
  row.add("total_cost", rep.total_cost);
  row.add("coop_per_unit_cost", rep.coop_per_unit_cost);
  out.rows.push_back(std::move(row));
  return out;
}

inline RunOutput run_race_item(const ExperimentConfig& cfg, const WorkItem& item) {
  const auto p = parse_ai_race_params(cfg.params, cfg.base_dir);
  const std::size_t cell = item.sweep_idx;  // s-major over the built-in grids
  RaceParams rp = p.race;
  rp.s = p.s_grid[cell / p.pr_grid.size()];
  rp.p_r = p.pr_grid[cell % p.pr_grid.size()];
  const RaceCell c = evaluate_race_cell(rp, p.evo, p.incentive);
  RunOutput out;
  ResultRow row = row_prefix(cfg, item);
  row.add("s", c.s);
  row.add("p_r", c.p_r);
  row.add("region", std::string(region_name(c.region)));
  row.add("unsafe_freq", c.unsafe_freq);
  row.add("welfare_AS", c.welfare_AS);
  row.add("welfare_AU", c.welfare_AU);
  out.rows.push_back(std::move(row));
  return out;
}

inline RunOutput run_equilibria_item(const ExperimentConfig& cfg, const WorkItem& item,
                                     std::uint64_t item_seed, int prob_cols) {
  const auto p =
      parse_random_equilibria_params(sweep_point_params(cfg, item.sweep_idx), cfg.base_dir);
  const EquilibriaStats st =
      estimate_equilibrium_stats(p.spec, p.samples, item_seed, p.density_bins, p.route);
  RunOutput out;
  const ResultRow prefix = row_prefix(cfg, item);
  ResultRow row = prefix;
  row.add("n", p.spec.n);
  row.add("d", p.spec.d);
  row.add("dist", payoff_dist_name(p.spec.dist));
  row.add("corr", p.spec.corr);
  row.add("samples", st.samples);
  row.add("mean_count", st.mean_count);
  row.add("se_count", st.se_count);
  for (int k = 0; k < prob_cols; ++k)
    row.add("p_" + std::to_string(k),
            k < static_cast<int>(st.count_prob.size()) ? st.count_prob[k] : 0.0);
  row.add("mean_stable", st.mean_stable);
  row.add("se_stable", st.se_stable);
  row.add("degenerate_rate", st.degenerate_rate);
  out.rows.push_back(std::move(row));
  for (std::size_t b = 0; b < st.density.size(); ++b) {
    ResultRow drow = prefix;
    drow.add("n", p.spec.n);
    drow.add("d", p.spec.d);
    drow.add("dist", payoff_dist_name(p.spec.dist));
    drow.add("corr", p.spec.corr);
    drow.add("bin_mid", st.bin_midpoints[b]);
    drow.add("density", st.density[b]);
    out.density_rows.push_back(std::move(drow));
  }
  return out;
}

}  // namespace detail

inline RunOutput run_item(const ExperimentPlan& plan, const WorkItem& item) {
  const ExperimentConfig& cfg = plan.cfg;
  const std::uint64_t seed = derive_seed(cfg.master_seed, detail::kind_tag(cfg.kind),
                                         static_cast<std::uint64_t>(item.sweep_idx),
                                         static_cast<std::uint64_t>(item.replicate));
  RngStream rng(seed);
  switch (cfg.kind) {
    case ExperimentKind::WellMixed: return detail::run_wellmixed_item(cfg, item, rng);
    case ExperimentKind::Network: return detail::run_network_item(cfg, item, rng);
    case ExperimentKind::Interference: return detail::run_interference_item(cfg, item, rng);
    case ExperimentKind::AiRacePhase: return detail::run_race_item(cfg, item);
    case ExperimentKind::RandomEquilibria:
      return detail::run_equilibria_item(cfg, item, seed, plan.eq_prob_cols);
  }
  throw ConfigError("run_item: unreachable");
}

namespace detail {

inline std::string item_label(const ExperimentPlan& plan, const WorkItem& item) {
  std::string s = "work item " + std::to_string(item.index) + " (sweep point " +
                  std::to_string(item.sweep_idx);
  if (plan.cfg.kind != ExperimentKind::AiRacePhase)
    for (const auto& [path, value] : sweep_point_coords(plan.cfg, item.sweep_idx))
      s += ", " + path + "=" + value.dump();
  s += ", replicate " + std::to_string(item.replicate) + ")";
  return s;
}

}  // namespace detail

// Runs every item, in parallel for workers > 1, and merges outputs in item
// order. A failing item aborts the run with its sweep coordinates.
inline RunOutput run_experiment(const ExperimentPlan& plan, int workers,
                                std::ostream* progress = nullptr) {
  if (workers < 1) throw InvalidParameter("run_experiment: workers >= 1");
  const std::size_t n = plan.items.size();
  std::vector<RunOutput> slots(n);
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0}, done{0};
  std::atomic<bool> failed{false};
  std::mutex io_mutex;
  const std::size_t report_step = std::max<std::size_t>(1, n / 20);

  auto work = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        slots[i] = run_item(plan, plan.items[i]);
      } catch (const std::exception& e) {
        errors[i] = detail::item_label(plan, plan.items[i]) + ": " + e.what();
        failed.store(true);
        return;
      }
      const std::size_t d = done.fetch_add(1) + 1;
      if (progress && (d % report_step == 0 || d == n)) {
        std::lock_guard<std::mutex> lock(io_mutex);
        *progress << "completed " << d << "/" << n << " work items\n";
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    const int count = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), n));
    pool.reserve(static_cast<std::size_t>(count));
    for (int w = 0; w < count; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const std::string& e : errors)
    if (!e.empty()) throw std::runtime_error(e);

  RunOutput merged;
  for (RunOutput& s : slots) {
    for (ResultRow& r : s.rows) merged.rows.push_back(std::move(r));
    for (ResultRow& r : s.density_rows) merged.density_rows.push_back(std::move(r));
  }
  return merged;
}

// Convenience wrapper used by the CLI: plan, run, write, report paths.
inline void run_and_write(const ExperimentConfig& cfg, int workers, std::ostream* progress) {
  const ExperimentPlan plan = plan_experiment(cfg);
  const RunOutput out = run_experiment(plan, workers, progress);
  write_results(out.rows, cfg.out);
  if (progress) *progress << "wrote " << out.rows.size() << " rows to " << cfg.out << "\n";
  if (!out.density_rows.empty()) {
    const std::string dpath = density_path(cfg.out);
    write_results(out.density_rows, dpath);
    if (progress) *progress << "wrote " << out.density_rows.size() << " rows to " << dpath << "\n";
  }
}

}  // namespace egt
