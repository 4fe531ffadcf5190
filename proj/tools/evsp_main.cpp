// evsp: generate instances, solve them, bound them, and audit schedules.
//
// Exit codes: 0 on success, 1 when the answer is "infeasible" (a solve that
// leaves trips uncovered, a schedule that fails validation), 2 for usage
// errors, unreadable inputs, and refused exhaustive solves.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "evsp/bounds.hpp"
#include "evsp/generator.hpp"
#include "evsp/heuristics.hpp"

namespace {

using namespace evsp;

struct GridFlags {
  double soc_step_pct = 3.0;
  double soc_min_pct = 22.0;
  int block_len = 5;
};

void add_grid_flags(CLI::App* cmd, GridFlags& g) {
  cmd->add_option("--soc-step", g.soc_step_pct,
                  "SoC grid step, percent of battery")
      ->capture_default_str();
  cmd->add_option("--soc-min", g.soc_min_pct,
                  "lowest allowed SoC, percent of battery")
      ->capture_default_str();
  cmd->add_option("--block-len", g.block_len, "charging block length, minutes")
      ->capture_default_str();
}

SocGrid make_grid(const GridFlags& g) {
  auto step = static_cast<SocTenths>(std::llround(g.soc_step_pct * 10));
  auto s_min = static_cast<SocTenths>(std::llround(g.soc_min_pct * 10));
  if (step <= 0) throw EvspError("--soc-step must be positive");
  if (s_min < 0 || s_min >= kSocFull)
    throw EvspError("--soc-min must lie in [0, 100) percent");
  return SocGrid::make(s_min, kSocFull, step);
}

TimeBlocks make_blocks(const Instance& inst, const GridFlags& g) {
  if (g.block_len <= 0) throw EvspError("--block-len must be positive");
  return TimeBlocks::make(inst.horizon_start, inst.horizon_end, g.block_len);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw EvspError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw EvspError("failed writing '" + path + "'");
}

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// --- generate ---------------------------------------------------------------

struct GenerateArgs {
  int seed = 1;
  int trips = 30;
  std::string profile = "paper";
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  GeneratorProfile profile;
  if (a.profile == "paper")
    profile = GeneratorProfile::paper();
  else if (a.profile == "compact")
    profile = GeneratorProfile::compact();
  else
    throw EvspError("unknown profile '" + a.profile + "'");
  Instance inst = generate_instance(a.seed, a.trips, profile);
  save_instance(inst, a.out);
  std::cout << "wrote " << a.out << " (" << inst.trips.size()
            << " trips, seed " << a.seed << ", profile " << a.profile
            << ")\n";
  return 0;
}

// --- solve ------------------------------------------------------------------

struct SolveArgs {
  std::string instance;
  std::string out;
  std::string heuristic = "tcg";
  GridFlags grid;
  double zmin = 0.01;
  int iters_window = 30;
  double theta = 0.70;
  bool node_removal = false;
  double bip_time_limit = 3600.0;
  std::string columns = "per-network";
  int threads = 0;
  std::string log_path;
  std::string stats_path;
  std::string lb_file;
};

int run_solve(const SolveArgs& a) {
  Instance inst = load_instance(a.instance);
  SocGrid grid = make_grid(a.grid);
  TimeBlocks blocks = make_blocks(inst, a.grid);

  HeuristicConfig cfg;
  if (a.heuristic == "pnb")
    cfg.kind = HeuristicKind::PriceAndBranch;
  else if (a.heuristic == "tpnb")
    cfg.kind = HeuristicKind::TruncatedPnB;
  else if (a.heuristic == "tcg")
    cfg.kind = HeuristicKind::TruncatedCG;
  else
    throw EvspError("unknown heuristic '" + a.heuristic + "'");
  cfg.theta = a.theta;
  cfg.node_removal = a.node_removal;
  cfg.bip_time_limit_sec = a.bip_time_limit;
  cfg.colgen.zmin_percent = a.zmin;
  cfg.colgen.iters_window = a.iters_window;
  cfg.colgen.threads = resolve_threads(a.threads);
  if (a.columns == "per-network")
    cfg.colgen.columns_per_iter = ColumnsPerIter::PerNetwork;
  else if (a.columns == "global-best")
    cfg.colgen.columns_per_iter = ColumnsPerIter::GlobalBest;
  else
    throw EvspError("unknown --columns-per-iter '" + a.columns + "'");

  std::vector<Network> nets =
      build_all_networks(inst, grid, blocks, RoundingMode::Conservative);
  if (!a.stats_path.empty()) write_text(a.stats_path, network_stats_csv(nets));

  HeuristicResult res = run_heuristic(inst, std::move(nets), cfg);
  if (!a.log_path.empty()) write_text(a.log_path, colgen_log_csv(res.log));
  if (!a.out.empty()) save_schedule(res.schedule, a.out);

  if (!res.feasible) {
    std::cerr << "no feasible schedule: these trips could not be covered:";
    for (int t : res.uncovered_trips) std::cerr << ' ' << t;
    std::cerr << "\n";
    return 1;
  }

  std::cout.setf(std::ios::fixed);
  std::cout.precision(2);
  std::cout << "It: " << res.stats.colgen_iters << " iterations, PP: "
            << res.stats.pricing_sec_total << " s pricing, RMP: "
            << res.stats.lp_sec_total << " s master LP\n";
  std::cout << "Sol: " << res.objective << " cents, B: "
            << res.schedule.bus_count << " buses\n";
  if (!a.lb_file.empty()) {
    std::ifstream in(a.lb_file);
    if (!in) throw EvspError("cannot open '" + a.lb_file + "'");
    nlohmann::json j = nlohmann::json::parse(in, nullptr, true);
    double lb = j.at("value").get<double>();
    if (lb > 0)
      std::cout << "G: " << gap(res.objective, lb)
                << "% above the lower bound " << lb << "\n";
    else
      std::cout << "G: not available (lower bound file holds no bound)\n";
  }
  std::cout << summarize(res.schedule, inst);
  return 0;
}

// --- lowerbound ---------------------------------------------------------- --

struct LbArgs {
  std::string instance;
  std::string out;
  GridFlags grid;
  double time_cap = 0.0;
  int threads = 0;
  std::string log_path;
};

int run_lowerbound(const LbArgs& a) {
  Instance inst = load_instance(a.instance);
  SocGrid grid = make_grid(a.grid);
  TimeBlocks blocks = make_blocks(inst, a.grid);
  ColgenParams params;
  params.threads = resolve_threads(a.threads);
  params.time_cap_sec = a.time_cap;
  LowerBoundResult res = true_lower_bound(inst, grid, blocks, params);
  if (!a.log_path.empty()) write_text(a.log_path, colgen_log_csv(res.log));
  if (!a.out.empty()) {
    nlohmann::ordered_json j;
    j["value"] = res.value;
    j["truncated"] = res.truncated;
    write_text(a.out, j.dump(2) + "\n");
  }
  std::cout.setf(std::ios::fixed);
  std::cout.precision(2);
  std::cout << "lower bound: " << res.value << " cents ("
            << (res.truncated ? "time-capped Lagrangian bound"
                              : "relaxation solved to optimality")
            << ")\n";
  if (res.truncated && res.value <= 0)
    std::cerr << "warning: the cap hit before any usable bound appeared\n";
  return 0;
}

// --- validate / report --------------------------------------------------- --

struct ValidateArgs {
  std::string instance;
  std::string schedule;
  GridFlags grid;
};

int run_validate(const ValidateArgs& a) {
  Instance inst = load_instance(a.instance);
  Schedule sched = load_schedule(a.schedule);
  SimVerdict verdict =
      simulate(sched, inst, make_grid(a.grid), make_blocks(inst, a.grid));
  if (verdict.feasible) {
    std::cout << "schedule is feasible\n";
    return 0;
  }
  std::cerr << "schedule is infeasible:\n";
  for (const std::string& v : verdict.violations)
    std::cerr << "  " << v << "\n";
  return 1;
}

struct ReportArgs {
  std::string instance;
  std::string schedule;
  std::string occupancy_out;
  GridFlags grid;
};

int run_report(const ReportArgs& a) {
  Instance inst = load_instance(a.instance);
  Schedule sched = load_schedule(a.schedule);
  TimeBlocks blocks = make_blocks(inst, a.grid);
  std::string csv = occupancy_csv(sched, inst, blocks);
  if (a.occupancy_out.empty())
    std::cout << csv;
  else
    write_text(a.occupancy_out, csv);
  std::cout << summarize(sched, inst);
  return 0;
}

// --- oracle ---------------------------------------------------------------

struct OracleArgs {
  std::string instance;
  std::string mode = "paths";
  std::string rounding = "conservative";
  GridFlags grid;
};

int run_oracle(const OracleArgs& a) {
  Instance inst = load_instance(a.instance);
  OracleMode mode;
  if (a.mode == "paths")
    mode = OracleMode::NetworkPaths;
  else if (a.mode == "continuous")
    mode = OracleMode::ContinuousDuties;
  else
    throw EvspError("unknown oracle mode '" + a.mode + "'");
  RoundingMode rounding;
  if (a.rounding == "conservative")
    rounding = RoundingMode::Conservative;
  else if (a.rounding == "optimistic")
    rounding = RoundingMode::Optimistic;
  else
    throw EvspError("unknown rounding '" + a.rounding + "'");
  OracleResult res = oracle_solve(inst, mode, make_grid(a.grid),
                                  make_blocks(inst, a.grid), rounding,
                                  OracleCaps{});
  if (res.refused) {
    std::cerr << "oracle refused: " << res.refusal_reason << "\n";
    return 2;
  }
  std::cout.setf(std::ios::fixed);
  std::cout.precision(4);
  std::cout << "columns: " << res.n_columns << "\n";
  std::cout << "LP: " << res.lp_value << " cents\n";
  std::cout << "IP: " << res.ip_value << " cents\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"electric vehicle scheduling: solver, bounds, and audits"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* c_gen = app.add_subcommand("generate", "write a random instance");
  c_gen->add_option("--seed", gen.seed, "random seed")->capture_default_str();
  c_gen->add_option("--trips", gen.trips, "number of timetabled trips")
      ->capture_default_str();
  c_gen->add_option("--profile", gen.profile, "paper or compact")
      ->capture_default_str();
  c_gen->add_option("-o,--out", gen.out, "output instance path")->required();

  SolveArgs sol;
  CLI::App* c_sol = app.add_subcommand("solve", "build a vehicle schedule");
  c_sol->add_option("instance", sol.instance, "instance JSON")->required();
  c_sol->add_option("-o,--out", sol.out, "schedule output path");
  c_sol->add_option("--heuristic", sol.heuristic, "pnb, tpnb, or tcg")
      ->capture_default_str();
  add_grid_flags(c_sol, sol.grid);
  c_sol->add_option("--zmin", sol.zmin,
                    "truncation threshold, percent improvement over the window")
      ->capture_default_str();
  c_sol->add_option("--iters-window", sol.iters_window,
                    "iterations the truncation test looks back")
      ->capture_default_str();
  c_sol->add_option("--theta", sol.theta, "column fixing threshold (>= 0.5)")
      ->capture_default_str();
  c_sol->add_flag("--node-removal", sol.node_removal,
                  "shrink networks after each fixing round");
  c_sol->add_option("--bip-time-limit", sol.bip_time_limit,
                    "seconds for the final integer solve")
      ->capture_default_str();
  c_sol->add_option("--columns-per-iter", sol.columns,
                    "per-network or global-best")
      ->capture_default_str();
  c_sol->add_option("--threads", sol.threads, "pricing threads, 0 = all cores")
      ->capture_default_str();
  c_sol->add_option("--log", sol.log_path, "write the iteration log CSV here");
  c_sol->add_option("--dump-network-stats", sol.stats_path,
                    "write network construction counts CSV here");
  c_sol->add_option("--lb-file", sol.lb_file,
                    "lower bound JSON (from 'lowerbound') to report a gap");

  LbArgs lb;
  CLI::App* c_lb = app.add_subcommand("lowerbound",
                                      "true lower bound on the optimum");
  c_lb->add_option("instance", lb.instance, "instance JSON")->required();
  c_lb->add_option("-o,--out", lb.out, "bound output path (JSON)");
  add_grid_flags(c_lb, lb.grid);
  c_lb->add_option("--lb-time-cap", lb.time_cap,
                   "seconds before settling for the Lagrangian bound")
      ->capture_default_str();
  c_lb->add_option("--threads", lb.threads, "pricing threads, 0 = all cores")
      ->capture_default_str();
  c_lb->add_option("--log", lb.log_path, "write the iteration log CSV here");

  ValidateArgs val;
  CLI::App* c_val = app.add_subcommand("validate", "audit a schedule");
  c_val->add_option("instance", val.instance, "instance JSON")->required();
  c_val->add_option("schedule", val.schedule, "schedule JSON")->required();
  add_grid_flags(c_val, val.grid);

  ReportArgs rep;
  CLI::App* c_rep = app.add_subcommand("report",
                                       "occupancy table and duty statistics");
  c_rep->add_option("instance", rep.instance, "instance JSON")->required();
  c_rep->add_option("schedule", rep.schedule, "schedule JSON")->required();
  c_rep->add_option("-o,--occupancy", rep.occupancy_out,
                    "write the station occupancy CSV here");
  add_grid_flags(c_rep, rep.grid);

  OracleArgs ora;
  CLI::App* c_ora = app.add_subcommand(
      "oracle", "exhaustive reference solve for small instances");
  c_ora->add_option("instance", ora.instance, "instance JSON")->required();
  c_ora->add_option("--mode", ora.mode, "paths or continuous")
      ->capture_default_str();
  c_ora->add_option("--rounding", ora.rounding,
                    "conservative or optimistic (paths mode)")
      ->capture_default_str();
  add_grid_flags(c_ora, ora.grid);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (c_gen->parsed()) return run_generate(gen);
    if (c_sol->parsed()) return run_solve(sol);
    if (c_lb->parsed()) return run_lowerbound(lb);
    if (c_val->parsed()) return run_validate(val);
    if (c_rep->parsed()) return run_report(rep);
    if (c_ora->parsed()) return run_oracle(ora);
  } catch (const EvspError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
