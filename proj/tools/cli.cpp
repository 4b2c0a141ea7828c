// Copyright 2026 The Parastrat Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "parastrat/assignment.hpp"
#include "parastrat/model_zoo.hpp"
#include "parastrat/report.hpp"
#include "parastrat/solver.hpp"

namespace parastrat::cli {

namespace {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GraphSource {
  std::string graph;
  std::string model;
  int batch = 0;

  void attach(CLI::App *app) {
    app->add_option("--graph", graph, "graph JSON file");
    app->add_option("--model", model,
                    "built-in model: alexnet, inception_v3, rnnlm, transformer, "
                    "toy_fig3");
    app->add_option("--batch", batch, "batch size for --model (0: default)");
  }

  std::string label() const { return graph.empty() ? model : graph; }

  ComputationGraph load() const {
    if (graph.empty() == model.empty()) {
      throw InputError("give exactly one of --graph or --model");
    }
    if (!graph.empty()) return load_graph(graph);
    auto family = parse_model_family(model);
    if (!family) throw InputError("unknown model \"" + model + "\"");
    ModelSpec spec;
    spec.family = *family;
    spec.batch = batch;
    return build(spec);
  }
};

struct MachineFlags {
  int p = 1;
  double flops = MachineModel{}.flops;
  double bandwidth = MachineModel{}.bandwidth;
  std::string file;
  CLI::Option *p_opt = nullptr;
  CLI::Option *flops_opt = nullptr;
  CLI::Option *bw_opt = nullptr;

  void attach(CLI::App *app, bool with_p = true) {
    if (with_p) p_opt = app->add_option("--p", p, "device count");
    flops_opt = app->add_option("--flops", flops, "per-device FLOP/s");
    bw_opt = app->add_option("--bandwidth", bandwidth, "link bandwidth, bytes/s");
    app->add_option("--machine", file, "machine JSON {\"p\",\"flops\",\"bandwidth\"}");
  }

  MachineModel resolve(std::optional<MachineModel> base = std::nullopt) const {
    MachineModel m = base.value_or(MachineModel{});
    if (!file.empty()) {
      std::ifstream in(file);
      if (!in) throw InputError("cannot open " + file);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception &e) {
        throw InputError("machine file: " + std::string(e.what()));
      }
      m = machine_from_json(j, m);
    }
    if (p_opt && p_opt->count()) m.p = p;
    if (flops_opt->count()) m.flops = flops;
    if (bw_opt->count()) m.bandwidth = bandwidth;
    m.validate();
    return m;
  }
};

ConfigPolicy policy_of(const std::string &s) {
  auto p = parse_config_policy(s);
  if (!p) throw InputError("unknown policy \"" + s + "\"");
  return *p;
}

void write_file(const std::string &path, const std::string &text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

nlohmann::json read_json_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    throw InputError(path + ": " + e.what());
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

int cmd_generate(const GraphSource &src, const std::string &out_path,
                 std::ostream &out) {
  if (src.model.empty() || !src.graph.empty()) {
    throw InputError("generate needs --model");
  }
  const ComputationGraph g = src.load();
  const std::string text = to_json(g).dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
  } else {
    write_file(out_path, text);
    out << "wrote " << g.size() << " nodes, " << g.edges().size() << " edges to "
        << out_path << '\n';
  }
  return kExitOk;
}

int cmd_solve(const GraphSource &src, const MachineFlags &mf,
              const std::string &algo_s, const std::string &policy_s,
              double table_limit, const std::string &out_path,
              const std::string &report_path, std::ostream &out,
              std::ostream &err) {
  const ComputationGraph g = src.load();
  for (const auto &w : g.warnings()) err << "warning: " << w << '\n';
  const MachineModel m = mf.resolve();
  const auto algo = parse_algorithm(algo_s);
  if (!algo) throw InputError("unknown algorithm \"" + algo_s + "\"");
  const ConfigPolicy policy = policy_of(policy_s);
  SolveOptions opts;
  opts.table_limit = table_limit;
  const SolveReport r = solve(g, m, policy, *algo, opts);
  const DeviceMap placement = greedy_assign(g, r.strategy, m, r.order);
  const double dp_cost =
      strategy_cost(g, data_parallel_strategy(g, m.p, policy), m);

  out << "algorithm " << to_string(r.algorithm) << '\n'
      << "cost " << fmt(r.cost) << '\n'
      << "data_parallel_cost " << fmt(dp_cost) << '\n'
      << "ratio " << r.cost / dp_cost << '\n'
      << "M " << r.max_dependent << '\n'
      << "K " << r.max_configs << '\n'
      << "wall_seconds " << r.wall_seconds << '\n';
  if (!out_path.empty()) {
    nlohmann::json j = report_to_json(g, r, m, placement);
    j["stats"]["data_parallel_cost"] = dp_cost;
    write_file(out_path, j.dump(2) + "\n");
  }
  if (!report_path.empty()) {
    std::ostringstream os;
    write_text_report(os, g, r, m, dp_cost);
    write_file(report_path, os.str());
  }
  return kExitOk;
}

int cmd_compare(const GraphSource &src, const MachineFlags &mf,
                const std::vector<int> &ps, const std::string &policy_s,
                double table_limit, const std::string &out_path,
                const std::string &ranks_path, std::ostream &out,
                std::ostream &err) {
  const ComputationGraph g = src.load();
  for (const auto &w : g.warnings()) err << "warning: " << w << '\n';
  const ConfigPolicy policy = policy_of(policy_s);
  std::ostringstream summary, ranks;
  summary << "graph,p,algorithm,status,cost,wall_seconds,M,K,max_combinations,"
             "peak_table_entries,total_table_entries\n";
  ranks << "p,rank,dp_node,dp_dependent,bfs_node,bfs_dependent\n";

  const SortResult sorted = sort_nodes(g);
  const Ordering bfs = bfs_order(g);
  const auto bfs_dep = bfs_dependent_sets(g, bfs);

  for (int p : ps) {
    MachineModel m = mf.resolve();
    m.p = p;
    m.validate();
    const CostTables t = tabulate(g, m, policy);
    SolveOptions opts;
    opts.table_limit = table_limit;
    for (Algorithm a : {Algorithm::dp, Algorithm::bfs}) {
      summary << src.label() << ',' << p << ',' << to_string(a) << ',';
      try {
        const SolveReport r =
            a == Algorithm::dp ? dp_solve(g, t, opts) : bfs_dp_solve(g, t, opts);
        summary << "ok," << fmt(r.cost) << ',' << r.wall_seconds << ','
                << r.max_dependent << ',' << r.max_configs << ','
                << r.max_combinations << ',' << r.peak_table_entries << ','
                << r.total_table_entries << '\n';
      } catch (const TableLimitExceeded &e) {
        summary << "aborted,,," << e.max_dependent << ',' << e.max_configs << ','
                << e.projected << ",,\n";
        err << "p=" << p << ' ' << to_string(a) << ": " << e.what() << '\n';
      }
    }
    for (size_t i = 0; i < g.size(); ++i) {
      ranks << p << ',' << i << ',' << sorted.order.seq[i] << ','
            << sorted.dependent[i].size() << ',' << bfs.seq[i] << ','
            << bfs_dep[i].size() << '\n';
    }
  }
  if (out_path.empty()) {
    out << summary.str();
  } else {
    write_file(out_path, summary.str());
  }
  if (!ranks_path.empty()) write_file(ranks_path, ranks.str());
  return kExitOk;
}

int cmd_validate(const GraphSource &src, const MachineFlags &mf,
                 const std::string &strategy_path, std::ostream &out,
                 std::ostream &err) {
  const ComputationGraph g = src.load();
  for (const auto &w : g.warnings()) err << "warning: " << w << '\n';
  const nlohmann::json j = read_json_file(strategy_path);
  std::optional<MachineModel> base;
  if (j.contains("machine")) base = machine_from_json(j["machine"]);
  const MachineModel m = mf.resolve(base);
  const LoadedStrategy s = strategy_from_json(g, j, m.p);
  const double cost = strategy_cost(g, s.strategy, m);
  out << "valid strategy for " << g.size() << " nodes on p=" << m.p << '\n'
      << "cost " << fmt(cost) << '\n';
  if (s.cost) {
    const double rel = std::abs(cost - *s.cost) / std::max(1.0, std::abs(cost));
    out << "reported " << fmt(*s.cost) << " relative difference " << rel << '\n';
    if (rel > 1e-9) {
      err << "error: recomputed cost differs from the reported cost\n";
      return kExitInput;
    }
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Parallelization strategy solver"};
  app.require_subcommand(1);

  GraphSource gen_src, solve_src, cmp_src, val_src;
  MachineFlags solve_m, cmp_m, val_m;
  std::string gen_out, solve_out, solve_report, cmp_out, cmp_report,
      val_strategy;
  std::string algo = "dp", solve_policy = "powers_of_two",
              cmp_policy = "powers_of_two";
  double solve_limit = 1e8, cmp_limit = 1e8;
  std::vector<int> cmp_ps{4, 8};

  auto *gen = app.add_subcommand("generate", "write a built-in model as graph JSON");
  gen_src.attach(gen);
  gen->add_option("--out", gen_out, "output path (default stdout)");

  auto *sol = app.add_subcommand("solve", "find a minimum-cost strategy");
  solve_src.attach(sol);
  solve_m.attach(sol);
  sol->add_option("--algo", algo, "dp, bfs or brute");
  sol->add_option("--policy", solve_policy, "all, divisors or powers_of_two");
  sol->add_option("--table-limit", solve_limit, "abort above this many DP combinations");
  sol->add_option("--out", solve_out, "strategy JSON path");
  sol->add_option("--report", solve_report, "text report path");

  auto *cmp = app.add_subcommand("compare-orderings",
                                 "run dp and bfs side by side");
  cmp_src.attach(cmp);
  cmp_m.attach(cmp, false);
  cmp->add_option("--p", cmp_ps, "device counts, comma separated")
      ->delimiter(',');
  cmp->add_option("--policy", cmp_policy, "all, divisors or powers_of_two");
  cmp->add_option("--table-limit", cmp_limit, "abort above this many DP combinations");
  cmp->add_option("--out", cmp_out, "summary CSV path (default stdout)");
  cmp->add_option("--report", cmp_report, "per-rank dependent-set CSV path");

  auto *val = app.add_subcommand("validate", "re-check and re-cost a strategy");
  val_src.attach(val);
  val_m.attach(val);
  val->add_option("--strategy", val_strategy, "strategy JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (gen->parsed()) return cmd_generate(gen_src, gen_out, out);
    if (sol->parsed()) {
      return cmd_solve(solve_src, solve_m, algo, solve_policy, solve_limit,
                       solve_out, solve_report, out, err);
    }
    if (cmp->parsed()) {
      return cmd_compare(cmp_src, cmp_m, cmp_ps, cmp_policy, cmp_limit, cmp_out,
                         cmp_report, out, err);
    }
    if (val->parsed()) return cmd_validate(val_src, val_m, val_strategy, out, err);
  } catch (const TableLimitExceeded &e) {
    err << "error: " << e.what() << '\n';
    return kExitResource;
  } catch (const SearchSpaceExceeded &e) {
    err << "error: " << e.what() << '\n';
    return kExitResource;
  } catch (const std::bad_alloc &) {
    err << "error: out of memory\n";
    return kExitResource;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace parastrat::cli
