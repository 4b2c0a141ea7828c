// Copyright 2026 The Parastrat Authors
// SPDX-License-Identifier: Apache-2.0

#include "parastrat/report.hpp"

#include <iomanip>

namespace parastrat {

nlohmann::json strategy_to_json(const ComputationGraph &g, const Strategy &phi,
                                double cost) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto &n : g.nodes()) {
    nodes.push_back(
        {{"id", n.id}, {"name", n.name}, {"config", phi.at(n.id).splits}});
  }
  return {{"nodes", nodes}, {"cost", cost}};
}

nlohmann::json report_to_json(const ComputationGraph &g, const SolveReport &r,
                              const MachineModel &m,
                              const std::optional<DeviceMap> &placement) {
  nlohmann::json j = strategy_to_json(g, r.strategy, r.cost);
  j["machine"] = to_json(m);
  std::vector<size_t> dep_sizes;
  for (const auto &d : r.dependent) dep_sizes.push_back(d.size());
  j["stats"] = {{"algorithm", std::string(to_string(r.algorithm))},
                {"M", r.max_dependent},
                {"K", r.max_configs},
                {"K_min", r.min_configs},
                {"K_mean", r.mean_configs},
                {"max_combinations", r.max_combinations},
                {"peak_table_entries", r.peak_table_entries},
                {"total_table_entries", r.total_table_entries},
                {"wall_seconds", r.wall_seconds},
                {"tabulate_seconds", r.tabulate_seconds},
                {"order", r.order.seq},
                {"dependent_sizes", dep_sizes}};
  if (placement) j["placement"] = placement_to_json(*placement);
  return j;
}

LoadedStrategy strategy_from_json(const ComputationGraph &g,
                                  const nlohmann::json &j, int p) {
  LoadedStrategy out;
  if (!j.is_object() || !j.contains("nodes") || !j["nodes"].is_array()) {
    throw ValidationError("strategy: expected an object with a \"nodes\" array");
  }
  for (const auto &n : j["nodes"]) {
    if (!n.is_object() || !n.contains("id") || !n.contains("config")) {
      throw ValidationError("strategy: node entries need \"id\" and \"config\"");
    }
    NodeId id;
    Config c;
    try {
      id = n["id"].get<NodeId>();
      c.splits = n["config"].get<std::vector<int>>();
    } catch (const nlohmann::json::exception &e) {
      throw ValidationError(std::string("strategy: ") + e.what());
    }
    if (!g.contains(id)) {
      throw ValidationError("strategy: unknown node " + std::to_string(id));
    }
    if (!is_valid_config(g.node(id), c, p)) {
      throw ValidationError("strategy: config " + c.str() + " is not valid for node " +
                            std::to_string(id) + " on " + std::to_string(p) +
                            " devices");
    }
    if (!out.strategy.emplace(id, c).second) {
      throw ValidationError("strategy: node " + std::to_string(id) + " repeated");
    }
  }
  if (out.strategy.size() != g.size()) {
    throw ValidationError("strategy: covers " + std::to_string(out.strategy.size()) +
                          " of " + std::to_string(g.size()) + " nodes");
  }
  if (j.contains("cost") && j["cost"].is_number()) {
    out.cost = j["cost"].get<double>();
  }
  return out;
}

void write_text_report(std::ostream &os, const ComputationGraph &g,
                       const SolveReport &r, const MachineModel &m,
                       double data_parallel_cost) {
  os << std::setprecision(6);
  os << "algorithm        " << to_string(r.algorithm) << '\n'
     << "devices (p)      " << m.p << '\n'
     << "r = F/B          " << m.r() << " FLOP/byte\n"
     << "best cost        " << r.cost << " FLOP\n"
     << "data parallel    " << data_parallel_cost << " FLOP (ratio "
     << r.cost / data_parallel_cost << ")\n"
     << "M                " << r.max_dependent << '\n'
     << "K (min/mean/max) " << r.min_configs << " / " << r.mean_configs << " / "
     << r.max_configs << '\n'
     << "max combinations " << r.max_combinations << '\n'
     << "table entries    " << r.total_table_entries << " total, "
     << r.peak_table_entries << " peak\n"
     << "wall time        " << r.wall_seconds << " s (tabulation "
     << r.tabulate_seconds << " s)\n\n";

  if (r.breakdown) {
    const auto &b = *r.breakdown;
    os << "layer terms " << b.layer_total << " FLOP, transfer terms "
       << b.transfer_total << " FLOP\n\n";
    os << std::left << std::setw(6) << "id" << std::setw(28) << "name"
       << std::setw(26) << "config" << std::setw(14) << "compute"
       << std::setw(14) << "comm bytes" << "cost\n";
    for (const auto &t : b.nodes) {
      const Node &n = g.node(t.id);
      os << std::setw(6) << t.id << std::setw(28) << n.name << std::setw(26)
         << r.strategy.at(t.id).str() << std::setw(14) << t.layer.compute_flop
         << std::setw(14) << t.layer.comm_bytes << t.cost
         << (t.layer.generic ? "  [generic]" : "") << '\n';
    }
    os << '\n' << std::setw(12) << "edge" << std::setw(14) << "bytes" << "cost\n";
    for (const auto &t : b.edges) {
      os << std::setw(12) << (std::to_string(t.src) + "->" + std::to_string(t.dst))
         << std::setw(14) << t.bytes << t.cost << '\n';
    }
    os << std::right;
  }
  if (!r.dependent.empty()) {
    os << "\nrank node |D|\n";
    for (size_t i = 0; i < r.dependent.size(); ++i) {
      os << i << ' ' << r.order.seq[i] << ' ' << r.dependent[i].size() << '\n';
    }
  }
}

}  // namespace parastrat
