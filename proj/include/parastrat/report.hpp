// Copyright 2026 The Parastrat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "json.hpp"
#include "parastrat/assignment.hpp"
#include "parastrat/cost_model.hpp"
#include "parastrat/solver.hpp"

namespace parastrat {

nlohmann::json strategy_to_json(const ComputationGraph &g, const Strategy &phi,
                                double cost);

/// Full solver output: nodes, cost, machine, stats and optional placement.
nlohmann::json report_to_json(const ComputationGraph &g, const SolveReport &r,
                              const MachineModel &m,
                              const std::optional<DeviceMap> &placement);

struct LoadedStrategy {
  Strategy strategy;
  std::optional<double> cost;
};

/// Reads the "nodes" array of a strategy document and checks each config
/// against the graph and p. Throws ValidationError.
LoadedStrategy strategy_from_json(const ComputationGraph &g,
                                  const nlohmann::json &j, int p);

/// Human-readable cost breakdown and solver statistics.
void write_text_report(std::ostream &os, const ComputationGraph &g,
                       const SolveReport &r, const MachineModel &m,
                       double data_parallel_cost);

}  // namespace parastrat
