#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "otsurf/geometry.hpp"
#include "otsurf/measures.hpp"

namespace otsurf {

struct PlanEntry {
  int i = 0;
  int j = 0;
  double mass = 0.0;
};

struct TransportPlan {
  std::vector<PlanEntry> entries;
  std::size_t sources = 0;
  std::size_t targets = 0;
  double cost = 0.0;  // sum of mass * |X - Y|^2 / 2
  double row_residual = 0.0;
  double col_residual = 0.0;
};

// u on sources, u^c on targets; feasibility means u_i + u^c_j + c_ij >= 0.
struct DualPair {
  std::vector<double> u;
  std::vector<double> uc;
  double infeasibility = 0.0;  // max of -(u_i + u^c_j + c_ij), clipped at 0
  double support_slack = 0.0;  // max of u_i + u^c_j + c_ij over plan support
  double tightness = 0.0;      // max |u - (u^c)^c|
};

struct SolverStats {
  std::string solver;
  std::size_t iterations = 0;
  double seconds = 0.0;
  // Nonbasic arcs with zero reduced cost; zero means the optimum is unique.
  std::size_t degenerate_arcs = 0;
  bool unique_optimum = false;
  double epsilon = 0.0;
};

struct TransportResult {
  TransportPlan plan;
  DualPair dual;
  double w2 = 0.0;
  double primal = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;  // |primal - dual| / max(1, primal)
  SolverStats stats;
};

inline constexpr std::size_t kMaxExactSize = 4000;

// Transportation network simplex with block pricing and exact integer flows.
TransportResult solve_exact(const std::vector<Vec>& xs, const std::vector<double>& a,
                            const std::vector<Vec>& ys, const std::vector<double>& b);
TransportResult solve_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

struct EntropicOptions {
  double epsilon = 1e-3;  // absolute regularization, in units of cost
  std::size_t max_iters = 20000;
  double tolerance = 1e-6;  // L1 marginal residual
};

// Log-domain Sinkhorn with epsilon scaling; dual de-biased by one c-transform.
TransportResult solve_entropic(const std::vector<Vec>& xs, const std::vector<double>& a,
                               const std::vector<Vec>& ys, const std::vector<double>& b,
                               const EntropicOptions& options);
TransportResult solve_entropic(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                               const EntropicOptions& options);

// v^c(Y_j) = max_i (-c(X_i, Y_j) - v_i).
std::vector<double> c_transform(const std::vector<double>& values, const std::vector<Vec>& from,
                                const std::vector<Vec>& to);

// Replaces (u, u^c) by (((u^c)^c), u^c) after fixing u_0 = 0, iterating to a fixed point.
void tighten_duals(DualPair& dual, const std::vector<Vec>& xs, const std::vector<Vec>& ys);

// Recomputes feasibility, support slack and tightness of a dual pair.
void audit_duals(DualPair& dual, const TransportPlan& plan, const std::vector<Vec>& xs,
                 const std::vector<Vec>& ys);

double dual_objective(const DualPair& dual, const std::vector<double>& a,
                      const std::vector<double>& b);

// Targets j with u_i + u^c_j + c_ij <= tol; the argmax is always included.
std::vector<int> c_subdifferential(const DualPair& dual, int i, const std::vector<Vec>& xs,
                                   const std::vector<Vec>& ys, double tol);

struct SpreadReport {
  std::vector<double> spread;  // per source
  double max_spread = 0.0;
  double split_mass = 0.0;     // mass sent outside each source's main-target cluster
  double split_fraction = 0.0; // split mass over total mass
};

inline constexpr double kSpreadThreshold = 1e-6;

// Targets within cluster_radius of the largest-mass target form the main cluster.
SpreadReport monge_spread(const TransportPlan& plan, const std::vector<double>& source_mass,
                          const std::vector<Vec>& ys, double tau = kSpreadThreshold,
                          double cluster_radius = 0.0);

struct MonotonicityCheck {
  std::size_t pairs = 0;
  double worst = 0.0;  // max of c_ij + c_i'j' - c_ij' - c_i'j
};

MonotonicityCheck cyclical_monotonicity_check(const TransportPlan& plan, const std::vector<Vec>& xs,
                                              const std::vector<Vec>& ys, std::size_t pairs,
                                              std::uint64_t seed);

void write_plan_csv(const std::string& path, const TransportPlan& plan);
void write_duals_csv(const std::string& path, const std::vector<double>& values);

}  // namespace otsurf
