#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "otsurf/geometry.hpp"
#include "otsurf/measures.hpp"
#include "otsurf/transport.hpp"

namespace otsurf {

struct VerificationReport {
  std::string checker;
  std::string anchor;  // the inequality or property being exercised
  std::size_t samples = 0;
  double worst_violation = 0.0;
  std::optional<double> implied_constant;
  double tolerance = 0.0;
  bool pass = false;
  nlohmann::json details = nlohmann::json::object();
  nlohmann::json config = nlohmann::json::object();

  // pass is recomputed as worst_violation <= tolerance.
  void settle() { pass = worst_violation <= tolerance; }
  nlohmann::json to_json() const;
};

// u(X) = max_k (-c(X, Z_k) + a_k); c-convex by construction.
struct SyntheticPotential {
  std::vector<Vec> slopes;
  std::vector<double> offsets;

  double operator()(const Vec& x) const;
  int argmax(const Vec& x) const;
  std::vector<int> active(const Vec& x, double tol) const;
  std::vector<double> evaluate(const std::vector<Vec>& pts) const;

  // Slopes at the given points with offsets kappa <Z, direction>; its c-subdifferential is a
  // smooth shift of the identity when kappa is small.
  static SyntheticPotential shift(const std::vector<Vec>& pts, const Vec& direction, double kappa);
  // Pieces whose slopes are c_exp of the given tangent vectors at x0, all equal at x0 with value 0.
  static SyntheticPotential crease(const ConvexBody& body, const Vec& x0, const std::vector<Tan>& tangents);
};

// Source values of a potential together with a weighted target sampling for subdifferential
// measures. Targets are assigned to the source maximizing -c(X_i, Y_j) - u_i.
struct PotentialOnSamples {
  SamplingPtr sources;
  std::vector<double> u;
  SamplingPtr targets;
};

std::vector<int> assign_targets(const PotentialOnSamples& pot);

// --- quasi-convexity along c-segments ---------------------------------------------------------

// Worst value of LHS - t * RHS over the t grid; the inequality says it is <= 0.
double qqconv_check(const ConvexBody& body, const Vec& x0, const Vec& x, const Vec& xbar0,
                    const Vec& xbar1, const std::vector<double>& t_grid);

VerificationReport qqconv_battery(const ConvexBody& body, std::size_t trials, std::size_t t_points,
                                  std::uint64_t seed);

// --- sections ---------------------------------------------------------------------------------

// S = {X : u(X) <= m0(X)}, m0(X) = -c(X, slope) + height_offset.
struct SectionSpec {
  Vec slope = Vec::Zero();
  double height_offset = 0.0;

  // Offset for the section of height h through (x0, u(x0)).
  static SectionSpec through(const Vec& x0, double u_x0, const Vec& slope, double h);
  double m0(const Vec& x) const { return -cost(x, slope) + height_offset; }
};

struct Section {
  std::vector<int> members;
  std::vector<Tan> projected;  // chart coordinates at the slope point, one per member
  bool crosses_side = false;
  double convexity_defect = 0.0;
  double spacing = 0.0;
};

Section section_extract(const SurfaceSampling& sampling, const std::vector<double>& u,
                        const SectionSpec& spec);

struct LocalityResult {
  double h_star = 0.0;  // largest scanned height whose section lies in the eta ball
  bool pass = false;    // requested height <= h_star
  std::size_t heights_scanned = 0;
};

LocalityResult section_locality_check(const SurfaceSampling& sampling, const std::vector<double>& u,
                                      const Vec& x0, double u_x0, const Vec& slope, double h,
                                      double eta, std::size_t scan = 40);

// --- Aleksandrov-type estimates ---------------------------------------------------------------

inline constexpr double kAreaSlack = 0.2;

struct LowerAleksandrov {
  double lhs = 0.0;  // sup_S (m0 - u)^n
  double rhs = 0.0;  // theta / 4 * H(A) * H(subdifferential of A)
  double margin = 0.0;
  double area_a = 0.0;
  double area_image = 0.0;
  std::size_t section_size = 0;
  std::size_t a_size = 0;
  bool pass = false;  // margin >= -kAreaSlack * rhs
};

// A is the part of S whose projection lies in the half-dilation of the projected hull about its
// centroid. Throws HypothesisFailed naming the first localization condition that breaks.
LowerAleksandrov lower_aleksandrov_check(const PotentialOnSamples& pot, const SectionSpec& spec,
                                         double theta, double conerad_half);

struct UpperAleksandrov {
  double implied_constant = 0.0;  // for the first direction
  std::vector<std::pair<Tan, double>> by_direction;
  double chord = 0.0;
  double plane_distance = 0.0;
  double height = 0.0;      // (m0(x0) - u(x0))^n
  double area_section = 0.0;
  double area_subdiff = 0.0;
};

// Subdifferential at x0 is the c-hull of the active slopes; its area is measured on the sampling
// through the chart at x0. The section and the active slopes must lie on the same side as x0 and
// within hypothesis_radius of it.
UpperAleksandrov upper_aleksandrov_check(const ConvexBody& body, const SyntheticPotential& potential,
                                         const SurfaceSampling& sampling, const SectionSpec& spec,
                                         const Vec& x0, const std::vector<Tan>& directions,
                                         double hypothesis_radius);

struct CCone {
  std::vector<double> values;     // K at each sample point
  std::vector<int> admissible;    // candidate indices kept
  double worst_excess_on_section = 0.0;  // max of K - m0 over S
  double vertex_gap = 0.0;        // |K(x0) - u(x0)|
};

// Candidates are admissible when their c-affine function through (x0, u(x0)) stays below m0 on S;
// x0 must belong to S.
CCone c_cone_eval(const SurfaceSampling& sampling, const std::vector<int>& section, const Vec& x0,
                  double u_x0, const SectionSpec& spec, const std::vector<Vec>& candidates);

// --- constants and thresholds -----------------------------------------------------------------

// Integral of cos^(n+2) sin^(n-2) over [0, pi/2] by adaptive Simpson to 1e-12.
double stay_away_integral(int n);
double sphere_measure(int k);  // H^k of the unit k-sphere
double stay_away_constant(int n, double rho0, double conerad, double diam);

struct StayAway {
  double constant = 0.0;
  double worst_ratio = 0.0;
  std::size_t same_side_pairs = 0;
  std::size_t skipped_pairs = 0;
  bool pass = true;
};

StayAway stay_away_check(const SurfaceSampling& src, const SurfaceSampling& dst,
                         const TransportResult& result, double constant);

struct Threshold {
  double rhs = 0.0;
  double first_term = 0.0;
  double second_term = 0.0;
  double w2_threshold = 0.0;  // rhs^((n+2)/2)
  bool verdict = false;       // W2^(2/(n+2)) < rhs
};

Threshold threshold_eval(int n, double conerad_strict, double constant, double geodesic_constant,
                         double radial_lipschitz, double w2);

struct NonsplittingScan {
  double delta = 0.0;
  bool hypothesis = false;
  std::size_t exceptions = 0;
};

struct PotentialLipschitz {
  double lipschitz = 0.0;    // max |u_i - u_j| / graph distance over graph edges
  double bound = 0.0;        // C * L_pi^2 * W2^(2/(n+2)), zero when not provided
  bool within_bound = true;  // lipschitz <= 1.2 * bound
  double graph_constant = 1.0;  // max graph distance / Euclidean distance over all pairs
  double worst_distance = 0.0;  // max |X_i - X_j| over subdifferential pairs
  std::vector<NonsplittingScan> scans;
};

inline constexpr double kLipschitzSlack = 1.2;

// Sources and targets must share one sampling. For each delta the hypothesis is
// 2 * lipschitz * max(graph_constant, geodesic_constant) < delta * conerad, which forces every
// subdifferential pair within delta * conerad; exceptions count pairs farther apart.
PotentialLipschitz potential_lipschitz_check(const SurfaceSampling& sampling, const DualPair& dual,
                                             double bound, double conerad, double geodesic_constant,
                                             const std::vector<double>& deltas, int knn = 40);

// --- local to global and Holder fit -----------------------------------------------------------

struct LocalToGlobal {
  std::size_t extreme_points = 0;
  double worst_slack = 0.0;      // max over tested points of u(x0) + c(x0, Y) + u^c(Y)
  double midpoint_slack = 0.0;
  bool pass = false;
};

LocalToGlobal local_to_global_check(const ConvexBody& body, const SyntheticPotential& potential,
                                    const Vec& x0, const SurfaceSampling& sampling, double tol);

struct HolderFit {
  double exponent = 0.0;
  double residual = 0.0;  // RMS of the log-log fit
  std::size_t pairs = 0;
};

// Map pairs (X_i, T(X_i)); pairs with |X - Y| <= max_distance enter the fit.
HolderFit holder_fit(const std::vector<Vec>& xs, const std::vector<Vec>& images, double max_distance);

// Largest-mass target per source; throws PlanNotMapLike when any spread exceeds max_spread.
std::vector<Vec> plan_map(const TransportPlan& plan, const std::vector<double>& source_mass,
                          const std::vector<Vec>& ys, double max_spread);

}  // namespace otsurf
