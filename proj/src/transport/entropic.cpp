#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "otsurf/transport.hpp"

namespace otsurf {

namespace {

// One half-step: out_i = -eps * log sum_j exp(log_w_j + (pot_j - c_ij) / eps).
void soft_min(const std::vector<Vec>& from, const std::vector<Vec>& to, const std::vector<double>& log_w,
              const std::vector<double>& pot, double eps, std::vector<double>& out) {
  std::vector<double> buf(to.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < to.size(); ++j) {
      buf[j] = log_w[j] + (pot[j] - cost(from[i], to[j])) / eps;
      hi = std::max(hi, buf[j]);
    }
    double s = 0;
    for (double v : buf) s += std::exp(v - hi);
    out[i] = -eps * (hi + std::log(s));
  }
}

std::vector<double> logs(const std::vector<double>& m) {
  const double total = std::accumulate(m.begin(), m.end(), 0.0);
  std::vector<double> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    out[i] = m[i] > 0 ? std::log(m[i] / total) : -std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace

TransportResult solve_entropic(const std::vector<Vec>& xs, const std::vector<double>& a,
                               const std::vector<Vec>& ys, const std::vector<double>& b,
                               const EntropicOptions& options) {
  if (!(options.epsilon > 0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (xs.size() != a.size() || ys.size() != b.size() || xs.empty() || ys.empty())
    throw Error(ErrorCode::InvalidArgument, "points and masses differ in size");
  double sa = std::accumulate(a.begin(), a.end(), 0.0), sb = std::accumulate(b.begin(), b.end(), 0.0);
  if (std::abs(sa - sb) > 1e-9 * std::max(1.0, sa))
    throw Error(ErrorCode::Unbalanced, "source and target masses differ");
  const auto t0 = std::chrono::steady_clock::now();
  const auto la = logs(a), lb = logs(b);
  std::vector<double> an(a.size()), bn(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) an[i] = a[i] / sa;
  for (std::size_t j = 0; j < b.size(); ++j) bn[j] = b[j] / sb;

  double rx = 0, ry = 0;
  for (const auto& x : xs) rx = std::max(rx, x.norm());
  for (const auto& y : ys) ry = std::max(ry, y.norm());
  const double cmax = 0.5 * (rx + ry) * (rx + ry);

  std::vector<double> f(xs.size(), 0.0), g(ys.size(), 0.0), fn(xs.size());
  std::size_t iters = 0;
  bool converged = false;
  // Epsilon scaling: halve from the cost scale down to the target, polishing only at the end.
  double eps = std::max(options.epsilon, cmax);
  for (;;) {
    const bool last = eps <= options.epsilon;
    const double tol = last ? options.tolerance : std::max(options.tolerance, 1e-3);
    const std::size_t stage_cap = last ? options.max_iters : 200;
    for (std::size_t k = 0; k < stage_cap && iters < options.max_iters; ++k, ++iters) {
      soft_min(ys, xs, la, f, eps, g);
      soft_min(xs, ys, lb, g, eps, fn);
      // Row sums before the update are a_i exp((f_i - fn_i) / eps).
      double resid = 0;
      for (std::size_t i = 0; i < f.size(); ++i) resid += an[i] * std::abs(std::expm1((f[i] - fn[i]) / eps));
      f.swap(fn);
      if (resid <= tol) {
        if (last) converged = true;
        break;
      }
    }
    if (last || iters >= options.max_iters) break;
    eps = std::max(options.epsilon, 0.5 * eps);
  }
  if (!converged)
    throw Error(ErrorCode::NotConverged, "Sinkhorn did not converge in " + std::to_string(options.max_iters) +
                                             " iterations");
  soft_min(ys, xs, la, f, eps, g);

  TransportResult r;
  r.stats.solver = "entropic";
  r.stats.iterations = iters;
  r.stats.epsilon = options.epsilon;
  r.plan.sources = xs.size();
  r.plan.targets = ys.size();
  std::vector<double> rows(xs.size(), 0.0), cols(ys.size(), 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      double c = cost(xs[i], ys[j]);
      double m = std::exp(la[i] + lb[j] + (f[i] + g[j] - c) / eps);
      if (m <= 1e-14) continue;
      r.plan.entries.push_back({static_cast<int>(i), static_cast<int>(j), m});
      r.plan.cost += m * c;
      rows[i] += m;
      cols[j] += m;
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i)
    r.plan.row_residual = std::max(r.plan.row_residual, std::abs(rows[i] - an[i]));
  for (std::size_t j = 0; j < cols.size(); ++j)
    r.plan.col_residual = std::max(r.plan.col_residual, std::abs(cols[j] - bn[j]));

  // Sinkhorn potentials are (-u, -u^c) up to entropic slack; one c-transform restores feasibility.
  r.dual.u.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) r.dual.u[i] = -f[i];
  r.dual.uc = c_transform(r.dual.u, xs, ys);
  audit_duals(r.dual, r.plan, xs, ys);
  r.primal = r.plan.cost;
  r.dual_value = dual_objective(r.dual, a, b);
  r.gap = std::abs(r.primal - r.dual_value) / std::max(1.0, r.primal);
  r.w2 = std::sqrt(std::max(r.dual_value, 0.0));
  r.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace otsurf
