#include "network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "otsurf/error.hpp"

namespace otsurf::detail {

std::vector<std::int64_t> integer_masses(const std::vector<double>& w, std::int64_t total) {
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<std::int64_t> out(w.size());
  std::vector<std::pair<double, std::size_t>> rem(w.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    double exact = w[i] / sum * static_cast<double>(total);
    double fl = std::floor(exact);
    out[i] = static_cast<std::int64_t>(fl);
    assigned += out[i];
    rem[i] = {exact - fl, i};
  }
  std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  for (std::size_t k = 0; assigned < total; k = (k + 1) % rem.size()) {
    ++out[rem[k].second];
    ++assigned;
  }
  while (assigned > total) {
    auto it = std::max_element(out.begin(), out.end());
    --*it;
    --assigned;
  }
  return out;
}

namespace {

// Nodes 0..N-1 are sources, N..N+M-1 targets; every tree arc joins a source and a target.
class Simplex {
 public:
  Simplex(const std::vector<Vec>& xs, const std::vector<Vec>& ys) : n_(xs.size()), m_(ys.size()) {
    px_.resize(3 * n_);
    py_.resize(3 * m_);
    for (std::size_t i = 0; i < n_; ++i)
      for (int d = 0; d < 3; ++d) px_[3 * i + d] = xs[i][d];
    for (std::size_t j = 0; j < m_; ++j)
      for (int d = 0; d < 3; ++d) py_[3 * j + d] = ys[j][d];
    double rx = 0, ry = 0;
    for (const auto& x : xs) rx = std::max(rx, x.norm());
    for (const auto& y : ys) ry = std::max(ry, y.norm());
    scale_ = std::max(1.0, 0.5 * (rx + ry) * (rx + ry));
    tol_ = 1e-13 * scale_;
  }

  double cost(std::size_t s, std::size_t t) const {
    const double* a = &px_[3 * s];
    const double* b = &py_[3 * t];
    double d0 = a[0] - b[0], d1 = a[1] - b[1], d2 = a[2] - b[2];
    return 0.5 * (d0 * d0 + d1 * d1 + d2 * d2);
  }

  void init(const std::vector<std::int64_t>& supply, const std::vector<std::int64_t>& demand,
            const std::vector<Vec>& xs, const std::vector<Vec>& ys) {
    // Northwest corner along a common 1-D ordering gives a spanning staircase tree.
    const Vec key(1.0, 0.6180339887, 0.3819660113);
    std::vector<int> os(n_), ot(m_);
    std::iota(os.begin(), os.end(), 0);
    std::iota(ot.begin(), ot.end(), 0);
    std::stable_sort(os.begin(), os.end(), [&](int a, int b) { return xs[a].dot(key) < xs[b].dot(key); });
    std::stable_sort(ot.begin(), ot.end(), [&](int a, int b) { return ys[a].dot(key) < ys[b].dot(key); });
    std::vector<std::int64_t> ra(supply), rb(demand);
    const std::size_t v = n_ + m_;
    std::vector<std::vector<std::pair<int, std::int64_t>>> adj(v);
    std::size_t i = 0, j = 0;
    for (;;) {
      std::int64_t f = std::min(ra[os[i]], rb[ot[j]]);
      ra[os[i]] -= f;
      rb[ot[j]] -= f;
      int s = os[i], t = static_cast<int>(n_) + ot[j];
      adj[s].emplace_back(t, f);
      adj[t].emplace_back(s, f);
      if (i == n_ - 1 && j == m_ - 1) break;
      if ((ra[os[i]] == 0 && i < n_ - 1) || j == m_ - 1) ++i;
      else ++j;
    }
    parent_.assign(v, -1);
    flow_.assign(v, 0);
    depth_.assign(v, 0);
    children_.assign(v, {});
    std::vector<int> queue{0};
    std::vector<char> seen(v, 0);
    seen[0] = 1;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      int a = queue[h];
      for (auto [b, f] : adj[a]) {
        if (seen[b]) continue;
        seen[b] = 1;
        parent_[b] = a;
        flow_[b] = f;
        depth_[b] = depth_[a] + 1;
        children_[a].push_back(b);
        queue.push_back(b);
      }
    }
    recompute_potentials();
  }

  void recompute_potentials() {
    pot_.assign(n_ + m_, 0.0);
    std::vector<int> stack{0};
    while (!stack.empty()) {
      int a = stack.back();
      stack.pop_back();
      for (int b : children_[a]) {
        pot_[b] = arc_cost(a, b) - pot_[a];
        stack.push_back(b);
      }
    }
  }

  double arc_cost(int a, int b) const {
    return a < static_cast<int>(n_) ? cost(a, b - n_) : cost(b, a - n_);
  }

  double reduced(std::size_t s, std::size_t t) const { return cost(s, t) - pot_[s] - pot_[n_ + t]; }

  // Block search: most negative reduced cost inside the first block that has one.
  bool price(std::size_t& s_out, std::size_t& t_out) {
    const std::size_t arcs = n_ * m_;
    const std::size_t block = std::max<std::size_t>(
        static_cast<std::size_t>(std::sqrt(static_cast<double>(arcs))), 64);
    double best = -tol_;
    std::size_t arg = arcs, count = 0;
    std::size_t s = cursor_ / m_, t = cursor_ % m_;
    for (std::size_t k = 0; k < arcs; ++k) {
      double r = reduced(s, t);
      if (r < best) {
        best = r;
        arg = s * m_ + t;
      }
      if (++t == m_) {
        t = 0;
        if (++s == n_) s = 0;
      }
      if (++count == block) {
        if (arg != arcs) break;
        count = 0;
      }
    }
    if (arg == arcs) return false;
    cursor_ = (s * m_ + t) % arcs;
    s_out = arg / m_;
    t_out = arg % m_;
    return true;
  }

  void pivot(std::size_t s, std::size_t t) {
    const int ns = static_cast<int>(n_);
    const int S = static_cast<int>(s), T = ns + static_cast<int>(t);
    path_s_.clear();
    path_t_.clear();
    int a = S, b = T;
    while (depth_[a] > depth_[b]) path_s_.push_back(a), a = parent_[a];
    while (depth_[b] > depth_[a]) path_t_.push_back(b), b = parent_[b];
    while (a != b) {
      path_s_.push_back(a), a = parent_[a];
      path_t_.push_back(b), b = parent_[b];
    }
    // Cycle S -> T -> ... -> apex -> ... -> S. Arcs opposing that orientation lose theta.
    // Ties go to the last blocking arc met from the apex, which keeps the tree strongly feasible.
    std::int64_t theta = std::numeric_limits<std::int64_t>::max();
    int leave = -1;
    bool leave_on_s = false;
    for (auto it = path_s_.rbegin(); it != path_s_.rend(); ++it) {
      if (*it < ns && flow_[*it] <= theta) theta = flow_[*it], leave = *it, leave_on_s = true;
    }
    for (int v : path_t_) {
      if (v >= ns && flow_[v] <= theta) theta = flow_[v], leave = v, leave_on_s = false;
    }
    for (int v : path_s_) flow_[v] += v < ns ? -theta : theta;
    for (int v : path_t_) flow_[v] += v >= ns ? -theta : theta;

    const double r = reduced(s, t);
    const int x = leave_on_s ? S : T;
    const int y = leave_on_s ? T : S;
    // Re-hang the detached subtree on the entering arc, reversing the path from x to leave.
    int prev = y;
    std::int64_t prev_flow = theta;
    int v = x;
    for (;;) {
      int old_parent = parent_[v];
      std::int64_t old_flow = flow_[v];
      auto& sib = children_[old_parent];
      sib.erase(std::find(sib.begin(), sib.end(), v));
      parent_[v] = prev;
      flow_[v] = prev_flow;
      children_[prev].push_back(v);
      if (v == leave) break;
      prev = v;
      prev_flow = old_flow;
      v = old_parent;
    }
    // Shift potentials of the moved subtree so the entering arc becomes tight.
    const double ds = x < ns ? r : -r;
    std::vector<int>& stack = stack_;
    stack.assign(1, x);
    depth_[x] = depth_[y] + 1;
    while (!stack.empty()) {
      int w = stack.back();
      stack.pop_back();
      pot_[w] += w < ns ? ds : -ds;
      for (int c : children_[w]) {
        depth_[c] = depth_[w] + 1;
        stack.push_back(c);
      }
    }
  }

  SimplexSolution run(std::size_t max_pivots) {
    SimplexSolution out;
    std::size_t s = 0, t = 0;
    for (;;) {
      while (price(s, t)) {
        if (++out.pivots > max_pivots)
          throw Error(ErrorCode::NotConverged, "network simplex exceeded its pivot budget");
        pivot(s, t);
        if (out.pivots % 4096 == 0) recompute_potentials();
      }
      // Confirm optimality against drift-free potentials.
      recompute_potentials();
      if (!price(s, t)) break;
      ++out.pivots;
      pivot(s, t);
    }
    std::vector<char> basic(n_ * m_, 0);
    const int ns = static_cast<int>(n_);
    for (std::size_t w = 1; w < n_ + m_; ++w) {
      int v = static_cast<int>(w), p = parent_[w];
      if (p < 0) continue;
      SimplexArc arc;
      arc.source = v < ns ? v : p;
      arc.target = (v < ns ? p : v) - ns;
      arc.flow = flow_[w];
      basic[arc.source * m_ + arc.target] = 1;
      out.basis.push_back(arc);
    }
    const double zero = 1e-10 * scale_;
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = 0; b < m_; ++b)
        if (!basic[a * m_ + b] && std::abs(reduced(a, b)) <= zero) ++out.degenerate_arcs;
    out.source_pot.assign(pot_.begin(), pot_.begin() + n_);
    out.target_pot.assign(pot_.begin() + n_, pot_.end());
    return out;
  }

 private:
  std::size_t n_, m_;
  std::vector<double> px_, py_;
  double scale_ = 1, tol_ = 0;
  std::vector<int> parent_, depth_;
  std::vector<std::int64_t> flow_;
  std::vector<std::vector<int>> children_;
  std::vector<double> pot_;
  std::vector<int> path_s_, path_t_, stack_;
  std::size_t cursor_ = 0;
};

}  // namespace

SimplexSolution transport_simplex(const std::vector<Vec>& xs, const std::vector<std::int64_t>& supply,
                                  const std::vector<Vec>& ys, const std::vector<std::int64_t>& demand) {
  Simplex sx(xs, ys);
  sx.init(supply, demand, xs, ys);
  const std::size_t budget = 200 * (xs.size() + ys.size()) * (xs.size() + ys.size()) + 1000;
  return sx.run(budget);
}

}  // namespace otsurf::detail
