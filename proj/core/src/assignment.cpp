#include "slicedot/assignment.hpp"

#include <cmath>
#include <limits>

#include "slicedot/errors.hpp"

namespace slicedot {

Assignment solve_assignment(const Tensor& cost) {
  if (cost.rank() != 2 || cost.rows() != cost.cols()) {
    throw ShapeError("solve_assignment needs a square matrix, got " + shape_string(cost.shape()));
  }
  const std::size_t n = cost.rows();
  constexpr double inf = std::numeric_limits<double>::infinity();

  // 1-based potentials; column 0 is a virtual start column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> owner(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = owner[j0];
      double delta = inf;
      std::size_t j1 = 0;
      const auto row = cost.row(i0 - 1);
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = row[j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment out;
  out.column.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) out.column[owner[j] - 1] = j - 1;
  // Sum the original entries rather than trusting the dual objective.
  for (std::size_t i = 0; i < n; ++i) out.total_cost += cost.at(i, out.column[i]);
  return out;
}

TransportPlan solve_transport(const Tensor& supply, const Tensor& demand, const Tensor& cost) {
  const std::size_t m = supply.size(), n = demand.size();
  if (cost.rank() != 2 || cost.rows() != m || cost.cols() != n) {
    throw ShapeError("solve_transport: cost " + shape_string(cost.shape()) + " vs " + std::to_string(m) + " supplies, " +
                     std::to_string(n) + " demands");
  }
  for (double c : cost.data())
    if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("solve_transport needs finite nonnegative costs");

  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr double tol = 1e-15;
  std::vector<double> s(supply.data().begin(), supply.data().end());
  std::vector<double> t(demand.data().begin(), demand.data().end());
  Tensor flow({m, n});

  // Node ids: sources [0, m), sinks [m, m + n).
  const std::size_t nodes = m + n;
  std::vector<double> pot(nodes, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double lo = inf;
    for (std::size_t i = 0; i < m; ++i) lo = std::min(lo, cost.at(i, j));
    pot[m + j] = lo;
  }

  std::vector<double> dist(nodes);
  std::vector<std::size_t> prev(nodes);
  std::vector<char> done(nodes);
  const std::size_t max_rounds = 64 * (nodes + 1) * (nodes + 1);

  for (std::size_t round = 0;; ++round) {
    double remaining = 0.0;
    for (double v : s) remaining += v;
    bool any_sink = false;
    for (double v : t) any_sink = any_sink || v > tol;
    if (remaining <= 1e-14 || !any_sink) break;
    if (round > max_rounds) throw Error("solve_transport failed to converge");

    std::fill(dist.begin(), dist.end(), inf);
    std::fill(done.begin(), done.end(), 0);
    for (std::size_t i = 0; i < m; ++i) {
      if (s[i] > tol) {
        dist[i] = 0.0;
        prev[i] = i;
      }
    }
    // Dense Dijkstra over the residual graph.
    for (std::size_t it = 0; it < nodes; ++it) {
      std::size_t u = nodes;
      double best = inf;
      for (std::size_t v = 0; v < nodes; ++v)
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      if (u == nodes) break;
      done[u] = 1;
      if (u < m) {
        for (std::size_t j = 0; j < n; ++j) {
          const double rc = std::max(0.0, cost.at(u, j) + pot[u] - pot[m + j]);
          if (dist[u] + rc < dist[m + j]) {
            dist[m + j] = dist[u] + rc;
            prev[m + j] = u;
          }
        }
      } else {
        const std::size_t j = u - m;
        for (std::size_t i = 0; i < m; ++i) {
          if (flow.at(i, j) <= tol) continue;
          const double rc = std::max(0.0, -cost.at(i, j) + pot[u] - pot[i]);
          if (dist[u] + rc < dist[i]) {
            dist[i] = dist[u] + rc;
            prev[i] = u;
          }
        }
      }
    }

    std::size_t target = nodes;
    for (std::size_t j = 0; j < n; ++j)
      if (t[j] > tol && (target == nodes || dist[m + j] < dist[target])) target = m + j;
    if (target == nodes || dist[target] == inf) throw Error("solve_transport: no augmenting path");

    const double reach = dist[target];
    for (std::size_t v = 0; v < nodes; ++v) pot[v] += std::min(dist[v], reach);

    // Walk back to the originating source and find the bottleneck.
    double amount = t[target - m];
    std::size_t v = target;
    while (true) {
      const std::size_t u = prev[v];
      if (u == v) break;
      if (u >= m) amount = std::min(amount, flow.at(v, u - m));  // backward edge sink u -> source v
      v = u;
    }
    amount = std::min(amount, s[v]);

    v = target;
    while (true) {
      const std::size_t u = prev[v];
      if (u == v) break;
      if (u < m) {
        flow.at(u, v - m) += amount;
      } else {
        flow.at(v, u - m) -= amount;
        if (flow.at(v, u - m) < tol) flow.at(v, u - m) = 0.0;
      }
      v = u;
    }
    s[v] -= amount;
    t[target - m] -= amount;
  }

  TransportPlan plan;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (flow.at(i, j) > 0.0) {
        plan.flows.push_back({i, j, flow.at(i, j)});
        plan.total_cost += flow.at(i, j) * cost.at(i, j);
      }
  return plan;
}

}  // namespace slicedot
