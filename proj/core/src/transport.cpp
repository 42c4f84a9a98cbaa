#include "slicedot/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "slicedot/assignment.hpp"
#include "slicedot/errors.hpp"

namespace slicedot {
namespace {

constexpr double kMassTolerance = 1e-12;

double pow_abs(double v, double p) {
  const double a = std::abs(v);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

void check_order(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("transport order p must be >= 1");
}

double ground_cost(std::span<const double> x, std::span<const double> y, double p) {
  double s = 0.0;
  for (std::size_t c = 0; c < x.size(); ++c) {
    const double d = x[c] - y[c];
    s += d * d;
  }
  if (p == 2.0) return s;
  return std::pow(std::sqrt(s), p);
}

}  // namespace

Measure1D::Measure1D(Tensor locs, Tensor w) : locations(std::move(locs)), weights(std::move(w)) {
  if (locations.rank() != 1 || weights.rank() != 1 || locations.size() != weights.size()) {
    throw ShapeError("Measure1D: locations and weights must be matching vectors");
  }
  if (locations.size() == 0) throw DomainError("Measure1D: empty measure");
  if (!locations.all_finite()) throw DomainError("Measure1D: non-finite location");
  double total = 0.0;
  for (double v : weights.data()) {
    if (!(v >= 0.0)) throw DomainError("Measure1D: negative weight");
    total += v;
  }
  if (std::abs(total - 1.0) > kMassTolerance) throw DomainError("Measure1D: weights sum to " + std::to_string(total));
}

Measure1D Measure1D::uniform(Tensor locs) {
  const std::size_t k = locs.size();
  return Measure1D(std::move(locs), Tensor::filled({k}, 1.0 / static_cast<double>(k)));
}

std::vector<std::size_t> stable_argsort(std::span<const double> values) {
  // Sorting (value, index) pairs keeps the keys contiguous; the index breaks ties.
  std::vector<std::pair<double, std::size_t>> keyed(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) keyed[i] = {values[i], i};
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < keyed.size(); ++i) order[i] = keyed[i].second;
  return order;
}

double wasserstein_1d(const Measure1D& a, const Measure1D& b, double p) {
  check_order(p);
  const auto xa = a.locations.data();
  const auto xb = b.locations.data();
  const auto oa = stable_argsort(xa);
  const auto ob = stable_argsort(xb);

  double total = 0.0;
  std::size_t i = 0, j = 0;
  double left_a = a.weights[oa[0]];
  double left_b = b.weights[ob[0]];
  while (i < oa.size() && j < ob.size()) {
    const double step = std::min(left_a, left_b);
    total += step * pow_abs(xa[oa[i]] - xb[ob[j]], p);
    left_a -= step;
    left_b -= step;
    // Advance whichever ladder rung is exhausted; the other keeps its remainder.
    if (left_a <= left_b) {
      if (++i < oa.size()) left_a = a.weights[oa[i]];
      if (left_b <= 0.0 && ++j < ob.size()) left_b = b.weights[ob[j]];
    } else {
      if (++j < ob.size()) left_b = b.weights[ob[j]];
    }
  }
  total = std::max(total, 0.0);
  return p == 1.0 ? total : std::pow(total, 1.0 / p);
}

MatchedCost wasserstein_1d_pow_matched(std::span<const double> x, std::span<const double> y, double p) {
  check_order(p);
  if (x.size() != y.size()) {
    throw ShapeError("matched 1D cost needs equal sizes, got " + std::to_string(x.size()) + " and " +
                     std::to_string(y.size()));
  }
  if (x.empty()) throw ShapeError("matched 1D cost of empty samples");
  MatchedCost out;
  out.x_order = stable_argsort(x);
  out.y_order = stable_argsort(y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += pow_abs(x[out.x_order[i]] - y[out.y_order[i]], p);
  out.cost_pow = s / static_cast<double>(x.size());
  return out;
}

std::vector<double> Coupling::source_marginal(std::size_t k) const {
  std::vector<double> m(k, 0.0);
  for (const auto& t : transfers) m.at(t.source) += t.mass;
  return m;
}

std::vector<double> Coupling::target_marginal(std::size_t k) const {
  std::vector<double> m(k, 0.0);
  for (const auto& t : transfers) m.at(t.target) += t.mass;
  return m;
}

OracleResult exact_wp_oracle(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p) {
  check_order(p);
  if (mu.dim() != nu.dim()) throw ShapeError("exact oracle: dimension mismatch");
  const std::size_t ka = mu.size(), kb = nu.size();
  const bool assignment_path = ka == kb && mu.is_uniform() && nu.is_uniform();
  if (assignment_path ? ka > kAssignmentBudget : ka * kb > kTransportBudget) {
    throw SizeError("exact oracle: instance " + std::to_string(ka) + "x" + std::to_string(kb) +
                    " exceeds the exact-solve budget");
  }

  Tensor cost({ka, kb});
  for (std::size_t i = 0; i < ka; ++i)
    for (std::size_t j = 0; j < kb; ++j) cost.at(i, j) = ground_cost(mu.points().row(i), nu.points().row(j), p);

  OracleResult out;
  double total = 0.0;
  if (assignment_path) {
    const auto a = solve_assignment(cost);
    const double mass = 1.0 / static_cast<double>(ka);
    for (std::size_t i = 0; i < ka; ++i) out.coupling.transfers.push_back({i, a.column[i], mass});
    total = a.total_cost / static_cast<double>(ka);
  } else {
    const auto plan = solve_transport(mu.weights(), nu.weights(), cost);
    for (const auto& f : plan.flows) out.coupling.transfers.push_back({f.source, f.target, f.mass});
    total = plan.total_cost;
  }
  total = std::max(total, 0.0);
  out.value = p == 1.0 ? total : std::pow(total, 1.0 / p);
  return out;
}

}  // namespace slicedot
