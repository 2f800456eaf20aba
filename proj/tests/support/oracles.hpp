#pragma once

// Deliberately naive reference implementations. They share no code with the
// library and are only fit for tiny inputs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "ltmopt/graph.hpp"
#include "ltmopt/lp.hpp"

namespace oracle {

// P[Bin(k, z) >= r] by summing C(k, u) z^u (1 - z)^(k - u) in long double.
inline long double binomial_tail(int k, int r, long double z) {
  long double sum = 0.0L;
  for (int u = r; u <= k; ++u) {
    long double c = 1.0L;
    for (int j = 1; j <= u; ++j) c = c * (k - u + j) / j;
    sum += c * std::pow(z, u) * std::pow(1.0L - z, k - u);
  }
  return sum;
}

// Dense adjacency A[i][j] = number of edges i -> j.
inline std::vector<std::vector<int>> adjacency(int n, const std::vector<ltmopt::Edge>& edges) {
  std::vector<std::vector<int>> a(n, std::vector<int>(n, 0));
  for (const auto& e : edges) ++a[e.tail][e.head];
  return a;
}

inline std::vector<std::uint8_t> ltm_step(const std::vector<std::vector<int>>& a, const std::vector<int>& rho,
                                          const std::vector<std::uint8_t>& x) {
  const std::size_t n = a.size();
  std::vector<std::uint8_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    int s = 0;
    for (std::size_t j = 0; j < n; ++j) s += a[i][j] * x[j];
    out[i] = s >= rho[i] ? 1 : 0;
  }
  return out;
}

// Solves the square system m y = b by Gaussian elimination; nullopt if singular.
inline std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> m, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
    }
    if (std::abs(m[p][c]) < 1e-10) return std::nullopt;
    std::swap(m[p], m[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= m[i][i];
  return b;
}

struct VertexResult {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
};

// Minimum of c'x over the vertices of {rows, bounds}: every choice of V
// linearly independent constraints made tight. Valid when the feasible set is
// pointed and the minimum is attained (bounded below).
inline VertexResult vertex_enumeration(const ltmopt::LpModel& model) {
  const std::size_t v = model.variable_count();
  struct Constraint {
    std::vector<double> a;
    double b;
  };
  std::vector<Constraint> all;
  for (std::size_t i = 0; i < model.row_count(); ++i) {
    Constraint c{std::vector<double>(v, 0.0), model.row(i).rhs};
    for (const auto& t : model.row(i).terms) c.a[t.var] += t.coef;
    all.push_back(c);
  }
  for (std::size_t j = 0; j < v; ++j) {
    for (double bound : {model.lower(j), model.upper(j)}) {
      if (!std::isfinite(bound)) continue;
      Constraint c{std::vector<double>(v, 0.0), bound};
      c.a[j] = 1.0;
      all.push_back(c);
    }
  }
  VertexResult best;
  if (all.size() < v) return best;
  std::vector<int> pick(all.size(), 0);
  std::fill(pick.end() - static_cast<std::ptrdiff_t>(v), pick.end(), 1);
  do {
    std::vector<std::vector<double>> m;
    std::vector<double> b;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (pick[i]) {
        m.push_back(all[i].a);
        b.push_back(all[i].b);
      }
    }
    const auto x = solve_square(m, b);
    if (!x) continue;
    bool ok = true;
    for (std::size_t j = 0; j < v && ok; ++j) {
      ok = (*x)[j] >= model.lower(j) - 1e-7 && (*x)[j] <= model.upper(j) + 1e-7;
    }
    for (std::size_t i = 0; i < model.row_count() && ok; ++i) {
      double lhs = 0.0;
      for (const auto& t : model.row(i).terms) lhs += t.coef * (*x)[t.var];
      const auto& row = model.row(i);
      if (row.sense == ltmopt::Sense::greater_equal) ok = lhs >= row.rhs - 1e-7;
      if (row.sense == ltmopt::Sense::less_equal) ok = lhs <= row.rhs + 1e-7;
      if (row.sense == ltmopt::Sense::equal) ok = std::abs(lhs - row.rhs) <= 1e-7;
    }
    if (!ok) continue;
    double obj = 0.0;
    for (std::size_t j = 0; j < v; ++j) obj += model.cost(j) * (*x)[j];
    best.feasible = true;
    best.objective = std::min(best.objective, obj);
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

// All self-loop-free pairings of tails with heads, as edge sequences in tail
// order, with the number of head permutations producing each.
inline std::map<std::vector<std::pair<int, int>>, int> wirings(const std::vector<int>& tails, std::vector<int> heads) {
  std::map<std::vector<std::pair<int, int>>, int> out;
  std::vector<std::size_t> perm(heads.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  do {
    std::vector<std::pair<int, int>> edges;
    bool loop = false;
    for (std::size_t e = 0; e < tails.size(); ++e) {
      const int h = heads[perm[e]];
      loop = loop || h == tails[e];
      edges.emplace_back(tails[e], h);
    }
    if (!loop) ++out[edges];
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace oracle
