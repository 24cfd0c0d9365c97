// Small linear programs over the probability simplex, solved by basic-point
// enumeration.
//
// The feasible sets that show up in stage-game analysis (best-reply regions,
// minmax-action polytopes, Condition-3 witness regions) live in dimension
// |A| or |B|, i.e. at most a handful of variables.  Enumerating candidate
// tight-constraint bases and solving the resulting square systems is exact
// on the Rational path and entirely adequate at these sizes; an iterative
// solver would only add pivoting noise.
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "repgame/rational.hpp"

namespace repgame {

inline Rational abs_of(const Rational& x) { return x < 0 ? Rational(-x) : x; }
inline double abs_of(double x) { return x < 0 ? -x : x; }

// Gaussian elimination with abs-pivoting; returns nullopt on singularity.
template <class Scalar>
std::optional<std::vector<Scalar>> solve_linear_system(
    std::vector<std::vector<Scalar>> a, std::vector<Scalar> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (abs_of(a[r][col]) > abs_of(a[pivot][col])) pivot = r;
    }
    if (a[pivot][col] == Scalar(0)) return std::nullopt;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == Scalar(0)) continue;
      Scalar f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<Scalar> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

// maximize c.x  s.t.  x in simplex,  eq rows a.x = rhs,  ge rows a.x >= rhs.
template <class Scalar>
struct SimplexPolytopeLP {
  std::size_t n = 0;
  std::vector<Scalar> objective;                 // empty => feasibility only
  std::vector<std::vector<Scalar>> eq;
  std::vector<Scalar> eq_rhs;
  std::vector<std::vector<Scalar>> ge;
  std::vector<Scalar> ge_rhs;

  struct Solution {
    std::vector<Scalar> x;
    Scalar value;
  };

  // Enumerates basic feasible points: the simplex equality and all eq rows
  // are always tight; remaining tightness comes from subsets of
  // {x_i = 0} u {ge rows}.  Feasibility tolerance applies on the double
  // path only.
  std::optional<Solution> solve(double tol = 1e-9) const {
    std::optional<Solution> best;
    const std::size_t fixed = 1 + eq.size();
    if (fixed > n) {
      try_point(equality_solution(), best, tol);
      return best;
    }
    const std::size_t need = n - fixed;
    std::vector<std::size_t> cands;  // 0..n-1: x_i = 0; n..: ge row i-n
    for (std::size_t i = 0; i < n + ge.size(); ++i) cands.push_back(i);
    std::vector<std::size_t> pick;
    enumerate(cands, 0, need, pick, best, tol);
    return best;
  }

  bool feasible(double tol = 1e-9) const { return solve(tol).has_value(); }

  // All distinct basic feasible points (vertex set up to duplicates).
  std::vector<std::vector<Scalar>> vertices(double tol = 1e-9) const {
    std::vector<std::vector<Scalar>> out;
    const std::size_t fixed = 1 + eq.size();
    std::vector<std::size_t> cands;
    for (std::size_t i = 0; i < n + ge.size(); ++i) cands.push_back(i);
    const std::size_t need = fixed >= n ? 0 : n - fixed;
    std::vector<std::size_t> pick;
    collect(cands, 0, need, pick, out, tol);
    return out;
  }

 private:
  std::optional<std::vector<Scalar>> basic_point(
      const std::vector<std::size_t>& pick) const {
    std::vector<std::vector<Scalar>> rows;
    std::vector<Scalar> rhs;
    std::vector<Scalar> ones(n, Scalar(1));
    rows.push_back(ones);
    rhs.push_back(Scalar(1));
    for (std::size_t r = 0; r < eq.size(); ++r) {
      rows.push_back(eq[r]);
      rhs.push_back(eq_rhs[r]);
    }
    for (auto k : pick) {
      if (k < n) {
        std::vector<Scalar> row(n, Scalar(0));
        row[k] = Scalar(1);
        rows.push_back(row);
        rhs.push_back(Scalar(0));
      } else {
        rows.push_back(ge[k - n]);
        rhs.push_back(ge_rhs[k - n]);
      }
    }
    if (rows.size() != n) return std::nullopt;
    return solve_linear_system<Scalar>(rows, rhs);
  }

  std::optional<std::vector<Scalar>> equality_solution() const {
    // Over-constrained case: solve the first n equations, verify the rest.
    std::vector<std::vector<Scalar>> rows;
    std::vector<Scalar> rhs;
    std::vector<Scalar> ones(n, Scalar(1));
    rows.push_back(ones);
    rhs.push_back(Scalar(1));
    for (std::size_t r = 0; r < eq.size() && rows.size() < n; ++r) {
      rows.push_back(eq[r]);
      rhs.push_back(eq_rhs[r]);
    }
    if (rows.size() != n) return std::nullopt;
    return solve_linear_system<Scalar>(rows, rhs);
  }

  bool is_feasible_point(const std::vector<Scalar>& x, double tol) const {
    for (const auto& v : x) {
      if (!scalar_geq(v, Scalar(0), tol)) return false;
    }
    for (std::size_t r = 0; r < eq.size(); ++r) {
      Scalar dot(0);
      for (std::size_t i = 0; i < n; ++i) dot += eq[r][i] * x[i];
      if (!scalar_eq(dot, eq_rhs[r], tol)) return false;
    }
    for (std::size_t r = 0; r < ge.size(); ++r) {
      Scalar dot(0);
      for (std::size_t i = 0; i < n; ++i) dot += ge[r][i] * x[i];
      if (!scalar_geq(dot, ge_rhs[r], tol)) return false;
    }
    return true;
  }

  void try_point(const std::optional<std::vector<Scalar>>& x,
                 std::optional<Solution>& best, double tol) const {
    if (!x || !is_feasible_point(*x, tol)) return;
    Scalar val(0);
    if (!objective.empty()) {
      for (std::size_t i = 0; i < n; ++i) val += objective[i] * (*x)[i];
    }
    if (!best || val > best->value) best = Solution{*x, val};
  }

  void enumerate(const std::vector<std::size_t>& cands, std::size_t from,
                 std::size_t need, std::vector<std::size_t>& pick,
                 std::optional<Solution>& best, double tol) const {
    if (need == 0) {
      try_point(basic_point(pick), best, tol);
      return;
    }
    for (std::size_t i = from; i + need <= cands.size(); ++i) {
      pick.push_back(cands[i]);
      enumerate(cands, i + 1, need - 1, pick, best, tol);
      pick.pop_back();
    }
  }

  void collect(const std::vector<std::size_t>& cands, std::size_t from,
               std::size_t need, std::vector<std::size_t>& pick,
               std::vector<std::vector<Scalar>>& out, double tol) const {
    if (need == 0) {
      auto x = need_point(pick);
      if (x && is_feasible_point(*x, tol)) out.push_back(*x);
      return;
    }
    for (std::size_t i = from; i + need <= cands.size(); ++i) {
      pick.push_back(cands[i]);
      collect(cands, i + 1, need - 1, pick, out, tol);
      pick.pop_back();
    }
  }

  std::optional<std::vector<Scalar>> need_point(
      const std::vector<std::size_t>& pick) const {
    if (1 + eq.size() > n) return equality_solution();
    return basic_point(pick);
  }
};

}  // namespace repgame
