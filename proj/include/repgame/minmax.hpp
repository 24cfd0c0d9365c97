// Player 1's minmax payoff against the set B* of player-2 mixed actions that
// best reply to something, plus the machinery other modules reuse: feasible
// best-reply supports and minmax-action polytopes.
//
// A support T of player 2 is feasible when some alpha makes every action in
// T a best reply; then Delta(T) subset B*.  The minmax
//     v1_min = min_{beta in B*} max_a u1(a, beta)
// is computed per feasible support by enumerating candidate basic optima of
// the inner min-max (active rows R and support T with |R| = |T| pin down a
// square linear system).  Exact on the Rational path.
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "repgame/stage_game.hpp"
#include "repgame/vertex_lp.hpp"

namespace repgame {

namespace detail {

template <class Scalar>
void subsets(std::size_t n, std::vector<std::vector<std::size_t>>& out) {
  for (std::size_t mask = 1; mask < (std::size_t(1) << n); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t(1) << i)) s.push_back(i);
    }
    out.push_back(std::move(s));
  }
}

}  // namespace detail

// Is there an alpha making every action in `support` a best reply?
// (Linear feasibility over Delta(A).)  Returns one witness alpha.
template <class Scalar>
std::optional<std::vector<Scalar>> best_reply_support_witness(
    const StageGame<Scalar>& g, const std::vector<std::size_t>& support,
    double tol = 1e-9) {
  SimplexPolytopeLP<Scalar> lp;
  lp.n = g.na();
  const std::size_t ref = support.front();
  auto u2_col = [&](std::size_t j) {
    std::vector<Scalar> col(g.na());
    for (std::size_t i = 0; i < g.na(); ++i) col[i] = g.u2(i, j);
    return col;
  };
  auto col_ref = u2_col(ref);
  for (std::size_t k = 1; k < support.size(); ++k) {
    auto col = u2_col(support[k]);
    std::vector<Scalar> row(g.na());
    for (std::size_t i = 0; i < g.na(); ++i) row[i] = col[i] - col_ref[i];
    lp.eq.push_back(std::move(row));
    lp.eq_rhs.push_back(Scalar(0));
  }
  for (std::size_t j = 0; j < g.nb(); ++j) {
    bool in_support = false;
    for (auto s : support) in_support |= (s == j);
    if (in_support) continue;
    auto col = u2_col(j);
    std::vector<Scalar> row(g.na());
    for (std::size_t i = 0; i < g.na(); ++i) row[i] = col_ref[i] - col[i];
    lp.ge.push_back(std::move(row));
    lp.ge_rhs.push_back(Scalar(0));
  }
  auto sol = lp.solve(tol);
  if (!sol) return std::nullopt;
  return sol->x;
}

template <class Scalar>
struct MinmaxResult {
  Scalar value;
  MixedAction<Scalar> beta;  // a minmax action (length nb)
};

// min over beta in Delta(support) of max_a u1(a, beta), with the support
// already known to be feasible.  Basic optima have equally many active
// payoff rows as support points.
template <class Scalar>
std::optional<MinmaxResult<Scalar>> minmax_over_support(
    const StageGame<Scalar>& g, const std::vector<std::size_t>& support,
    double tol = 1e-9) {
  std::vector<std::vector<std::size_t>> t_subsets, r_subsets;
  detail::subsets<Scalar>(support.size(), t_subsets);
  detail::subsets<Scalar>(g.na(), r_subsets);
  std::optional<MinmaxResult<Scalar>> best;
  for (const auto& t_pick : t_subsets) {
    for (const auto& rows : r_subsets) {
      if (rows.size() != t_pick.size()) continue;
      const std::size_t k = t_pick.size();
      // unknowns: beta over t_pick, then v
      std::vector<std::vector<Scalar>> m(k + 1,
                                         std::vector<Scalar>(k + 1, Scalar(0)));
      std::vector<Scalar> rhs(k + 1, Scalar(0));
      for (std::size_t c = 0; c < k; ++c) m[0][c] = Scalar(1);
      rhs[0] = Scalar(1);
      for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
          m[r + 1][c] = g.u1(rows[r], support[t_pick[c]]);
        }
        m[r + 1][k] = Scalar(-1);
      }
      auto x = solve_linear_system<Scalar>(m, rhs);
      if (!x) continue;
      MixedAction<Scalar> beta;
      beta.w.assign(g.nb(), Scalar(0));
      bool ok = true;
      for (std::size_t c = 0; c < k; ++c) {
        if (!scalar_geq((*x)[c], Scalar(0), tol)) ok = false;
        beta.w[support[t_pick[c]]] = (*x)[c];
      }
      if (!ok) continue;
      Scalar v = (*x)[k];
      for (std::size_t a = 0; a < g.na() && ok; ++a) {
        if (!scalar_geq(v, g.u1_vs_beta(a, beta), tol)) ok = false;
      }
      if (!ok) continue;
      if (!best || v < best->value) best = MinmaxResult<Scalar>{v, beta};
    }
  }
  return best;
}

// v1_min with witness.  Enumerates feasible supports of B; exact for
// rational payoffs at any size the library realistically sees (|B| <= ~12).
template <class Scalar>
MinmaxResult<Scalar> minmax_p1(const StageGame<Scalar>& g, double tol = 1e-9) {
  std::vector<std::vector<std::size_t>> supports;
  detail::subsets<Scalar>(g.nb(), supports);
  std::optional<MinmaxResult<Scalar>> best;
  for (const auto& s : supports) {
    if (!best_reply_support_witness(g, s, tol)) continue;
    auto m = minmax_over_support(g, s, tol);
    if (!m) continue;
    if (!best || m->value < best->value) best = m;
  }
  if (!best) throw NonFiniteValue("minmax computation found no feasible support");
  return *best;
}

// Vertices of {beta in Delta(support): u1(a, beta) <= bound for all a}.
template <class Scalar>
std::vector<MixedAction<Scalar>> minmax_action_vertices(
    const StageGame<Scalar>& g, const std::vector<std::size_t>& support,
    const Scalar& bound, double tol = 1e-9) {
  SimplexPolytopeLP<Scalar> lp;
  lp.n = support.size();
  for (std::size_t a = 0; a < g.na(); ++a) {
    std::vector<Scalar> row(support.size());
    for (std::size_t c = 0; c < support.size(); ++c) {
      row[c] = -g.u1(a, support[c]);
    }
    lp.ge.push_back(std::move(row));
    lp.ge_rhs.push_back(Scalar(-bound));
  }
  std::vector<MixedAction<Scalar>> out;
  for (const auto& x : lp.vertices(tol)) {
    MixedAction<Scalar> beta;
    beta.w.assign(g.nb(), Scalar(0));
    for (std::size_t c = 0; c < support.size(); ++c) beta.w[support[c]] = x[c];
    out.push_back(std::move(beta));
  }
  return out;
}

}  // namespace repgame
