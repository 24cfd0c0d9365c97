// Game classification against the model's assumptions and payoff conditions:
// Assumptions 1-2, strict benefit from commitment, monotone-supermodularity,
// strict lack-of-commitment, generalized coordination, and the minmax-action
// condition with its (alpha, beta) witness.
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "repgame/derived.hpp"
#include "repgame/minmax.hpp"
#include "repgame/stage_game.hpp"

namespace repgame {

template <class Scalar>
struct Condition3Witness {
  MixedAction<Scalar> alpha;  // a* in support, beta best replies to it
  MixedAction<Scalar> beta;   // minmax action avoiding b*
  Scalar q_weight;            // alpha(a*), maximized over witnesses
};

template <class Scalar>
struct GameClass {
  bool satisfies_a1 = false;
  bool satisfies_a2 = false;
  bool strict_benefit = false;
  bool monotone_supermodular = false;
  bool condition3 = false;
  bool strict_lack_of_commitment = false;
  bool generalized_coordination = false;
  std::optional<Condition3Witness<Scalar>> c3_witness;
};

namespace detail {

template <class Scalar>
bool check_msm(const StageGame<Scalar>& g, std::size_t a_star) {
  if (!g.order_p1() || !g.order_p2()) return false;
  const auto& oa = *g.order_p1();  // highest first
  const auto& ob = *g.order_p2();
  const std::size_t na = g.na(), nb = g.nb();
  // u1 strictly decreasing in a, strictly increasing in b
  for (std::size_t j = 0; j < nb; ++j) {
    for (std::size_t r = 0; r + 1 < na; ++r) {
      if (!(g.u1(oa[r], j) < g.u1(oa[r + 1], j))) return false;
    }
  }
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t s = 0; s + 1 < nb; ++s) {
      if (!(g.u1(i, ob[s]) > g.u1(i, ob[s + 1]))) return false;
    }
  }
  // u1 non-increasing differences, u2 strictly increasing differences
  for (std::size_t r = 0; r + 1 < na; ++r) {
    for (std::size_t s = 0; s + 1 < nb; ++s) {
      std::size_t ahi = oa[r], alo = oa[r + 1];
      std::size_t bhi = ob[s], blo = ob[s + 1];
      Scalar d1_hi = g.u1(ahi, bhi) - g.u1(alo, bhi);
      Scalar d1_lo = g.u1(ahi, blo) - g.u1(alo, blo);
      if (!(d1_hi <= d1_lo)) return false;
      Scalar d2_hi = g.u2(ahi, bhi) - g.u2(alo, bhi);
      Scalar d2_lo = g.u2(ahi, blo) - g.u2(alo, blo);
      if (!(d2_hi > d2_lo)) return false;
    }
  }
  // a* is not the lowest element of A
  return oa.back() != a_star;
}

template <class Scalar>
std::optional<Condition3Witness<Scalar>> find_condition3(
    const StageGame<Scalar>& g, std::size_t a_star, std::size_t b_star,
    const Scalar& v1_min, double tol) {
  std::optional<Condition3Witness<Scalar>> best;
  std::vector<std::vector<std::size_t>> supports;
  detail::subsets<Scalar>(g.nb(), supports);
  for (const auto& t : supports) {
    bool has_bstar = false;
    for (auto j : t) has_bstar |= (j == b_star);
    if (has_bstar) continue;
    if (!best_reply_support_witness(g, t, tol)) continue;

    auto vertices = minmax_action_vertices(g, t, v1_min, tol);
    if (vertices.empty()) continue;
    std::vector<MixedAction<Scalar>> betas = vertices;
    if (vertices.size() > 1) {
      MixedAction<Scalar> bary;
      bary.w.assign(g.nb(), Scalar(0));
      for (const auto& v : vertices) {
        for (std::size_t j = 0; j < g.nb(); ++j) bary.w[j] += v.w[j];
      }
      Scalar inv = Scalar(1) / Scalar(static_cast<long long>(vertices.size()));
      for (auto& x : bary.w) x *= inv;
      betas.push_back(std::move(bary));
    }

    for (const auto& beta : betas) {
      // maximize alpha(a*) over { alpha : t subset argmax u2(alpha, .),
      //                           u1(alpha, beta) >= u1(a*, beta) }
      SimplexPolytopeLP<Scalar> lp;
      lp.n = g.na();
      lp.objective.assign(g.na(), Scalar(0));
      lp.objective[a_star] = Scalar(1);
      const std::size_t ref = t.front();
      for (std::size_t k = 1; k < t.size(); ++k) {
        std::vector<Scalar> row(g.na());
        for (std::size_t i = 0; i < g.na(); ++i) {
          row[i] = g.u2(i, t[k]) - g.u2(i, ref);
        }
        lp.eq.push_back(std::move(row));
        lp.eq_rhs.push_back(Scalar(0));
      }
      for (std::size_t j = 0; j < g.nb(); ++j) {
        bool in_t = false;
        for (auto s : t) in_t |= (s == j);
        if (in_t) continue;
        std::vector<Scalar> row(g.na());
        for (std::size_t i = 0; i < g.na(); ++i) {
          row[i] = g.u2(i, ref) - g.u2(i, j);
        }
        lp.ge.push_back(std::move(row));
        lp.ge_rhs.push_back(Scalar(0));
      }
      {
        std::vector<Scalar> row(g.na());
        for (std::size_t i = 0; i < g.na(); ++i) row[i] = g.u1_vs_beta(i, beta);
        lp.ge.push_back(std::move(row));
        lp.ge_rhs.push_back(g.u1_vs_beta(a_star, beta));
      }
      auto sol = lp.solve(tol);
      if (!sol) continue;
      if (!scalar_gt(sol->value, Scalar(0), tol)) continue;  // need a* in supp
      if (!best || sol->value > best->q_weight) {
        best = Condition3Witness<Scalar>{MixedAction<Scalar>(sol->x), beta,
                                         sol->value};
      }
    }
  }
  return best;
}

}  // namespace detail

template <class Scalar>
GameClass<Scalar> classify(const StageGame<Scalar>& g, double tol = 1e-9) {
  GameClass<Scalar> out;
  out.satisfies_a1 = g.satisfies_assumption1();
  out.satisfies_a2 = g.satisfies_assumption2();
  if (!out.satisfies_a1) return out;  // a* undefined beyond this point

  auto st = g.stackelberg();
  out.monotone_supermodular = detail::check_msm(g, st.a_star);

  auto ne = g.pure_nash();
  bool stackelberg_is_ne = false;
  for (const auto& e : ne) {
    stackelberg_is_ne |= (e.first == st.a_star && e.second == st.b_star);
  }
  out.generalized_coordination = stackelberg_is_ne;

  if (out.satisfies_a2) {
    auto c = GameConstants<Scalar>::compute(g);
    out.strict_benefit = st.payoff > c.v1_low;

    if (!stackelberg_is_ne && c.q_star && c.p_star) {
      std::size_t a_pr = c.a_prime, a_dpr = c.a_dprime;
      std::size_t b_dpr = *c.b_dprime, b_ss = *c.b_starstar;
      bool b1 = g.u1(a_dpr, b_dpr) >= g.u1(st.a_star, b_dpr);
      bool b2 = g.u1(a_pr, b_ss) >= g.u1(st.a_star, b_ss);
      bool b3 = g.u1(a_dpr, st.b_star) - g.u1(st.a_star, st.b_star) >=
                g.u1(a_pr, b_ss) - g.u1(st.a_star, b_ss);
      out.strict_lack_of_commitment = b1 && b2 && b3;
    }

    out.c3_witness =
        detail::find_condition3(g, st.a_star, st.b_star, c.v1_minmax, tol);
    out.condition3 = out.c3_witness.has_value();
  }
  return out;
}

}  // namespace repgame
