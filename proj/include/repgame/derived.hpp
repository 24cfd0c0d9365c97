// Constants derived from a stage game: Stackelberg objects, worst pure
// equilibria, indifference thresholds q*/p* with their tie actions b**/b'',
// discount cutoffs, prior bounds, and the minmax payoff.
//
// All thresholds come from linear indifference equations, so the Rational
// instantiation reproduces them without rounding.
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "repgame/minmax.hpp"
#include "repgame/stage_game.hpp"

namespace repgame {

// Largest q in [0,1] keeping `b_low` a best reply against
// q . a_star + (1-q) . a_low, together with the action that ties there.
// Throws Degenerate when b_low best replies against a_star itself (no
// crossing exists, e.g. u2 does not depend on player 1's action).
template <class Scalar>
std::pair<Scalar, std::size_t> indifference_threshold(
    const StageGame<Scalar>& g, std::size_t a_star, std::size_t a_low,
    std::size_t b_low) {
  std::optional<Scalar> best_q;
  std::size_t tie_action = 0;
  for (std::size_t b = 0; b < g.nb(); ++b) {
    if (b == b_low) continue;
    // gap(q) = u2(mix, b_low) - u2(mix, b), linear in q
    Scalar gap0 = g.u2(a_low, b_low) - g.u2(a_low, b);
    Scalar gap1 = g.u2(a_star, b_low) - g.u2(a_star, b);
    if (gap0 <= Scalar(0)) {
      throw AssumptionViolation("b_low is not a strict best reply at q = 0");
    }
    if (gap1 >= Scalar(0)) continue;  // b never overtakes b_low
    Scalar q = gap0 / (gap0 - gap1);
    if (!best_q || q < *best_q) {
      best_q = q;
      tie_action = b;
    }
  }
  if (!best_q) {
    throw Degenerate("no competing reply ever ties; b_low best replies to a*");
  }
  return {*best_q, tie_action};
}

// Largest p in [0,1] with {b_star} != BR2(p . a_star + (1-p) . a_dprime),
// and the action b'' achieving the tie.  Degenerate when b_star stays the
// unique best reply on the whole segment.
template <class Scalar>
std::pair<Scalar, std::size_t> reverse_indifference_threshold(
    const StageGame<Scalar>& g, std::size_t a_star, std::size_t a_dprime,
    std::size_t b_star) {
  std::optional<Scalar> best_p;
  std::size_t tie_action = 0;
  for (std::size_t b = 0; b < g.nb(); ++b) {
    if (b == b_star) continue;
    // gap(p) = u2(mix, b_star) - u2(mix, b), linear in p, gap(1) > 0
    Scalar gap0 = g.u2(a_dprime, b_star) - g.u2(a_dprime, b);
    Scalar gap1 = g.u2(a_star, b_star) - g.u2(a_star, b);
    if (gap1 <= Scalar(0)) {
      throw AssumptionViolation("b_star is not a strict best reply at p = 1");
    }
    if (gap0 > Scalar(0)) continue;  // b_star stays ahead everywhere
    Scalar p = gap0 / (gap0 - gap1);
    if (!best_p || p > *best_p) {
      best_p = p;
      tie_action = b;
    }
  }
  if (!best_p) {
    throw Degenerate("b_star is the unique best reply on the whole segment");
  }
  return {*best_p, tie_action};
}

// Prior bound of the bounded-memory construction:
// odds(pi0_bar) = (q* / (2 - q*))^(K+1).
template <class Scalar>
Scalar pi0_bar(const Scalar& q_star, int K) {
  if (!(q_star > Scalar(0) && q_star < Scalar(1))) {
    throw DomainError("pi0_bar needs q* in (0,1)");
  }
  if (K < 1) throw DomainError("pi0_bar needs K >= 1");
  Scalar base = q_star / (Scalar(2) - q_star);
  Scalar odds(1);
  for (int i = 0; i < K + 1; ++i) odds *= base;
  return odds / (Scalar(1) + odds);
}

template <class Scalar>
struct GameConstants {
  std::size_t a_star = 0, b_star = 0;
  Scalar stackelberg_payoff{};

  std::size_t a_prime = 0, b_prime = 0;  // worst pure NE for player 1
  Scalar v1_low{};

  std::size_t a_wne = 0, b_wne = 0;  // worst pure NE for player 2
  Scalar u1_wne{};

  std::size_t a_dprime = 0;  // BR1(b*)

  std::optional<Scalar> q_star;  // threshold toward (a', b'), tie b**
  std::optional<std::size_t> b_starstar;
  std::optional<Scalar> p_star;  // threshold toward (a'', .), tie b''
  std::optional<std::size_t> b_dprime;

  Scalar v1_minmax{};
  MixedAction<Scalar> minmax_beta;

  Scalar delta_low{};        // for the (a', b') construction
  Scalar delta_low_prime{};  // for the welfare (a'', b'') construction

  static GameConstants compute(const StageGame<Scalar>& g) {
    GameConstants c;
    auto st = g.stackelberg();
    c.a_star = st.a_star;
    c.b_star = st.b_star;
    c.stackelberg_payoff = st.payoff;

    auto ne1 = g.worst_pure_ne_p1();
    c.a_prime = ne1.a;
    c.b_prime = ne1.b;
    c.v1_low = ne1.payoff;

    auto ne2 = g.worst_pure_ne_p2();
    c.a_wne = ne2.a;
    c.b_wne = ne2.b;
    c.u1_wne = g.u1(ne2.a, ne2.b);

    c.a_dprime = g.best_reply_p1_pure(c.b_star).front();

    if (c.a_star != c.a_prime) {
      try {
        auto [q, tie] = indifference_threshold(g, c.a_star, c.a_prime, c.b_prime);
        c.q_star = q;
        c.b_starstar = tie;
      } catch (const Degenerate&) {
      }
    }
    if (c.a_star != c.a_dprime) {
      try {
        auto [p, tie] =
            reverse_indifference_threshold(g, c.a_star, c.a_dprime, c.b_star);
        c.p_star = p;
        c.b_dprime = tie;
      } catch (const Degenerate&) {
      }
    }

    auto mm = minmax_p1(g);
    c.v1_minmax = mm.value;
    c.minmax_beta = mm.beta;

    c.delta_low = delta_cutoff(g, c.a_star, c.b_star, c.a_prime, c.b_prime);
    c.delta_low_prime = delta_cutoff(g, c.a_star, c.b_star, c.a_wne, c.b_wne);
    return c;
  }

  // max{ (max_a u1(a,b*) - u1(a*,b*)) / (max_a u1(a,b*) - u1(al,bl)),
  //      (u1(al,bl) - u1(a*,bl)) / (u1(a*,b*) - u1(a*,bl)) },
  // or 0 when u1(al,bl) = u1(a*,b*).
  static Scalar delta_cutoff(const StageGame<Scalar>& g, std::size_t a_star,
                             std::size_t b_star, std::size_t a_low,
                             std::size_t b_low) {
    Scalar low = g.u1(a_low, b_low);
    Scalar stack = g.u1(a_star, b_star);
    if (low == stack) return Scalar(0);
    Scalar top = g.max_u1_vs_pure_b(b_star);
    Scalar first = (top - stack) / (top - low);
    Scalar second =
        (low - g.u1(a_star, b_low)) / (stack - g.u1(a_star, b_low));
    return std::max(first, second);
  }
};

}  // namespace repgame
