// One-shot deviation checks against an automaton's own value and belief
// claims.
//
// Player 1: at every state and branch, the value of each action
//   Q(a) = (1-d) E_b u1(a,b) + d E_b V(next(a,b))
// may not exceed the prescribed support's common value.  Player 2 is myopic:
// at every state whose responder incentives are range-checkable, her
// prescribed actions must best reply to the implied action distribution
// pi . a* + (1-pi) . (strategic mix) at both ends of the state's belief
// interval (the comparison is linear in pi, so endpoints decide), after
// tilting the a*-odds by the state's worst-case current-signal likelihood
// ratio where one applies.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "repgame/automaton.hpp"

namespace repgame {

struct ICEntry {
  std::string state;
  std::string branch;
  int player;  // 1 or 2
  std::size_t action;
  double gain;  // payoff gain from the one-shot deviation
};

struct ICReport {
  double max_violation_p1 = 0.0;
  double max_violation_p2 = 0.0;
  double bellman_residual = 0.0;
  std::vector<ICEntry> entries;

  double max_violation() const {
    return std::max(max_violation_p1, max_violation_p2);
  }
};

namespace detail {

// Worst-case responder belief about a_t after the signal tilt: odds on a*
// multiplied by `boost`, remaining actions scaled proportionally.
inline MixedAction<double> tilt_toward_astar(const MixedAction<double>& alpha,
                                             std::size_t a_star, double boost) {
  if (boost == 1.0 || alpha[a_star] >= 1.0 || alpha[a_star] <= 0.0) {
    return alpha;
  }
  double odds = alpha[a_star] / (1.0 - alpha[a_star]) * boost;
  double p_star = odds / (1.0 + odds);
  MixedAction<double> out = alpha;
  double scale = (1.0 - p_star) / (1.0 - alpha[a_star]);
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = alpha[a] * scale;
  out[a_star] = p_star;
  return out;
}

}  // namespace detail

inline ICReport one_shot_deviation_check(const PhaseAutomaton& m) {
  m.validate();
  ICReport report;
  report.bellman_residual = m.max_bellman_residual();
  const auto& g = m.game;

  for (const auto& s : m.states) {
    for (const auto& br : s.branches) {
      // player 1
      std::vector<double> q(g.na());
      for (std::size_t a = 0; a < g.na(); ++a) {
        double stage = 0.0, cont = 0.0;
        for (std::size_t b = 0; b < g.nb(); ++b) {
          if (br.p2[b] == 0.0) continue;
          stage += br.p2[b] * g.u1(a, b);
          cont += br.p2[b] * m.states[br.next[a][b]].value;
        }
        q[a] = (1.0 - m.delta) * stage + m.delta * cont;
      }
      const auto& mix = m.representative_mix(br);
      double prescribed = 0.0;
      for (std::size_t a = 0; a < g.na(); ++a) prescribed += mix[a] * q[a];
      for (std::size_t a = 0; a < g.na(); ++a) {
        double gain = q[a] - prescribed;
        report.entries.push_back({s.name, br.name, 1, a, gain});
        report.max_violation_p1 = std::max(report.max_violation_p1, gain);
      }

      // player 2 (myopic)
      if (!s.p2_check_by_range) continue;
      auto p2_support = br.p2.support(1e-12);
      for (double pi : {s.pi_low, s.pi_high}) {
        MixedAction<double> alpha;
        if (br.policy == MixPolicy::Fixed) {
          alpha.w.assign(g.na(), 0.0);
          for (std::size_t a = 0; a < g.na(); ++a) {
            alpha[a] = (1.0 - pi) * mix[a];
          }
          alpha[m.a_star] += pi;
        } else {
          alpha = mix;  // calibrated and compensated hit the target exactly
        }
        alpha = detail::tilt_toward_astar(alpha, m.a_star,
                                          s.signal_odds_boost);
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < g.nb(); ++b) {
          best = std::max(best, g.u2_vs_alpha(alpha, b));
        }
        for (std::size_t b : p2_support) {
          double gain = best - g.u2_vs_alpha(alpha, b);
          report.entries.push_back({s.name, br.name, 2, b, gain});
          report.max_violation_p2 = std::max(report.max_violation_p2, gain);
        }
      }
    }
  }
  return report;
}

// Smallest delta in (lo, hi] at which `build` produces an automaton passing
// the one-shot check at `tol`, located by bisection to `delta_tol`.
inline std::optional<double> min_feasible_delta(
    const std::function<std::optional<PhaseAutomaton>(double)>& build,
    double lo = 0.0, double hi = 0.999999, double tol = 1e-9,
    double delta_tol = 1e-6) {
  auto ok = [&](double d) {
    auto m = build(d);
    if (!m) return false;
    return one_shot_deviation_check(*m).max_violation() <= tol;
  };
  if (!ok(hi)) return std::nullopt;
  double bad = lo, good = hi;
  while (good - bad > delta_tol) {
    double mid = 0.5 * (bad + good);
    (ok(mid) ? good : bad) = mid;
  }
  return good;
}

}  // namespace repgame
