// The cyclic construction attaining the asymptotic lower bound
//   K/(K+1) u1(a*,b*) + 1/(K+1) min_{b in B*} u1(a*, b):
// on path, the stage equilibrium (a',b') is played whenever calendar time is
// divisible by K+1 and the Stackelberg pair (a*,b*) otherwise.  Off-path
// classification follows the responder-history rules: a revealed deviation
// flips the cycle for one period, a responder deviation at a divisible
// period triggers a one-half forgiveness lottery, and any broken work
// period is absorbing punishment.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "repgame/automaton.hpp"
#include "repgame/classify.hpp"
#include "repgame/derived.hpp"
#include "repgame/minmax.hpp"
#include "repgame/rng.hpp"
#include "repgame/theorem1.hpp"

namespace repgame {

// min over beta in B* of u1(a*, beta); linearity puts the optimum at a pure
// action of some feasible best-reply support.
template <class Scalar>
Scalar min_u1_astar_over_bstar_set(const StageGame<Scalar>& g,
                                   std::size_t a_star) {
  std::vector<std::vector<std::size_t>> supports;
  detail::subsets<Scalar>(g.nb(), supports);
  std::optional<Scalar> best;
  for (const auto& s : supports) {
    if (!best_reply_support_witness(g, s)) continue;
    for (auto b : s) {
      Scalar v = g.u1(a_star, b);
      if (!best || v < *best) best = v;
    }
  }
  if (!best) throw NonFiniteValue("no feasible best-reply support");
  return *best;
}

// RHS of the asymptotic payoff bound.
template <class Scalar>
Scalar prop3_bound(const StageGame<Scalar>& g, int K) {
  auto st = g.stackelberg();
  Scalar k(K);
  Scalar kp1(K + 1);
  return (k / kp1) * g.u1(st.a_star, st.b_star) +
         (Scalar(1) / kp1) * min_u1_astar_over_bstar_set(g, st.a_star);
}

// Responsiveness bound: the slack in the next-K action distributions below
// which a strict deviation to a lower action is profitable,
//   Delta = (1-d) / (2 K d (u1max - u1min)) * min_{a < a*, b} (u1(a,b) - u1(a*,b)).
template <class Scalar>
Scalar prop3_delta_bound(const StageGame<Scalar>& g, const Scalar& delta,
                         int K) {
  if (!g.order_p1()) {
    throw PreconditionFail("order", "needs the monotone order on A");
  }
  auto st = g.stackelberg();
  const auto& order = *g.order_p1();
  std::size_t star_rank = 0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (order[r] == st.a_star) star_rank = r;
  }
  std::optional<Scalar> min_gap;
  for (std::size_t r = star_rank + 1; r < order.size(); ++r) {
    for (std::size_t b = 0; b < g.nb(); ++b) {
      Scalar gap = g.u1(order[r], b) - g.u1(st.a_star, b);
      if (!min_gap || gap < *min_gap) min_gap = gap;
    }
  }
  if (!min_gap) throw PreconditionFail("order", "a* is the lowest action");
  Scalar span = g.max_u1() - g.min_u1();
  return (Scalar(1) - delta) * (*min_gap) /
         (Scalar(2) * Scalar(K) * delta * span);
}

// Discounted cycle value at a divisible period (the V of the incentive
// argument).
template <class Scalar>
Scalar prop3_cycle_value(const StageGame<Scalar>& g, const Scalar& delta,
                         int K) {
  auto st = g.stackelberg();
  auto ne = g.worst_pure_ne_p1();
  Scalar num = g.u1(ne.a, ne.b);
  Scalar pow = delta;
  Scalar den(1);
  for (int i = 1; i <= K; ++i) {
    num += pow * g.u1(st.a_star, st.b_star);
    den += pow;
    pow *= delta;
  }
  return num / den;
}

// The three one-shot incentive inequalities of the construction, evaluated
// with the conservative continuation V.  Returns the worst slack (>= 0 means
// all hold).
template <class Scalar>
Scalar prop3_ic_slack(const StageGame<Scalar>& g, const Scalar& delta, int K) {
  auto st = g.stackelberg();
  auto ne = g.worst_pure_ne_p1();
  const Scalar v_low = g.u1(ne.a, ne.b);
  const Scalar v_star = g.u1(st.a_star, st.b_star);
  const Scalar one_minus = Scalar(1) - delta;
  const Scalar v = prop3_cycle_value(g, delta, K);

  Scalar max_dev_bstar = g.u1(0, st.b_star);
  for (std::size_t a = 0; a < g.na(); ++a) {
    if (a == st.a_star) continue;
    max_dev_bstar = std::max(max_dev_bstar, g.u1(a, st.b_star));
  }
  // work periods with the next period also a work period
  Scalar slack1 = (one_minus * v_star + delta * v) -
                  (one_minus * max_dev_bstar + delta * v_low);
  // work period right before a rest period: deviation is followed by the
  // forgiveness lottery continuation
  Scalar lottery = one_minus * v_star +
                   delta * ((v + v_low) / Scalar(2));
  Scalar slack3 = (one_minus * v_star + delta * v) -
                  (one_minus * max_dev_bstar + delta * lottery);
  // post-deviation period: playing a* into the lottery must beat punishment
  Scalar slack_post = lottery - (one_minus * max_dev_bstar + delta * v_low);

  Scalar worst = std::min(slack1, std::min(slack3, slack_post));
  if (g.na() > 2) {
    // rest periods: a' must beat the actions other than a* and a'
    Scalar max_other = g.min_u1();
    for (std::size_t a = 0; a < g.na(); ++a) {
      if (a == st.a_star || a == ne.a) continue;
      max_other = std::max(max_other, g.u1(a, ne.b));
    }
    Scalar slack2 = (one_minus * g.u1(ne.a, ne.b) + delta * v) -
                    (one_minus * max_other + delta * v_low);
    worst = std::min(worst, slack2);
  }
  return worst;
}

template <class Scalar>
double prop3_min_delta(const StageGame<Scalar>& g, int K,
                       double tol = 1e-6) {
  double lo = 0.0, hi = 1.0 - 1e-9;
  if (to_double(prop3_ic_slack(g.to_double_game(), hi, K)) < 0.0) {
    throw DeltaTooLow("cycle incentives infeasible even near delta = 1");
  }
  auto gd = g.to_double_game();
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    (prop3_ic_slack(gd, mid, K) >= 0.0 ? hi : lo) = mid;
  }
  return hi;
}

template <class Scalar>
struct Prop3Build {
  PhaseAutomaton fsm;
  Scalar bound{};      // RHS of the asymptotic inequality
  Scalar cycle_value{};
};

// Assembles the full automaton, including the off-path machinery.  State
// contexts: the clean cycle, the one-period inverted cycle after a revealed
// deviation, the forgiveness lottery and its failure continuation, the
// cycle with a flagged divisible-period responder deviation, and absorbing
// punishment.
template <class Scalar>
Prop3Build<Scalar> build_prop3_tight(const StageGame<Scalar>& game,
                                     int K, const Scalar& delta,
                                     const Scalar& pi0) {
  if (!classify(game).monotone_supermodular) {
    throw PreconditionFail("msm", "cyclic construction needs MSM payoffs");
  }
  if (K < 1) throw PreconditionFail("K", "needs K >= 1");
  auto st = game.stackelberg();
  auto ne = game.worst_pure_ne_p1();
  auto [q_thresh, tie] = indifference_threshold(game, st.a_star, ne.a, ne.b);
  if (!(pi0 > Scalar(0)) || !(pi0 < q_thresh)) {
    throw PreconditionFail("pi0_bar",
                           "pi0 >= the responder indifference threshold");
  }
  if (to_double(prop3_ic_slack(game, delta, K)) < 0.0) {
    throw PreconditionFail("delta",
                           "delta below the cycle construction's cutoff");
  }

  PhaseAutomaton m{"prop3_cycle", game.to_double_game()};
  m.a_star = st.a_star;
  m.b_star = st.b_star;
  m.delta = to_double(delta);
  m.pi0 = to_double(pi0);
  m.K = K;
  m.belief_rule = BeliefRule::ExactWindow;
  m.belief_window = K;
  m.building_kl = 0.0;  // deterministic on-path play: zero prediction error

  const auto& g = m.game;
  const std::size_t na = g.na(), nb = g.nb();
  const int P = 5 * (K + 1);  // punished
  enum Ctx { Clean = 0, AfterDev = 1, Lot = 2, Post = 3, FlagS = 4 };
  auto id = [&](Ctx c, int j) { return static_cast<int>(c) * (K + 1) + j; };

  auto next_state = [&](Ctx c, int j, std::size_t a, std::size_t b) -> int {
    int jn = (j + 1) % (K + 1);
    bool flag_s = (c == Lot || c == Post || c == FlagS);
    // responder-history flags at t+1
    if (j != 0 && b != m.b_star) return P;            // broken work period
    if (j == 0 && b != ne.b) flag_s = true;           // divisible-period slip
    if (!flag_s) {
      // bullet-1 world: did player 1 reveal a deviation this period?
      bool on_path;
      if (c == Clean) {
        on_path = (j == 0) ? (a == st.a_star || a == ne.a) : (a == st.a_star);
      } else {  // AfterDev: inverted prescription
        on_path = (j == 0) ? (a == st.a_star) : (a == ne.a || a == st.a_star);
      }
      return on_path ? id(Clean, jn) : id(AfterDev, jn);
    }
    if (j == 0 && b == m.b_star) {
      return a == st.a_star ? id(Lot, jn) : id(Post, jn);
    }
    return id(FlagS, jn);
  };

  auto table = [&](Ctx c, int j) {
    std::vector<std::vector<int>> t(na, std::vector<int>(nb));
    for (std::size_t a = 0; a < na; ++a) {
      for (std::size_t b = 0; b < nb; ++b) t[a][b] = next_state(c, j, a, b);
    }
    return t;
  };

  auto pure_branch = [&](const std::string& name, double prob, std::size_t a,
                         std::size_t b, Ctx c, int j) {
    return Branch{name, prob, MixPolicy::Fixed,
                  MixedAction<double>::pure(a, na), ne.a,
                  MixedAction<double>::pure(b, nb), table(c, j)};
  };

  m.states.resize(5 * (K + 1) + 1);
  double pi0d = to_double(pi0);
  for (int j = 0; j <= K; ++j) {
    bool rest = (j == 0);
    std::size_t a_cycle = rest ? ne.a : st.a_star;
    std::size_t b_cycle = rest ? ne.b : m.b_star;
    m.states[id(Clean, j)] = AutomatonState{
        "cycle_" + std::to_string(j), rest ? Phase::Building : Phase::Maintenance,
        0.0, rest ? pi0d : 1.0, 0.0, true, 1.0,
        {pure_branch("cycle", 1.0, a_cycle, b_cycle, Clean, j)}};
    m.states[id(AfterDev, j)] = AutomatonState{
        "inverted_" + std::to_string(j), Phase::Punishment, 0.0, 0.0, 0.0,
        true, 1.0,
        {pure_branch("inverted", 1.0, rest ? st.a_star : ne.a,
                     rest ? m.b_star : ne.b, AfterDev, j)}};
    m.states[id(Lot, j)] = AutomatonState{
        "lottery_" + std::to_string(j), Phase::Punishment, 0.0, 0.0, 0.0, true,
        1.0,
        {pure_branch("forgive", 0.5, st.a_star, m.b_star, Lot, j),
         pure_branch("punish", 0.5, ne.a, ne.b, Lot, j)}};
    m.states[id(Post, j)] = AutomatonState{
        "post_" + std::to_string(j), Phase::Punishment, 0.0, 0.0, 0.0, true,
        1.0,
        {pure_branch("post", 1.0, ne.a, ne.b, Post, j)}};
    m.states[id(FlagS, j)] = AutomatonState{
        "flagged_cycle_" + std::to_string(j),
        rest ? Phase::Building : Phase::Maintenance, 0.0, rest ? pi0d : 1.0,
        0.0, true, 1.0,
        {pure_branch("cycle", 1.0, a_cycle, b_cycle, FlagS, j)}};
  }
  {
    std::vector<std::vector<int>> t(na, std::vector<int>(nb, P));
    m.states[P] = AutomatonState{
        "punishment", Phase::Punishment, 0.0, pi0d,
        g.u1(ne.a, ne.b), true, 1.0,
        {Branch{"absorb", 1.0, MixPolicy::Fixed,
                MixedAction<double>::pure(ne.a, na), ne.a,
                MixedAction<double>::pure(ne.b, nb), t}}};
  }
  m.initial = id(Clean, 0);
  solve_state_values(m);
  m.closed_form_p1_value = m.states[m.initial].value;
  m.params = {
      {"delta", format_param(delta)},
      {"pi0", format_param(pi0)},
      {"K", std::to_string(K)},
      {"cycle_value", format_param(prop3_cycle_value(game, delta, K))},
  };
  m.validate();

  Prop3Build<Scalar> out;
  out.fsm = std::move(m);
  out.bound = prop3_bound(game, K);
  out.cycle_value = prop3_cycle_value(game, delta, K);
  return out;
}

// Time-average payoff of the always-a* deviation against the constructed
// responder strategy (deterministic on the clean cycle).
inline double prop3_always_star_average(const PhaseAutomaton& m,
                                        long horizon) {
  int state = m.initial;
  double total = 0.0;
  std::mt19937_64 rng(1u);
  for (long t = 0; t < horizon; ++t) {
    const auto& s = m.states[state];
    const Branch* br = &s.branches.back();
    double xi = uniform01(rng);
    double acc = 0.0;
    for (const auto& cand : s.branches) {
      acc += cand.prob;
      if (xi < acc) {
        br = &cand;
        break;
      }
    }
    std::size_t a = m.a_star;
    std::size_t b = br->p2.support().front();
    // responder action is pure in every branch of this construction
    total += m.game.u1(a, b);
    state = br->next[a][b];
  }
  return total / static_cast<double>(horizon);
}

}  // namespace repgame
