// Minmax-payoff variant of the three-phase construction, for games with a
// minmax action beta that avoids b* and best replies to a profile alpha
// containing a*.
//
// Building phase: the responder plays beta; the strategic type plays the
// belief-compensated profile (alpha - pi e_a*)/(1 - pi), so the responder
// faces alpha exactly at every belief.  The transition gate depends on the
// previous action through
//   (1-d) u1(a,beta) + d r(a) u1(a*,b*) + d (1-r(a)) m  =  m,
// m = max_a u1(a,beta) = v1_min, which leaves player 1 indifferent across
// his whole action set; his payoff is v1_min.  Punishment repeats the
// building-phase machinery with the commitment type ruled out.
#pragma once

#include <string>
#include <vector>

#include "repgame/automaton.hpp"
#include "repgame/classify.hpp"
#include "repgame/theorem1.hpp"

namespace repgame {

template <class Scalar>
struct Theorem1PrimeBuild {
  PhaseAutomaton fsm;
  MixedAction<Scalar> alpha;       // Condition-3 witness profile
  MixedAction<Scalar> beta;        // minmax action
  Scalar q_weight{};               // alpha(a*)
  std::vector<Scalar> r;           // per-action transition rates
  Scalar value{};                  // = v1_min
  bool pooling = false;
};

template <class Scalar>
Theorem1PrimeBuild<Scalar> build_theorem1prime(const StageGame<Scalar>& game,
                                               const Scalar& delta,
                                               const Scalar& pi0, int K) {
  if (!game.satisfies_assumption1()) {
    throw PreconditionFail("assumption1", "Assumption 1 fails for this game");
  }
  if (!game.satisfies_assumption2()) {
    throw PreconditionFail("assumption2", "no pure-strategy Nash equilibrium");
  }
  auto cls = classify(game);
  if (!cls.condition3) {
    throw Condition3Missing("no minmax action avoiding b* best replies to a profile containing a*");
  }
  const auto& wit = *cls.c3_witness;
  auto st = game.stackelberg();
  auto mm = minmax_p1(game);
  const Scalar v_min = mm.value;
  const Scalar v_star = game.u1(st.a_star, st.b_star);

  Theorem1PrimeBuild<Scalar> out;
  out.alpha = wit.alpha;
  out.beta = wit.beta;
  out.q_weight = wit.q_weight;
  out.value = v_min;

  if (v_star == v_min) {
    // (a*, b*) is then the unique equilibrium outcome: pool on it.
    out.fsm = build_static_pair(game, delta, pi0, st.a_star, st.b_star,
                                st.a_star, st.b_star, 1.0, Phase::Maintenance);
    out.pooling = true;
    return out;
  }

  // transition gates per action
  out.r.resize(game.na());
  for (std::size_t a = 0; a < game.na(); ++a) {
    Scalar num = (Scalar(1) - delta) * (v_min - game.u1_vs_beta(a, wit.beta));
    Scalar den = delta * (v_star - v_min);
    out.r[a] = num / den;
    if (!(out.r[a] < Scalar(1))) {
      throw DeltaTooLow("transition rate r(a) reaches 1; raise delta");
    }
  }
  {
    // maintenance incentive: a one-period grab of max u1(.,b*) followed by
    // the minmax continuation must not beat u1(a*,b*)
    Scalar lhs = v_star;
    Scalar rhs = (Scalar(1) - delta) * game.max_u1_vs_pure_b(st.b_star) +
                 delta * v_min;
    if (!(lhs >= rhs)) {
      throw DeltaTooLow("maintenance incentive needs a larger delta");
    }
  }
  if (!(pi0 > Scalar(0)) || !(pi0 < pi0_bar(wit.q_weight, 1))) {
    throw PreconditionFail(
        "pi0_bar", "pi0 >= pi0_bar = " +
                       std::to_string(to_double(pi0_bar(wit.q_weight, 1))));
  }

  PhaseAutomaton m{"theorem1prime", game.to_double_game()};
  m.a_star = st.a_star;
  m.b_star = st.b_star;
  m.delta = to_double(delta);
  m.pi0 = to_double(pi0);
  m.K = K;
  m.belief_rule = BeliefRule::CanonizedChain;
  m.belief_window = K;

  const auto& g = m.game;
  const std::size_t na = g.na(), nb = g.nb();
  const double v_min_d = to_double(v_min);
  const double v_star_d = to_double(v_star);
  const double pi_cap = to_double(wit.q_weight) / 2.0;

  const int B_INIT = 0;
  auto bprev = [&](std::size_t a) { return 1 + static_cast<int>(a); };
  const int M1 = 1 + static_cast<int>(na);
  const int M0 = M1 + 1;

  auto alpha_d = to_double_mix(wit.alpha);
  auto beta_d = to_double_mix(wit.beta);

  auto building_next = [&](std::size_t a, std::size_t b) {
    if (b == st.b_star) return a == st.a_star ? M1 : M0;
    return bprev(a);
  };
  auto maintenance_next = [&](std::size_t a, std::size_t b) {
    if (b == st.b_star) return a == st.a_star ? M1 : M0;
    return bprev(a);  // punishment: restart the building machinery
  };
  auto table = [&](auto fn) {
    std::vector<std::vector<int>> t(na, std::vector<int>(nb));
    for (std::size_t a = 0; a < na; ++a) {
      for (std::size_t b = 0; b < nb; ++b) t[a][b] = fn(a, b);
    }
    return t;
  };

  Branch mix_branch{"mix", 1.0, MixPolicy::Compensated, alpha_d, st.a_star,
                    beta_d, table(building_next)};

  m.states.resize(M0 + 1);
  m.states[B_INIT] = AutomatonState{"building", Phase::Building, 0.0, pi_cap,
                                    v_min_d, true, 1.0, {mix_branch}};
  for (std::size_t a = 0; a < na; ++a) {
    double ra = to_double(out.r[a]);
    Branch transit{"transit", ra, MixPolicy::Fixed,
                   MixedAction<double>::pure(st.a_star, na), st.a_star,
                   MixedAction<double>::pure(st.b_star, nb),
                   table(building_next)};
    Branch stay = mix_branch;
    stay.prob = 1.0 - ra;
    std::vector<Branch> branches;
    if (ra > 0.0) branches.push_back(transit);
    stay.prob = ra > 0.0 ? 1.0 - ra : 1.0;
    branches.push_back(stay);
    m.states[bprev(a)] = AutomatonState{
        "building_after_" + g.a_label(a), Phase::Building, 0.0, pi_cap,
        ra * v_star_d + (1.0 - ra) * v_min_d, true, 1.0, std::move(branches)};
  }
  m.states[M1] = AutomatonState{
      "maintenance", Phase::Maintenance, 0.0, 1.0, v_star_d, true, 1.0,
      {Branch{"pool", 1.0, MixPolicy::Fixed,
              MixedAction<double>::pure(st.a_star, na), st.a_star,
              MixedAction<double>::pure(st.b_star, nb),
              table(maintenance_next)}}};
  m.states[M0] = AutomatonState{
      "maintenance_slip", Phase::Maintenance, 0.0, 0.0, v_min_d, true, 1.0,
      {Branch{"slip", 1.0, MixPolicy::Compensated, alpha_d, st.a_star, beta_d,
              table(maintenance_next)}}};
  m.initial = B_INIT;
  m.closed_form_p1_value = v_min_d;
  m.building_kl = std::log(1.0 + (1.0 - to_double(wit.q_weight)) *
                                     (1.0 - m.delta));
  // exit hazard under always-a*: the a*-gate
  m.building_hazard = to_double(out.r[st.a_star]);
  m.params = {{"delta", format_param(delta)},
              {"pi0", format_param(pi0)},
              {"K", std::to_string(K)},
              {"q_weight", format_param(wit.q_weight)},
              {"v1_min", format_param(v_min)}};
  m.validate();
  out.fsm = std::move(m);
  return out;
}

}  // namespace repgame
