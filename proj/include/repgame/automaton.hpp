// Strategy profiles as finite-state machines over commonly observed events.
//
// One period in state s:
//   1. the public device xi_t selects a branch (branch probabilities
//      partition [0,1]);
//   2. inside the branch the commitment type plays a*, the strategic type
//      plays the branch's mixing policy, and player 2's action is drawn
//      from the branch's p2 distribution (for network monitoring this is
//      the sample-unconditional mixture, which is exactly the law player 1
//      faces);
//   3. the realized pair (a_t, b_t) deterministically selects the next
//      state.
//
// Each state carries the construction's closed-form continuation value for
// the strategic type and the assessment it imposes: the belief interval the
// responder may hold there.  Verification replays Bellman equations and
// one-shot deviations against exactly these numbers, so a construction that
// mis-states its own value or belief logic fails loudly.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "repgame/errors.hpp"
#include "repgame/mixed.hpp"
#include "repgame/stage_game.hpp"
#include "repgame/vertex_lp.hpp"

namespace repgame {

enum class Phase { Building, Maintenance, Punishment };

inline const char* phase_name(Phase p) {
  switch (p) {
    case Phase::Building: return "building";
    case Phase::Maintenance: return "maintenance";
    default: return "punishment";
  }
}

// How the strategic type mixes inside a branch.
//  Fixed:        play p1_strategic as stored.
//  Calibrated:   make the type-unconditional a* probability equal the
//                stored a* weight: play (target - pi)/(1 - pi) on a*, the
//                rest on the designated low action.
//  Compensated:  make the type-unconditional profile equal the stored mix:
//                play (mix - pi . e_astar)/(1 - pi).
// Calibrated/Compensated resolve against the tracked construction belief at
// simulation time; the responder faces the stored target exactly, which is
// what the incentive checks use.
enum class MixPolicy { Fixed, Calibrated, Compensated };

struct Branch {
  std::string name;
  double prob = 1.0;
  MixPolicy policy = MixPolicy::Fixed;
  MixedAction<double> p1_strategic;
  std::size_t low_action = 0;  // Calibrated: where the residual weight goes
  MixedAction<double> p2;
  std::vector<std::vector<int>> next;  // [a][b] -> state id
};

struct AutomatonState {
  std::string name;
  Phase phase = Phase::Building;
  double pi_low = 0.0;
  double pi_high = 0.0;
  double value = 0.0;  // strategic type's continuation value at state entry
  bool p2_check_by_range = true;  // false: responder ICs checked elsewhere
  double signal_odds_boost = 1.0;  // worst-case current-signal LR on a*
  std::vector<Branch> branches;
};

// Belief bookkeeping rule used when replaying a construction.
//  CanonizedChain: the bounded-memory constructions' own accounting -- one
//                  odds factor (1-q)/q per a* observed from a mixing branch.
//  ExactWindow:    plain Bayes factor 1/q per observed a*.
// Both kill the posterior after a non-a* observation and treat responder
// actions and device draws as uninformative.
enum class BeliefRule { CanonizedChain, ExactWindow };

struct PhaseAutomaton {
  std::string kind;
  StageGame<double> game;

  PhaseAutomaton() : game({"a0", "a1"}, {"b0", "b1"}, {0, 0, 0, 0}, {0, 0, 0, 0}) {}
  PhaseAutomaton(std::string kind_, StageGame<double> game_)
      : kind(std::move(kind_)), game(std::move(game_)) {}
  std::size_t a_star = 0;
  std::size_t b_star = 0;
  double delta = 0.0;
  double pi0 = 0.0;
  int K = 1;
  int initial = 0;
  std::vector<AutomatonState> states;

  BeliefRule belief_rule = BeliefRule::CanonizedChain;
  int belief_window = 1;  // -1: full history (hypothetical observer)

  double closed_form_p1_value = 0.0;
  // Building-phase learning summary (three-phase family): per-period
  // one-step prediction error and the per-period hazard of leaving the
  // mixing branch under the always-a* deviation.  Negative building_kl
  // means the construction does not define the series.
  double building_kl = -1.0;
  double building_hazard = 0.0;

  std::vector<std::pair<std::string, std::string>> params;

  // Optional simulation hook: strategic type's a*-probability as a function
  // of calendar time and the tracked belief (used by the network build,
  // whose building-phase mixing switches rule at the calendar threshold M).
  std::function<double(long t, double tracked_pi)> star_prob_override;

  const AutomatonState& state(int id) const { return states.at(id); }

  void validate() const {
    if (states.empty()) throw ValidationError("automaton has no states");
    for (const auto& s : states) {
      double total = 0.0;
      if (s.branches.empty()) throw ValidationError("state without branches");
      for (const auto& br : s.branches) {
        total += br.prob;
        br.p1_strategic.validate(1e-9);
        br.p2.validate(1e-9);
        if (br.next.size() != game.na()) {
          throw ValidationError("transition table rows != |A|");
        }
        for (const auto& row : br.next) {
          if (row.size() != game.nb()) {
            throw ValidationError("transition table cols != |B|");
          }
          for (int id : row) {
            if (id < 0 || id >= static_cast<int>(states.size())) {
              throw ValidationError("transition target out of range");
            }
          }
        }
      }
      if (std::abs(total - 1.0) > 1e-12) {
        throw ValidationError("branch probabilities must sum to 1");
      }
    }
  }

  // Representative strategic mix of a branch: the stored target.  Exact for
  // Bellman purposes whenever the construction's indifference holds, which
  // verify_values() checks.
  const MixedAction<double>& representative_mix(const Branch& br) const {
    return br.p1_strategic;
  }

  // Residuals of the Bellman equations at the stored state values.
  double max_bellman_residual() const {
    double worst = 0.0;
    for (const auto& s : states) {
      double v = 0.0;
      for (const auto& br : s.branches) {
        double stage = 0.0, cont = 0.0;
        const auto& mix = representative_mix(br);
        for (std::size_t a = 0; a < game.na(); ++a) {
          if (mix[a] == 0.0) continue;
          for (std::size_t b = 0; b < game.nb(); ++b) {
            if (br.p2[b] == 0.0) continue;
            stage += mix[a] * br.p2[b] * game.u1(a, b);
            cont += mix[a] * br.p2[b] * states[br.next[a][b]].value;
          }
        }
        v += br.prob * ((1.0 - delta) * stage + delta * cont);
      }
      worst = std::max(worst, std::abs(v - s.value));
      if (!std::isfinite(v)) {
        throw NonFiniteValue("state value failed to evaluate: " + s.name);
      }
    }
    return worst;
  }
};

// Deterministic text form for golden-file tests: stable field order, exact
// parameter strings where the construction recorded them.
inline std::string serialize(const PhaseAutomaton& m) {
  std::ostringstream out;
  out.precision(12);
  out << "automaton " << m.kind << "\n";
  for (const auto& [k, v] : m.params) out << "param " << k << " = " << v << "\n";
  out << "initial " << m.states[m.initial].name << "\n";
  for (const auto& s : m.states) {
    out << "state " << s.name << " phase=" << phase_name(s.phase)
        << " pi=[" << s.pi_low << "," << s.pi_high << "]"
        << " value=" << s.value << "\n";
    for (const auto& br : s.branches) {
      out << "  branch " << br.name << " prob=" << br.prob << " policy=";
      switch (br.policy) {
        case MixPolicy::Fixed: out << "fixed"; break;
        case MixPolicy::Calibrated: out << "calibrated"; break;
        case MixPolicy::Compensated: out << "compensated"; break;
      }
      out << " p1={";
      bool first = true;
      for (std::size_t a = 0; a < m.game.na(); ++a) {
        if (br.p1_strategic[a] == 0.0) continue;
        if (!first) out << ",";
        out << m.game.a_label(a) << ":" << br.p1_strategic[a];
        first = false;
      }
      out << "} p2={";
      first = true;
      for (std::size_t b = 0; b < m.game.nb(); ++b) {
        if (br.p2[b] == 0.0) continue;
        if (!first) out << ",";
        out << m.game.b_label(b) << ":" << br.p2[b];
        first = false;
      }
      out << "}\n";
      for (std::size_t a = 0; a < m.game.na(); ++a) {
        for (std::size_t b = 0; b < m.game.nb(); ++b) {
          out << "    next " << m.game.a_label(a) << "," << m.game.b_label(b)
              << " -> " << m.states[br.next[a][b]].name << "\n";
        }
      }
    }
  }
  return out.str();
}

// Solves the Bellman system for the states' values in place (used by
// constructions without closed forms for every off-path state).
inline void solve_state_values(PhaseAutomaton& m) {
  const std::size_t n = m.states.size();
  std::vector<std::vector<double>> mat(n, std::vector<double>(n, 0.0));
  std::vector<double> rhs(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    mat[s][s] = 1.0;
    for (const auto& br : m.states[s].branches) {
      const auto& mix = m.representative_mix(br);
      for (std::size_t a = 0; a < m.game.na(); ++a) {
        if (mix[a] == 0.0) continue;
        for (std::size_t b = 0; b < m.game.nb(); ++b) {
          if (br.p2[b] == 0.0) continue;
          double w = br.prob * mix[a] * br.p2[b];
          rhs[s] += w * (1.0 - m.delta) * m.game.u1(a, b);
          mat[s][br.next[a][b]] -= w * m.delta;
        }
      }
    }
  }
  auto sol = solve_linear_system<double>(mat, rhs);
  if (!sol) throw NonFiniteValue("Bellman system is singular");
  for (std::size_t s = 0; s < n; ++s) m.states[s].value = (*sol)[s];
}

}  // namespace repgame
