// Seeded simulation of constructed equilibria: per-period traces, Monte
// Carlo value estimates, and phase-occupancy statistics.
//
// The belief column replays the construction's own bookkeeping (see
// BeliefRule): a windowed odds product over the observed actions, with the
// strategic type's current mixing weight supplying each period's factor.
#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <vector>

#include "repgame/automaton.hpp"
#include "repgame/rng.hpp"

namespace repgame {

// Windowed odds product over observed actions.  Factors:
//   a* observed:  (1-q)/q (canonized) or 1/q (exact); q = 1 contributes 1;
//                 q = 0 makes the commitment type certain.
//   other action: the commitment type is ruled out while the observation
//                 stays in the window.
class BeliefTracker {
 public:
  BeliefTracker(BeliefRule rule, int window, double pi0)
      : rule_(rule), window_(window), odds0_(pi0 / (1.0 - pi0)) {}

  double pi() const {
    double odds = odds0_;
    for (double f : factors_) {
      if (f == kKill) return 0.0;
      if (f == kSure) return 1.0;
      odds *= f;
    }
    return odds / (1.0 + odds);
  }

  void observe(bool played_star, double q_strategic) {
    double f;
    if (!played_star) {
      f = kKill;
    } else if (q_strategic <= 0.0) {
      f = kSure;
    } else if (q_strategic >= 1.0) {
      f = 1.0;
    } else if (rule_ == BeliefRule::CanonizedChain) {
      f = (1.0 - q_strategic) / q_strategic;
    } else {
      f = 1.0 / q_strategic;
    }
    factors_.push_back(f);
    if (window_ >= 0 && static_cast<int>(factors_.size()) > window_) {
      factors_.pop_front();
    }
  }

 private:
  static constexpr double kKill = -1.0;
  static constexpr double kSure = -2.0;
  BeliefRule rule_;
  int window_;
  double odds0_;
  std::deque<double> factors_;
};

struct PeriodRecord {
  long t;
  Phase phase;
  int a, b;
  double xi, pi, u1, u2, kl;
};

struct RunTrace {
  std::uint64_t seed = 0;
  bool commitment = false;
  std::vector<PeriodRecord> records;
  double disc_u1 = 0.0;  // (1-delta)   sum delta^t   u1
  double disc_u2 = 0.0;  // (1-delta_s) sum delta_s^t u2
  Phase final_phase = Phase::Building;
  double max_pi_building = 0.0;  // largest tracked belief on building periods
};

// Horizon at which the remaining discounted weight drops below `weight_tol`.
inline long truncation_horizon(double delta, double weight_tol = 1e-10) {
  if (delta <= 0.0) return 1;
  return static_cast<long>(std::ceil(std::log(weight_tol) / std::log(delta))) +
         1;
}

struct SimOptions {
  double delta_s = 0.0;  // 0: use the automaton's delta
  long horizon = 0;      // 0: discounted-weight truncation
  bool keep_records = false;
  bool force_star = false;  // strategic type imitates the commitment type
};

inline RunTrace simulate_run(const PhaseAutomaton& m, bool commitment,
                             std::uint64_t seed, const SimOptions& opt = {}) {
  std::mt19937_64 rng(seed);
  const double delta_s = opt.delta_s > 0.0 ? opt.delta_s : m.delta;
  const long horizon =
      opt.horizon > 0
          ? opt.horizon
          : std::max(truncation_horizon(m.delta), truncation_horizon(delta_s));

  RunTrace trace;
  trace.seed = seed;
  trace.commitment = commitment;
  if (opt.keep_records) trace.records.reserve(horizon);

  BeliefTracker tracker(m.belief_rule, m.belief_window, m.pi0);
  int state = m.initial;
  double w1 = 1.0 - m.delta, pow1 = 1.0;
  double w2 = 1.0 - delta_s, pow2 = 1.0;

  for (long t = 0; t < horizon; ++t) {
    const auto& s = m.states[state];
    double xi = uniform01(rng);
    const Branch* br = &s.branches.back();
    double acc = 0.0;
    for (const auto& cand : s.branches) {
      acc += cand.prob;
      if (xi < acc) {
        br = &cand;
        break;
      }
    }

    double pi = tracker.pi();
    trace.max_pi_building =
        s.phase == Phase::Building ? std::max(trace.max_pi_building, pi)
                                   : trace.max_pi_building;

    // strategic type's mixing at this branch
    double q_star_prob;
    MixedAction<double> resolved = br->p1_strategic;
    switch (br->policy) {
      case MixPolicy::Fixed:
        q_star_prob = br->p1_strategic[m.a_star];
        break;
      case MixPolicy::Calibrated: {
        double target = br->p1_strategic[m.a_star];
        double q = m.star_prob_override
                       ? m.star_prob_override(t, pi)
                       : (target - pi) / (1.0 - pi);
        q_star_prob = std::clamp(q, 0.0, 1.0);
        resolved.w.assign(m.game.na(), 0.0);
        resolved[m.a_star] = q_star_prob;
        resolved[br->low_action] += 1.0 - q_star_prob;
        break;
      }
      case MixPolicy::Compensated: {
        resolved.w.assign(m.game.na(), 0.0);
        double total = 0.0;
        for (std::size_t a = 0; a < m.game.na(); ++a) {
          double w = br->p1_strategic[a] - (a == m.a_star ? pi : 0.0);
          resolved[a] = std::max(w, 0.0) / (1.0 - pi);
          total += resolved[a];
        }
        for (auto& w : resolved.w) w /= total;  // clamping feasibility guard
        q_star_prob = resolved[m.a_star];
        break;
      }
    }

    std::size_t a;
    if (commitment || opt.force_star) {
      a = m.a_star;
    } else {
      double u = uniform01(rng);
      a = m.game.na() - 1;
      double c = 0.0;
      for (std::size_t i = 0; i < m.game.na(); ++i) {
        c += resolved[i];
        if (u < c) {
          a = i;
          break;
        }
      }
    }

    std::size_t b = m.game.nb() - 1;
    {
      double u = uniform01(rng);
      double c = 0.0;
      for (std::size_t j = 0; j < m.game.nb(); ++j) {
        c += br->p2[j];
        if (u < c) {
          b = j;
          break;
        }
      }
    }

    double u1 = m.game.u1(a, b), u2 = m.game.u2(a, b);
    trace.disc_u1 += w1 * pow1 * u1;
    trace.disc_u2 += w2 * pow2 * u2;
    pow1 *= m.delta;
    pow2 *= delta_s;

    if (opt.keep_records) {
      double kl = (s.phase == Phase::Building && m.building_kl > 0.0 &&
                   br->p1_strategic[m.a_star] < 1.0)
                      ? m.building_kl
                      : 0.0;
      trace.records.push_back(
          {t, s.phase, static_cast<int>(a), static_cast<int>(b), xi, pi, u1,
           u2, kl});
    }

    tracker.observe(a == m.a_star, q_star_prob);
    state = br->next[a][b];
  }
  trace.final_phase = m.states[state].phase;
  return trace;
}

struct McValue {
  double p1_mean = 0.0, p1_se = 0.0;  // strategic type's discounted payoff
  double p2_mean = 0.0, p2_se = 0.0;  // responder welfare, type-mixed
};

// Player 1's value is estimated on strategic-type runs (his equilibrium
// payoff); responder welfare mixes the commitment type in with weight pi0.
inline McValue mc_value(const PhaseAutomaton& m, double delta_s, double pi0,
                        int n_runs, std::uint64_t seed) {
  if (n_runs < 1) throw ValidationError("mc_value needs n_runs >= 1");
  SeedSplitter split(seed);
  McValue out;
  double s1 = 0, s1sq = 0, s2 = 0, s2sq = 0;
  SimOptions opt;
  opt.delta_s = delta_s;
  for (int r = 0; r < n_runs; ++r) {
    auto t1 = simulate_run(m, false, split.stream(2 * r), opt);
    s1 += t1.disc_u1;
    s1sq += t1.disc_u1 * t1.disc_u1;
    auto rng = std::mt19937_64(split.stream(2 * r + 1));
    bool commit = uniform01(rng) < pi0;
    auto t2 = simulate_run(m, commit, rng(), opt);
    s2 += t2.disc_u2;
    s2sq += t2.disc_u2 * t2.disc_u2;
  }
  out.p1_mean = s1 / n_runs;
  out.p1_se = std::sqrt(std::max(0.0, (s1sq / n_runs - out.p1_mean * out.p1_mean) / n_runs));
  out.p2_mean = s2 / n_runs;
  out.p2_se = std::sqrt(std::max(0.0, (s2sq / n_runs - out.p2_mean * out.p2_mean) / n_runs));
  return out;
}

struct PhaseOccupancy {
  double building = 0.0;
  double maintenance = 0.0;
  double punishment = 0.0;
  // maintenance share among paths that escaped punishment
  double maintenance_among_surviving = 0.0;
};

inline PhaseOccupancy phase_occupancy(const PhaseAutomaton& m, double pi0,
                                      long horizon, int n_runs,
                                      std::uint64_t seed) {
  SeedSplitter split(seed);
  SimOptions opt;
  opt.horizon = horizon;
  PhaseOccupancy out;
  for (int r = 0; r < n_runs; ++r) {
    auto rng = std::mt19937_64(split.stream(r));
    bool commit = uniform01(rng) < pi0;
    auto t = simulate_run(m, commit, rng(), opt);
    switch (t.final_phase) {
      case Phase::Building: out.building += 1; break;
      case Phase::Maintenance: out.maintenance += 1; break;
      case Phase::Punishment: out.punishment += 1; break;
    }
  }
  out.building /= n_runs;
  out.maintenance /= n_runs;
  out.punishment /= n_runs;
  double surviving = out.building + out.maintenance;
  out.maintenance_among_surviving =
      surviving > 0.0 ? out.maintenance / surviving : 0.0;
  return out;
}

}  // namespace repgame
