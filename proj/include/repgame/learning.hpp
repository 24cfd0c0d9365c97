// Learning-speed metrics: one-step-ahead prediction errors and the
// entropy budget they must respect.
//
// For the three-phase family the building-phase per-period error is the
// construction's closed form log(1 + (1-q*)(1-delta)); under the always-a*
// deviation the mixing regime survives each period with probability
// (1 - r), so the expected per-period series is (1-r)^t times that value
// and the cumulative sum stays below the budget -log pi0.
#pragma once

#include <cmath>
#include <vector>

#include "repgame/automaton.hpp"

namespace repgame {

struct PredictionErrorSeries {
  double building_value = 0.0;         // per-period KL in the building phase
  std::vector<double> per_period;      // expected error under always-a*
  std::vector<double> cumulative;      // running sums
  double budget = 0.0;                 // -log pi0
  bool within_budget = true;
};

inline PredictionErrorSeries prediction_error_series(const PhaseAutomaton& m,
                                                     double pi0,
                                                     long horizon) {
  if (m.building_kl < 0.0) {
    throw ValidationError(
        "prediction-error series undefined for this construction");
  }
  PredictionErrorSeries out;
  out.building_value = m.building_kl;
  out.budget = -std::log(pi0);
  out.per_period.reserve(horizon);
  out.cumulative.reserve(horizon);
  double survive = 1.0, cum = 0.0;
  for (long t = 0; t < horizon; ++t) {
    double d = survive * m.building_kl;
    cum += d;
    out.per_period.push_back(d);
    out.cumulative.push_back(cum);
    survive *= 1.0 - m.building_hazard;
  }
  out.within_budget = cum <= out.budget;
  return out;
}

}  // namespace repgame
