// Relative entropy and total variation with the conventions the learning
// bounds rely on: 0 log(0/q) = 0, and p > 0 against q = 0 saturates to
// +infinity so that unbounded-informativeness comparisons propagate.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "repgame/errors.hpp"

namespace repgame {

inline double kl_divergence(const std::vector<double>& p,
                            const std::vector<double>& q) {
  if (p.size() != q.size()) throw ValidationError("KL: size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log(p[i] / q[i]);
  }
  return d < 0.0 && d > -1e-15 ? 0.0 : d;  // clamp rounding at equality
}

inline double total_variation(const std::vector<double>& p,
                              const std::vector<double>& q) {
  if (p.size() != q.size()) throw ValidationError("TV: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

// KL between two Bernoulli distributions given as success probabilities.
inline double kl_bernoulli(double p, double q) {
  return kl_divergence({p, 1.0 - p}, {q, 1.0 - q});
}

// Pinsker floor: d(p||q) >= 2 TV(p,q)^2.
inline double pinsker_floor(double tv) { return 2.0 * tv * tv; }

}  // namespace repgame
