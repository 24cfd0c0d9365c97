// Bayesian posterior machinery: odds-ratio updates on the commitment type,
// the bounded-memory reputation chain of the three-phase construction, and
// exact conditional distributions over action-indicator histories.
//
// Two distinct objects live here and should not be confused:
//
//  * update_odds / chi_posterior are exact Bayes.
//
//  * reputation_after_public_K reproduces the construction's own accounting
//    of the bounded-memory posterior: one odds factor (1 - q)/q per
//    Stackelberg action observed in the K-window (q the strategic type's
//    building-phase mixing weight), factor 1 for responder actions and
//    device draws, posterior 0 after any non-Stackelberg observation.
//    Under pi0 < pi0_bar(q*, K) this chain stays below q*/2 on every
//    building-phase history, which is the bound the responder's incentive
//    argument consumes.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "repgame/errors.hpp"

namespace repgame {

// Sparse distribution over indicator histories chi^t in {0,1}^t.
struct ChiDistribution {
  int t = 0;
  std::vector<std::pair<std::uint32_t, double>> mass;  // (bits, prob)

  double total() const {
    double s = 0.0;
    for (const auto& [bits, w] : mass) s += w;
    return s;
  }

  // P(chi_s = 1).
  double marginal(int s) const {
    double p = 0.0;
    for (const auto& [bits, w] : mass) {
      if (bits & (std::uint32_t(1) << s)) p += w;
    }
    return p;
  }
};

struct BeliefState {
  double pi = 0.0;  // posterior on the commitment type
  std::optional<ChiDistribution> chi_dist;
};

// Posterior after one period: posterior odds = prior odds * (lc / ls).
// lc/ls are the likelihoods of the period's observation under the
// commitment and the strategic type.  Both zero means the observation is
// off-path for every type and the caller must supply an off-path belief.
inline double update_odds(double prior_pi, double lik_commit,
                          double lik_strategic) {
  if (lik_commit < 0.0 || lik_strategic < 0.0) {
    throw ValidationError("negative likelihood");
  }
  double pc = prior_pi * lik_commit;
  double ps = (1.0 - prior_pi) * lik_strategic;
  if (pc == 0.0 && ps == 0.0) {
    throw BothZero("observation has probability 0 under both types");
  }
  return pc / (pc + ps);
}

inline BeliefState update_odds(const BeliefState& prior, double lik_commit,
                               double lik_strategic) {
  return BeliefState{update_odds(prior.pi, lik_commit, lik_strategic),
                     std::nullopt};
}

// --- bounded-memory reputation chain -------------------------------------

// What the chain needs to know about a Theorem-1-style construction.
struct ReputationChainSpec {
  double pi0 = 0.0;
  double q_mix = 0.0;  // strategic type's a* weight in the building phase
  int K = 1;
};

// Public history under K-bounded memory: the full responder action history
// and player 1's last min(K, t) actions, each encoded as "was it on the
// equilibrium-path action".  b codes: 0 = phase-low action (b'), 1 = b*,
// anything else = off both types' paths.
struct PublicHistoryK {
  int t = 0;
  std::vector<int> b_codes;     // length t
  std::vector<bool> a_is_star;  // length min(K, t), oldest first
};

// Construction-chain posterior at a bounded-memory public history.
// Window periods that fall in the building phase contribute the odds factor
// (1 - q)/q per observed a*; post-transition periods contribute factor 1
// (both types play a* there).
inline BeliefState reputation_after_public_K(const ReputationChainSpec& spec,
                                             const PublicHistoryK& h) {
  if (h.t < 0 || static_cast<int>(h.b_codes.size()) != h.t) {
    throw ValidationError("history length mismatch");
  }
  const int window = static_cast<int>(h.a_is_star.size());
  if (window > std::min(spec.K, h.t)) {
    throw ValidationError("window longer than min(K, t)");
  }
  for (int code : h.b_codes) {
    if (code != 0 && code != 1) {
      throw InconsistentHistory("responder action off both types' paths");
    }
  }
  if (h.t == 0) return BeliefState{spec.pi0, std::nullopt};

  for (bool star : h.a_is_star) {
    if (!star) return BeliefState{0.0, std::nullopt};
  }

  // first b* marks the transition out of the building phase
  int s_star = h.t;
  for (int s = 0; s < h.t; ++s) {
    if (h.b_codes[s] == 1) {
      s_star = s;
      break;
    }
  }

  double odds = spec.pi0 / (1.0 - spec.pi0);
  const double factor = (1.0 - spec.q_mix) / spec.q_mix;
  for (int i = 0; i < window; ++i) {
    int period = h.t - window + i;
    if (period < s_star) odds *= factor;  // building-phase observation
  }
  return BeliefState{odds / (1.0 + odds), std::nullopt};
}

// --- exact indicator-history posterior ------------------------------------

inline constexpr int kChiEnumerationCap = 20;

// Strategic type's mixing as a function of the indicator prefix:
// q(prefix_bits, s) = P(chi_s = 1 | chi_0..chi_{s-1}).
using ChiMixing = std::function<double(std::uint32_t prefix_bits, int s)>;

// Optional likelihood of the period-s public observation given the
// indicator bit (used to condition on responder histories whose law depends
// on past indicators); defaults to 1.
using ChiObservationLik = std::function<double(int s, bool bit)>;

struct NetworkHistoryView {
  int t = 0;
  std::vector<int> sampled;        // indices in [0, t)
  std::vector<bool> sampled_star;  // observed indicator at each sampled index
};

// Exact conditional over chi^t given the strategic type, the sampled
// coordinates, and the public observation likelihoods.  Enumerates at most
// 2^t paths with zero-mass pruning; refuses t beyond the cap.
inline ChiDistribution chi_posterior(const ChiMixing& mixing,
                                     const NetworkHistoryView& h,
                                     const ChiObservationLik& obs_lik = {}) {
  if (h.t > kChiEnumerationCap) {
    throw CapExceeded("chi enumeration beyond T_max = 20");
  }
  std::vector<char> forced(h.t, -1);
  for (std::size_t k = 0; k < h.sampled.size(); ++k) {
    int s = h.sampled[k];
    if (s < 0 || s >= h.t) throw ValidationError("sampled index out of range");
    forced[s] = h.sampled_star[k] ? 1 : 0;
  }

  std::vector<std::pair<std::uint32_t, double>> paths{{0u, 1.0}};
  for (int s = 0; s < h.t; ++s) {
    std::vector<std::pair<std::uint32_t, double>> next;
    next.reserve(paths.size() * 2);
    for (const auto& [bits, w] : paths) {
      double q = mixing(bits, s);
      if (q < -1e-12 || q > 1.0 + 1e-12) {
        throw ValidationError("mixing probability outside [0,1]");
      }
      for (int bit = 0; bit <= 1; ++bit) {
        if (forced[s] >= 0 && forced[s] != bit) continue;
        double pw = bit ? q : 1.0 - q;
        if (obs_lik) pw *= obs_lik(s, bit != 0);
        if (pw <= 0.0) continue;
        next.emplace_back(bits | (std::uint32_t(bit) << s), w * pw);
      }
    }
    paths = std::move(next);
    if (paths.empty()) {
      throw InconsistentHistory("no indicator path matches the observations");
    }
  }

  ChiDistribution dist;
  dist.t = h.t;
  double total = 0.0;
  for (const auto& [bits, w] : paths) total += w;
  dist.mass.reserve(paths.size());
  for (const auto& [bits, w] : paths) dist.mass.emplace_back(bits, w / total);
  return dist;
}

}  // namespace repgame
