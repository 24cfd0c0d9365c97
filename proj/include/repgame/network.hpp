// Stochastic sampling networks: per-period random subsets of past periods
// whose long-run-player actions the arriving responder observes.
//
// Requirements carried by every spec: |N_t| <= K_cap almost surely and
// P(t-1 in N_t) >= gamma for all t >= 1, with independent draws across
// periods.  Three builtins cover the assumption's range: the deterministic
// last-K window, independent Bernoulli inclusion truncated to the most
// recent K_cap hits, and a fixed-size uniform sample with the previous
// period forced in with probability gamma.
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "repgame/errors.hpp"
#include "repgame/rng.hpp"

namespace repgame {

enum class SamplerKind { LastK, BernoulliRecent, UniformWithPrev };

struct NetworkSpec {
  SamplerKind kind = SamplerKind::LastK;
  int K_cap = 1;
  double gamma = 1.0;  // lower bound on P(t-1 in N_t)

  static NetworkSpec last_k(int K) { return {SamplerKind::LastK, K, 1.0}; }
  static NetworkSpec bernoulli_recent(int K, double inclusion) {
    if (inclusion <= 0.0 || inclusion > 1.0) {
      throw ValidationError("inclusion probability outside (0,1]");
    }
    return {SamplerKind::BernoulliRecent, K, inclusion};
  }
  static NetworkSpec uniform_with_prev(int K, double gamma) {
    if (gamma <= 0.0 || gamma > 1.0) {
      throw ValidationError("gamma outside (0,1]");
    }
    return {SamplerKind::UniformWithPrev, K, gamma};
  }

  std::string kind_name() const {
    switch (kind) {
      case SamplerKind::LastK: return "last_k";
      case SamplerKind::BernoulliRecent: return "bernoulli_recent";
      default: return "uniform_with_prev";
    }
  }

  // Exact P(t-1 in N_t) for this sampler.
  double prob_contains_prev(long t) const {
    if (t < 1) return 0.0;
    switch (kind) {
      case SamplerKind::LastK: return 1.0;
      case SamplerKind::BernoulliRecent: return gamma;
      case SamplerKind::UniformWithPrev: return gamma;
    }
    return 0.0;
  }

  std::vector<long> sample(long t, std::mt19937_64& rng) const {
    if (t < 1) return {};
    std::vector<long> out;
    switch (kind) {
      case SamplerKind::LastK: {
        for (long s = std::max<long>(0, t - K_cap); s < t; ++s) out.push_back(s);
        break;
      }
      case SamplerKind::BernoulliRecent: {
        // i.i.d. inclusion, keep the most recent K_cap hits
        for (long s = t - 1; s >= 0; --s) {
          if (uniform01(rng) < gamma) {
            out.push_back(s);
            if (static_cast<int>(out.size()) == K_cap) break;
          }
        }
        std::sort(out.begin(), out.end());
        break;
      }
      case SamplerKind::UniformWithPrev: {
        bool take_prev = uniform01(rng) < gamma;
        std::vector<long> pool;
        for (long s = 0; s < t - 1; ++s) pool.push_back(s);
        std::shuffle(pool.begin(), pool.end(), rng);
        int want = K_cap - (take_prev ? 1 : 0);
        for (int i = 0; i < want && i < static_cast<int>(pool.size()); ++i) {
          out.push_back(pool[i]);
        }
        if (take_prev) out.push_back(t - 1);
        std::sort(out.begin(), out.end());
        break;
      }
    }
    if (static_cast<int>(out.size()) > K_cap) {
      throw SpecViolation("sampler produced more than K_cap indices");
    }
    return out;
  }
};

}  // namespace repgame
