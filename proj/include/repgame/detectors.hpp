// Equilibrium-property detectors: responder herding and the informativeness
// dichotomy for bounded-memory monitoring.
#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "repgame/automaton.hpp"
#include "repgame/info.hpp"

namespace repgame {

struct HerdingCertificate {
  std::string state;  // history class where the herd starts
  std::size_t action;
};

namespace detail {

// On-path successor states: either type's action against the responder mix.
inline std::set<int> onpath_successors(const PhaseAutomaton& m, int id) {
  std::set<int> out;
  const auto& s = m.states[id];
  for (const auto& br : s.branches) {
    if (br.prob <= 0.0) continue;
    auto mix = m.representative_mix(br);
    for (std::size_t a = 0; a < m.game.na(); ++a) {
      bool playable = mix[a] > 0.0 || a == m.a_star;
      if (!playable) continue;
      for (std::size_t b = 0; b < m.game.nb(); ++b) {
        if (br.p2[b] > 0.0) out.insert(br.next[a][b]);
      }
    }
  }
  return out;
}

}  // namespace detail

// Reports every reachable state carrying positive commitment probability
// from which one fixed action b != b* is played at all on-path
// continuations within `horizon` periods.
inline std::vector<HerdingCertificate> detect_herding(const PhaseAutomaton& m,
                                                      long horizon) {
  m.validate();
  // reachable states
  std::set<int> reachable{m.initial};
  for (;;) {
    std::set<int> grown = reachable;
    for (int id : reachable) {
      auto next = detail::onpath_successors(m, id);
      grown.insert(next.begin(), next.end());
    }
    if (grown == reachable) break;
    reachable = std::move(grown);
  }

  std::vector<HerdingCertificate> certs;
  for (int id : reachable) {
    const auto& s = m.states[id];
    if (s.pi_high <= 0.0) continue;
    std::set<int> frontier{id};
    std::set<int> visited;
    std::set<std::size_t> played;
    for (long depth = 0; depth < horizon && !frontier.empty(); ++depth) {
      std::set<int> next;
      for (int f : frontier) {
        if (!visited.insert(f).second) continue;
        for (const auto& br : m.states[f].branches) {
          if (br.prob <= 0.0) continue;
          for (std::size_t b = 0; b < m.game.nb(); ++b) {
            if (br.p2[b] > 0.0) played.insert(b);
          }
        }
        auto succ = detail::onpath_successors(m, f);
        next.insert(succ.begin(), succ.end());
      }
      frontier.clear();
      for (int n : next) {
        if (!visited.count(n)) frontier.insert(n);
      }
      if (played.size() > 1) break;
    }
    if (played.size() == 1 && *played.begin() != m.b_star) {
      certs.push_back({s.name, *played.begin()});
    }
  }
  return certs;
}

struct InformativenessResult {
  bool informative = false;      // next-K responder actions react to a_t
  bool bstar_guarantee = false;  // b* assured along a*-runs for K periods
  bool holds() const { return informative || bstar_guarantee; }
  double max_tv = 0.0;
};

// Distribution over the next K responder actions conditional on player 1
// playing `a` now and reverting to the equilibrium strategy afterwards.
inline std::map<std::vector<int>, double> next_k_b_distribution(
    const PhaseAutomaton& m, int state_id, std::size_t a_now, int K) {
  struct Node {
    int state;
    std::vector<int> seq;
    double w;
  };
  // period t: action a_now, b_t drawn, but only b_{t+1..t+K} are collected
  std::vector<Node> layer;
  const auto& s0 = m.states[state_id];
  for (const auto& br : s0.branches) {
    if (br.prob <= 0.0) continue;
    for (std::size_t b = 0; b < m.game.nb(); ++b) {
      if (br.p2[b] <= 0.0) continue;
      layer.push_back({br.next[a_now][b], {}, br.prob * br.p2[b]});
    }
  }
  for (int step = 0; step < K; ++step) {
    std::vector<Node> next;
    for (const auto& node : layer) {
      const auto& s = m.states[node.state];
      for (const auto& br : s.branches) {
        if (br.prob <= 0.0) continue;
        auto mix = m.representative_mix(br);
        for (std::size_t a = 0; a < m.game.na(); ++a) {
          if (mix[a] <= 0.0) continue;
          for (std::size_t b = 0; b < m.game.nb(); ++b) {
            if (br.p2[b] <= 0.0) continue;
            Node n = node;
            n.state = br.next[a][b];
            n.seq.push_back(static_cast<int>(b));
            n.w *= br.prob * mix[a] * br.p2[b];
            next.push_back(std::move(n));
          }
        }
      }
    }
    layer = std::move(next);
  }
  std::map<std::vector<int>, double> dist;
  for (const auto& node : layer) dist[node.seq] += node.w;
  return dist;
}

inline InformativenessResult informativeness_check(const PhaseAutomaton& m,
                                                   int state_id, int K,
                                                   double tol = 1e-9) {
  InformativenessResult out;
  std::vector<std::map<std::vector<int>, double>> dists;
  for (std::size_t a = 0; a < m.game.na(); ++a) {
    dists.push_back(next_k_b_distribution(m, state_id, a, K));
  }
  for (std::size_t a = 0; a < dists.size(); ++a) {
    for (std::size_t a2 = a + 1; a2 < dists.size(); ++a2) {
      std::set<std::vector<int>> keys;
      for (const auto& [k, v] : dists[a]) keys.insert(k);
      for (const auto& [k, v] : dists[a2]) keys.insert(k);
      double tv = 0.0;
      for (const auto& k : keys) {
        double pa = dists[a].count(k) ? dists[a].at(k) : 0.0;
        double pb = dists[a2].count(k) ? dists[a2].at(k) : 0.0;
        tv += std::abs(pa - pb);
      }
      out.max_tv = std::max(out.max_tv, 0.5 * tv);
    }
  }
  out.informative = out.max_tv > tol;

  // b*-guarantee branch: after a*-runs of length tau <= K from here, every
  // on-path responder action is b*.
  out.bstar_guarantee = true;
  std::set<int> frontier;
  {
    const auto& s0 = m.states[state_id];
    for (const auto& br : s0.branches) {
      if (br.prob <= 0.0) continue;
      for (std::size_t b = 0; b < m.game.nb(); ++b) {
        if (br.p2[b] > 0.0) frontier.insert(br.next[m.a_star][b]);
      }
    }
  }
  for (int tau = 1; tau <= K && out.bstar_guarantee; ++tau) {
    std::set<int> next;
    for (int f : frontier) {
      for (const auto& br : m.states[f].branches) {
        if (br.prob <= 0.0) continue;
        for (std::size_t b = 0; b < m.game.nb(); ++b) {
          if (br.p2[b] > 0.0 && b != m.b_star) out.bstar_guarantee = false;
          if (br.p2[b] > 0.0) next.insert(br.next[m.a_star][b]);
        }
      }
    }
    frontier = std::move(next);
  }
  return out;
}

}  // namespace repgame
