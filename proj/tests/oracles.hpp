// Independent brute-force oracles.  These deliberately avoid the library's
// solution paths: grids and exhaustive enumeration only, so that agreement
// is evidence rather than tautology.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <repgame/stage_game.hpp>

namespace oracles {

// Grid approximation of min_{beta in B*} max_a u1(a, beta).  Walks alpha over
// a simplex grid, records the best-reply set of each alpha, then walks beta
// over each recorded support.  Supports na, nb in {2, 3}.
inline double grid_minmax_p1(const repgame::StageGame<double>& g, int steps,
                             double tie_tol = 1e-9) {
  auto simplex_grid = [steps](std::size_t dim) {
    std::vector<std::vector<double>> pts;
    if (dim == 1) {
      pts.push_back({1.0});
      return pts;
    }
    if (dim == 2) {
      for (int i = 0; i <= steps; ++i) {
        double p = static_cast<double>(i) / steps;
        pts.push_back({p, 1.0 - p});
      }
      return pts;
    }
    for (int i = 0; i <= steps; ++i) {
      for (int j = 0; i + j <= steps; ++j) {
        double p = static_cast<double>(i) / steps;
        double q = static_cast<double>(j) / steps;
        pts.push_back({p, q, 1.0 - p - q});
      }
    }
    return pts;
  };

  std::vector<std::vector<std::size_t>> seen_supports;
  for (const auto& w : simplex_grid(g.na())) {
    repgame::MixedAction<double> alpha{std::vector<double>(w)};
    auto br = g.best_reply_p2(alpha, tie_tol);
    if (std::find(seen_supports.begin(), seen_supports.end(), br) ==
        seen_supports.end()) {
      seen_supports.push_back(br);
    }
  }

  double best = std::numeric_limits<double>::infinity();
  for (const auto& support : seen_supports) {
    for (const auto& w : simplex_grid(support.size())) {
      repgame::MixedAction<double> beta;
      beta.w.assign(g.nb(), 0.0);
      for (std::size_t c = 0; c < support.size(); ++c) beta.w[support[c]] = w[c];
      double worst = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < g.na(); ++a) {
        worst = std::max(worst, g.u1_vs_beta(a, beta));
      }
      best = std::min(best, worst);
    }
  }
  return best;
}

// Random monotone-supermodular game with the identity (highest-first)
// orders.  u2 = c*A*B + f(A) + g(B) has strictly increasing differences;
// u1 = -d*A + e*B - h*A*B (e > h*Amax) is strictly decreasing in a,
// strictly increasing in b, with non-increasing differences.  Rejection
// keeps only draws that satisfy Assumption 1 with a non-lowest Stackelberg
// action.
inline repgame::StageGame<double> random_msm_game(std::mt19937_64& rng,
                                                  std::size_t na,
                                                  std::size_t nb) {
  std::uniform_real_distribution<double> unif(0.2, 2.0);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  for (int attempt = 0; attempt < 200; ++attempt) {
    double c = unif(rng), d = unif(rng), h = unif(rng) * 0.5;
    double e = h * static_cast<double>(na - 1) + unif(rng);
    std::vector<double> fa(na), gb(nb);
    for (auto& x : fa) x = noise(rng);
    for (auto& x : gb) x = noise(rng);
    std::vector<double> u1(na * nb), u2(na * nb);
    for (std::size_t i = 0; i < na; ++i) {
      double lvl_a = static_cast<double>(na - 1 - i);  // row 0 is highest
      for (std::size_t j = 0; j < nb; ++j) {
        double lvl_b = static_cast<double>(nb - 1 - j);
        u1[i * nb + j] = -d * lvl_a + e * lvl_b - h * lvl_a * lvl_b;
        u2[i * nb + j] = c * lvl_a * lvl_b + fa[i] + gb[j];
      }
    }
    std::vector<std::string> al, bl;
    for (std::size_t i = 0; i < na; ++i) al.push_back("a" + std::to_string(i));
    for (std::size_t j = 0; j < nb; ++j) bl.push_back("b" + std::to_string(j));
    repgame::StageGame<double> g(al, bl, std::move(u1), std::move(u2));
    std::vector<std::size_t> oa(na), ob(nb);
    for (std::size_t i = 0; i < na; ++i) oa[i] = i;
    for (std::size_t j = 0; j < nb; ++j) ob[j] = j;
    g.set_order_p1(oa);
    g.set_order_p2(ob);
    if (!g.satisfies_assumption1()) continue;
    auto st = g.stackelberg();
    if (st.a_star == na - 1) continue;  // lowest action
    return g;
  }
  throw std::runtime_error("random_msm_game: rejection cap hit");
}

// Exhaustive check that (i, j) is a pure Nash equilibrium.
inline bool is_pure_nash(const repgame::StageGame<double>& g, std::size_t i,
                         std::size_t j) {
  for (std::size_t a = 0; a < g.na(); ++a) {
    if (g.u1(a, j) > g.u1(i, j) + 1e-12) return false;
  }
  for (std::size_t b = 0; b < g.nb(); ++b) {
    if (g.u2(i, b) > g.u2(i, j) + 1e-12) return false;
  }
  return true;
}

}  // namespace oracles
