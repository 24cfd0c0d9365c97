// Finite two-player stage games: payoffs, best replies, pure equilibria,
// Stackelberg objects, and the Assumption 1/2 checks everything else
// builds on.
//
// Player 1 is the long-run player (rows), player 2 the short-run player
// (columns).  Optional complete orders on the action sets are stored
// highest-first; they are only consulted by the monotone-supermodularity
// classifier.
#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "repgame/errors.hpp"
#include "repgame/mixed.hpp"
#include "repgame/rational.hpp"

namespace repgame {

inline constexpr double kBestReplyTol = 1e-10;

template <class Scalar>
class StageGame {
 public:
  StageGame(std::vector<std::string> actions_p1,
            std::vector<std::string> actions_p2, std::vector<Scalar> u1,
            std::vector<Scalar> u2)
      : a_labels_(std::move(actions_p1)),
        b_labels_(std::move(actions_p2)),
        u1_(std::move(u1)),
        u2_(std::move(u2)) {
    if (a_labels_.size() < 2 || b_labels_.size() < 2) {
      throw ValidationError("stage game needs at least two actions per side");
    }
    if (u1_.size() != a_labels_.size() * b_labels_.size() ||
        u2_.size() != u1_.size()) {
      throw ValidationError("payoff matrix size mismatch");
    }
  }

  std::size_t na() const { return a_labels_.size(); }
  std::size_t nb() const { return b_labels_.size(); }
  const std::vector<std::string>& a_labels() const { return a_labels_; }
  const std::vector<std::string>& b_labels() const { return b_labels_; }
  const std::string& a_label(std::size_t i) const { return a_labels_[i]; }
  const std::string& b_label(std::size_t j) const { return b_labels_[j]; }

  std::optional<std::size_t> a_index(const std::string& label) const {
    return find_label(a_labels_, label);
  }
  std::optional<std::size_t> b_index(const std::string& label) const {
    return find_label(b_labels_, label);
  }

  const Scalar& u1(std::size_t i, std::size_t j) const {
    return u1_[i * nb() + j];
  }
  const Scalar& u2(std::size_t i, std::size_t j) const {
    return u2_[i * nb() + j];
  }

  // Orders are permutations of the action indices, best element first.
  void set_order_p1(std::vector<std::size_t> order) {
    check_permutation(order, na());
    order_p1_ = std::move(order);
  }
  void set_order_p2(std::vector<std::size_t> order) {
    check_permutation(order, nb());
    order_p2_ = std::move(order);
  }
  const std::optional<std::vector<std::size_t>>& order_p1() const {
    return order_p1_;
  }
  const std::optional<std::vector<std::size_t>>& order_p2() const {
    return order_p2_;
  }

  Scalar u1_mixed(const MixedAction<Scalar>& alpha,
                  const MixedAction<Scalar>& beta) const {
    Scalar v(0);
    for (std::size_t i = 0; i < na(); ++i) {
      if (alpha[i] == Scalar(0)) continue;
      for (std::size_t j = 0; j < nb(); ++j) {
        v += alpha[i] * beta[j] * u1(i, j);
      }
    }
    return v;
  }

  Scalar u2_mixed(const MixedAction<Scalar>& alpha,
                  const MixedAction<Scalar>& beta) const {
    Scalar v(0);
    for (std::size_t i = 0; i < na(); ++i) {
      if (alpha[i] == Scalar(0)) continue;
      for (std::size_t j = 0; j < nb(); ++j) {
        v += alpha[i] * beta[j] * u2(i, j);
      }
    }
    return v;
  }

  Scalar u1_vs_beta(std::size_t i, const MixedAction<Scalar>& beta) const {
    Scalar v(0);
    for (std::size_t j = 0; j < nb(); ++j) v += beta[j] * u1(i, j);
    return v;
  }

  Scalar u2_vs_alpha(const MixedAction<Scalar>& alpha, std::size_t j) const {
    Scalar v(0);
    for (std::size_t i = 0; i < na(); ++i) v += alpha[i] * u2(i, j);
    return v;
  }

  // All of player 2's best replies against a mixed action, ties included.
  std::vector<std::size_t> best_reply_p2(const MixedAction<Scalar>& alpha,
                                         double tol = kBestReplyTol) const {
    std::vector<Scalar> vals(nb());
    for (std::size_t j = 0; j < nb(); ++j) vals[j] = u2_vs_alpha(alpha, j);
    return argmax_set(vals, tol);
  }

  std::vector<std::size_t> best_reply_p1(const MixedAction<Scalar>& beta,
                                         double tol = kBestReplyTol) const {
    std::vector<Scalar> vals(na());
    for (std::size_t i = 0; i < na(); ++i) vals[i] = u1_vs_beta(i, beta);
    return argmax_set(vals, tol);
  }

  std::vector<std::size_t> best_reply_p2_pure(std::size_t i,
                                              double tol = kBestReplyTol) const {
    return best_reply_p2(MixedAction<Scalar>::pure(i, na()), tol);
  }
  std::vector<std::size_t> best_reply_p1_pure(std::size_t j,
                                              double tol = kBestReplyTol) const {
    return best_reply_p1(MixedAction<Scalar>::pure(j, nb()), tol);
  }

  bool satisfies_assumption1(double tol = kBestReplyTol) const {
    for (std::size_t j = 0; j < nb(); ++j) {
      if (best_reply_p1_pure(j, tol).size() != 1) return false;
    }
    for (std::size_t i = 0; i < na(); ++i) {
      if (best_reply_p2_pure(i, tol).size() != 1) return false;
    }
    return stackelberg_candidates(tol).size() == 1;
  }

  bool satisfies_assumption2(double tol = kBestReplyTol) const {
    return !pure_nash(tol).empty();
  }

  std::vector<std::pair<std::size_t, std::size_t>> pure_nash(
      double tol = kBestReplyTol) const {
    std::vector<std::pair<std::size_t, std::size_t>> eq;
    for (std::size_t i = 0; i < na(); ++i) {
      for (std::size_t j = 0; j < nb(); ++j) {
        auto br2 = best_reply_p2_pure(i, tol);
        auto br1 = best_reply_p1_pure(j, tol);
        bool p2_ok = std::find(br2.begin(), br2.end(), j) != br2.end();
        bool p1_ok = std::find(br1.begin(), br1.end(), i) != br1.end();
        if (p1_ok && p2_ok) eq.emplace_back(i, j);
      }
    }
    return eq;
  }

  struct Stackelberg {
    std::size_t a_star;
    std::size_t b_star;
    Scalar payoff;
  };

  // Pure Stackelberg action under Assumption 1.  Throws AssumptionViolation
  // when any best-reply set fails to be a singleton or the argmax is tied.
  Stackelberg stackelberg(double tol = kBestReplyTol) const {
    for (std::size_t i = 0; i < na(); ++i) {
      if (best_reply_p2_pure(i, tol).size() != 1) {
        throw AssumptionViolation("BR2(" + a_labels_[i] +
                                  ") is not a singleton");
      }
    }
    for (std::size_t j = 0; j < nb(); ++j) {
      if (best_reply_p1_pure(j, tol).size() != 1) {
        throw AssumptionViolation("BR1(" + b_labels_[j] +
                                  ") is not a singleton");
      }
    }
    auto cands = stackelberg_candidates(tol);
    if (cands.size() != 1) {
      throw AssumptionViolation("Stackelberg action is not unique");
    }
    std::size_t a = cands.front();
    std::size_t b = best_reply_p2_pure(a, tol).front();
    return {a, b, u1(a, b)};
  }

  struct PureProfile {
    std::size_t a;
    std::size_t b;
    Scalar payoff;  // for the player the profile was selected for
  };

  PureProfile worst_pure_ne_p1(double tol = kBestReplyTol) const {
    auto eq = pure_nash(tol);
    if (eq.empty()) throw NoPureNE("stage game has no pure Nash equilibrium");
    auto best = eq.front();
    for (const auto& e : eq) {
      if (u1(e.first, e.second) < u1(best.first, best.second)) best = e;
    }
    return {best.first, best.second, u1(best.first, best.second)};
  }

  PureProfile worst_pure_ne_p2(double tol = kBestReplyTol) const {
    auto eq = pure_nash(tol);
    if (eq.empty()) throw NoPureNE("stage game has no pure Nash equilibrium");
    auto best = eq.front();
    for (const auto& e : eq) {
      if (u2(e.first, e.second) < u2(best.first, best.second)) best = e;
    }
    return {best.first, best.second, u2(best.first, best.second)};
  }

  Scalar max_u1_vs_pure_b(std::size_t j) const {
    Scalar m = u1(0, j);
    for (std::size_t i = 1; i < na(); ++i) m = std::max(m, u1(i, j));
    return m;
  }

  Scalar min_u1() const {
    Scalar m = u1_[0];
    for (const auto& v : u1_) m = std::min(m, v);
    return m;
  }
  Scalar max_u1() const {
    Scalar m = u1_[0];
    for (const auto& v : u1_) m = std::max(m, v);
    return m;
  }

  StageGame<double> to_double_game() const {
    std::vector<double> d1, d2;
    d1.reserve(u1_.size());
    d2.reserve(u2_.size());
    for (const auto& v : u1_) d1.push_back(to_double(v));
    for (const auto& v : u2_) d2.push_back(to_double(v));
    StageGame<double> g(a_labels_, b_labels_, std::move(d1), std::move(d2));
    if (order_p1_) g.set_order_p1(*order_p1_);
    if (order_p2_) g.set_order_p2(*order_p2_);
    return g;
  }

 private:
  static std::optional<std::size_t> find_label(
      const std::vector<std::string>& labels, const std::string& label) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == label) return i;
    }
    return std::nullopt;
  }

  static void check_permutation(const std::vector<std::size_t>& order,
                                std::size_t n) {
    if (order.size() != n) throw ValidationError("order length mismatch");
    std::vector<bool> seen(n, false);
    for (auto i : order) {
      if (i >= n || seen[i]) throw ValidationError("order is not a permutation");
      seen[i] = true;
    }
  }

  std::vector<std::size_t> argmax_set(const std::vector<Scalar>& vals,
                                      double tol) const {
    Scalar best = vals[0];
    for (const auto& v : vals) best = std::max(best, v);
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < vals.size(); ++k) {
      if (scalar_geq(vals[k], best, tol)) out.push_back(k);
    }
    return out;
  }

  // argmax_a u1(a, BR2(a)) with the min-over-ties convention; a tie in the
  // outer argmax is what Assumption 1 rules out.
  std::vector<std::size_t> stackelberg_candidates(double tol) const {
    std::vector<Scalar> vals(na());
    for (std::size_t i = 0; i < na(); ++i) {
      auto br = best_reply_p2_pure(i, tol);
      Scalar worst = u1(i, br.front());
      for (auto j : br) worst = std::min(worst, u1(i, j));
      vals[i] = worst;
    }
    return argmax_set(vals, tol);
  }

  std::vector<std::string> a_labels_;
  std::vector<std::string> b_labels_;
  std::vector<Scalar> u1_;
  std::vector<Scalar> u2_;
  std::optional<std::vector<std::size_t>> order_p1_;
  std::optional<std::vector<std::size_t>> order_p2_;
};

}  // namespace repgame
