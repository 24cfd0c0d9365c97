// Dense bounded-variable primal simplex with Bland's rule.
//
// Used for the belief-based indifference systems: feasibility of
// { A x = b, lo <= x <= hi } via phase-1 artificial minimization.  Bland's
// pivoting (smallest eligible index enters, smallest-index basic leaves on
// ties) makes runs bit-reproducible and cycle-free; problem sizes here are
// a few hundred rows by a few thousand columns, well inside dense range.
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "repgame/errors.hpp"

namespace repgame {

class BoundedSimplex {
 public:
  // minimize c.x  s.t.  A x = b,  lo <= x <= hi  (all bounds finite)
  BoundedSimplex(std::vector<std::vector<double>> a, std::vector<double> b,
                 std::vector<double> c, std::vector<double> lo,
                 std::vector<double> hi)
      : a_(std::move(a)),
        b_(std::move(b)),
        c_(std::move(c)),
        lo_(std::move(lo)),
        hi_(std::move(hi)),
        m_(b_.size()),
        n_(c_.size()) {}

  // Phase-1 feasibility.  `gave_up`, when supplied, reports hitting the
  // iteration cap (callers doing bisection treat that as infeasible and
  // keep the last certified point); without it the cap throws.
  std::optional<std::vector<double>> solve_feasible(double eps = 1e-10,
                                                    long max_iter = 200000,
                                                    bool* gave_up = nullptr) {
    if (gave_up) *gave_up = false;
    // start: structural variables at lower bound, artificials absorb the
    // residual with +-1 columns
    std::vector<double> x(n_);
    for (std::size_t j = 0; j < n_; ++j) x[j] = lo_[j];
    std::vector<double> resid(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < n_; ++j) dot += a_[i][j] * x[j];
      resid[i] = b_[i] - dot;
    }

    // The initial basis holds the artificials, whose columns carry the sign
    // of the starting residual; the stored tableau is B0^{-1} [A | I_art],
    // i.e. each row of A is multiplied by that sign and the artificial
    // block becomes the identity.
    const std::size_t total = n_ + m_;
    std::vector<std::vector<double>> tab(m_, std::vector<double>(total, 0.0));
    std::vector<double> cost(total, 0.0);
    std::vector<double> tlo(total), thi(total);
    std::vector<double> row_sign(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      row_sign[i] = resid[i] >= 0.0 ? 1.0 : -1.0;
    }
    for (std::size_t j = 0; j < n_; ++j) {
      tlo[j] = lo_[j];
      thi[j] = hi_[j];
      for (std::size_t i = 0; i < m_; ++i) tab[i][j] = row_sign[i] * a_[i][j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      std::size_t j = n_ + i;
      tab[i][j] = 1.0;
      cost[j] = 1.0;
      tlo[j] = 0.0;
      thi[j] = std::abs(resid[i]) + 1.0;  // room above the start value
    }

    std::vector<int> basic(m_);
    std::vector<double> xval(total);
    std::vector<char> at_hi(total, 0);
    for (std::size_t j = 0; j < n_; ++j) xval[j] = lo_[j];
    for (std::size_t i = 0; i < m_; ++i) {
      basic[i] = static_cast<int>(n_ + i);
      xval[n_ + i] = std::abs(resid[i]);
    }
    std::vector<char> is_basic(total, 0);
    for (int j : basic) is_basic[j] = 1;

    // rhs_col tracks B^{-1} b through the same row operations as the
    // tableau; basic values are refreshed from it to stop incremental
    // drift, which matters because the problems solved here live at the
    // 1e-5 scale of posterior corrections.
    std::vector<double> rhs_col(m_);
    for (std::size_t i = 0; i < m_; ++i) rhs_col[i] = row_sign[i] * b_[i];
    auto refresh_basics = [&] {
      for (std::size_t i = 0; i < m_; ++i) {
        double v = rhs_col[i];
        for (std::size_t j = 0; j < total; ++j) {
          if (is_basic[j] || xval[j] == 0.0) continue;
          v -= tab[i][j] * xval[j];
        }
        xval[basic[i]] = v;
      }
    };

    // dense tableau iterations: rows are kept as B^{-1} A via pivoting.
    // Entering rule: steepest reduced cost (Dantzig) for speed, falling back
    // to Bland's smallest-index rule while the objective stalls, which
    // guarantees finiteness; both rules are deterministic.
    auto objective = [&] {
      double v = 0.0;
      for (std::size_t j = n_; j < total; ++j) v += xval[j];
      return v;
    };
    long iter = 0;
    int stall = 0;
    double last_obj = objective();
    for (; iter < max_iter; ++iter) {
      bool bland = stall > 40;
      std::vector<double> y(m_);
      for (std::size_t i = 0; i < m_; ++i) y[i] = cost[basic[i]];
      int enter = -1;
      int dir = 0;
      double best_score = eps;
      for (std::size_t j = 0; j < total; ++j) {
        if (is_basic[j]) continue;
        double d = cost[j];
        for (std::size_t i = 0; i < m_; ++i) d -= y[i] * tab[i][j];
        double score = !at_hi[j] ? -d : d;
        if (score <= eps) continue;
        if (bland) {
          enter = static_cast<int>(j);
          dir = at_hi[j] ? -1 : +1;
          break;
        }
        if (score > best_score) {
          best_score = score;
          enter = static_cast<int>(j);
          dir = at_hi[j] ? -1 : +1;
        }
      }
      if (enter < 0) break;  // optimal

      // ratio test: smallest blocking step; Bland tie-break by the smallest
      // basic variable index, bound flip only when strictly unblocked
      const double flip_limit = thi[enter] - tlo[enter];
      double limit = flip_limit;
      int leave_row = -1;
      char leave_to_hi = 0;
      for (std::size_t i = 0; i < m_; ++i) {
        double coef = dir * tab[i][enter];
        if (std::abs(coef) < eps) continue;
        int bj = basic[i];
        double room = coef > 0.0 ? (xval[bj] - tlo[bj]) / coef
                                 : (xval[bj] - thi[bj]) / coef;
        if (room < 0.0) room = 0.0;
        bool better = room < limit - 1e-12;
        bool tie = std::abs(room - limit) <= 1e-12 && leave_row >= 0 &&
                   basic[i] < basic[leave_row];
        if (better || tie) {
          limit = std::min(limit, room);
          leave_row = static_cast<int>(i);
          leave_to_hi = coef < 0.0;
        }
      }

      // apply the step
      for (std::size_t i = 0; i < m_; ++i) {
        xval[basic[i]] -= dir * tab[i][enter] * limit;
      }
      xval[enter] += dir * limit;

      if (leave_row < 0) {
        at_hi[enter] = dir > 0;  // bound flip, basis unchanged
        double obj = objective();
        stall = obj < last_obj - 1e-13 ? 0 : stall + 1;
        last_obj = std::min(last_obj, obj);
        continue;
      }
      int leave = basic[leave_row];
      is_basic[leave] = 0;
      at_hi[leave] = leave_to_hi;
      xval[leave] = leave_to_hi ? thi[leave] : tlo[leave];
      basic[leave_row] = enter;
      is_basic[enter] = 1;

      // pivot
      double piv = tab[leave_row][enter];
      for (std::size_t j = 0; j < total; ++j) tab[leave_row][j] /= piv;
      rhs_col[leave_row] /= piv;
      for (std::size_t i = 0; i < m_; ++i) {
        if (i == static_cast<std::size_t>(leave_row)) continue;
        double f = tab[i][enter];
        if (f == 0.0) continue;
        for (std::size_t j = 0; j < total; ++j) {
          tab[i][j] -= f * tab[leave_row][j];
        }
        rhs_col[i] -= f * rhs_col[leave_row];
      }
      if (iter % 32 == 31) refresh_basics();
      double obj = objective();
      stall = obj < last_obj - 1e-13 ? 0 : stall + 1;
      last_obj = std::min(last_obj, obj);
    }

    if (iter >= max_iter) {
      if (!gave_up) throw Error("simplex iteration cap exceeded");
      *gave_up = true;
      return std::nullopt;
    }
    refresh_basics();
    double art = 0.0;
    for (std::size_t j = n_; j < total; ++j) art += std::abs(xval[j]);
    if (art > 1e-9) return std::nullopt;  // infeasible
    std::vector<double> out(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] = xval[j];
    return out;
  }

 private:
  std::vector<std::vector<double>> a_;
  std::vector<double> b_;
  std::vector<double> c_;
  std::vector<double> lo_, hi_;
  std::size_t m_, n_;
};

}  // namespace repgame
