// Mixed actions over a finite action set, templated on the scalar type.
#pragma once

#include <cstddef>
#include <vector>

#include "repgame/errors.hpp"
#include "repgame/rational.hpp"

namespace repgame {

template <class Scalar>
struct MixedAction {
  std::vector<Scalar> w;  // indexed like the owning action list

  MixedAction() = default;
  explicit MixedAction(std::vector<Scalar> weights) : w(std::move(weights)) {}

  static MixedAction pure(std::size_t i, std::size_t n) {
    MixedAction m;
    m.w.assign(n, Scalar(0));
    m.w.at(i) = Scalar(1);
    return m;
  }

  static MixedAction uniform(std::size_t n) {
    MixedAction m;
    m.w.assign(n, Scalar(1) / Scalar(static_cast<long long>(n)));
    return m;
  }

  std::size_t size() const { return w.size(); }
  const Scalar& operator[](std::size_t i) const { return w[i]; }
  Scalar& operator[](std::size_t i) { return w[i]; }

  // Weights nonnegative and summing to one (1e-12 on the double path).
  bool valid(double tol = 1e-12) const {
    if (w.empty()) return false;
    Scalar sum(0);
    for (const auto& x : w) {
      if (scalar_gt(Scalar(0), x, tol)) return false;
      sum += x;
    }
    return scalar_eq(sum, Scalar(1), tol);
  }

  void validate(double tol = 1e-12) const {
    if (!valid(tol)) throw ValidationError("mixed action weights invalid");
  }

  std::vector<std::size_t> support(double tol = 1e-12) const {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (scalar_gt(w[i], Scalar(0), tol)) s.push_back(i);
    }
    return s;
  }
};

template <class Scalar>
MixedAction<double> to_double_mix(const MixedAction<Scalar>& m) {
  MixedAction<double> out;
  out.w.reserve(m.w.size());
  for (const auto& x : m.w) out.w.push_back(to_double(x));
  return out;
}

}  // namespace repgame
