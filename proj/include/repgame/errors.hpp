// Exception taxonomy shared by all modules.
#pragma once

#include <stdexcept>
#include <string>

namespace repgame {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A documented model assumption (Assumption 1/2) fails for the given game.
struct AssumptionViolation : Error {
  using Error::Error;
};

// No pure-strategy Nash equilibrium exists.
struct NoPureNE : Error {
  using Error::Error;
};

// An indifference equation has no interior solution (e.g. responder payoffs
// do not depend on the other side's action).
struct Degenerate : Error {
  using Error::Error;
};

// Discount factor below the construction's cutoff.
struct DeltaTooLow : Error {
  using Error::Error;
};

// A named parameter bound required by a construction is violated.  The bound
// is kept separately so CLI output can surface it verbatim.
struct PreconditionFail : Error {
  std::string bound;
  PreconditionFail(std::string bound_, const std::string& what)
      : Error(what), bound(std::move(bound_)) {}
};

struct Condition3Missing : Error {
  using Error::Error;
};

// Both type-conditional likelihoods vanish: off-path for every type.
struct BothZero : Error {
  using Error::Error;
};

struct InconsistentHistory : Error {
  using Error::Error;
};

// Exact chi-history enumeration request beyond the supported horizon.
struct CapExceeded : Error {
  using Error::Error;
};

// A declared sampler contract (sample size cap) was broken at runtime.
struct SpecViolation : Error {
  using Error::Error;
};

struct ComplexRoots : Error {
  using Error::Error;
};

struct OutOfRange : Error {
  using Error::Error;
};

struct InfeasibleBelief : Error {
  using Error::Error;
};

// Belief-based linear system has no solution; carries the offending row.
struct Infeasible : Error {
  int row = -1;
  Infeasible(const std::string& what, int row_) : Error(what), row(row_) {}
};

// Belief-based solution exists but exits the [eta q*, 1 - eta q*] box.
struct BoxViolated : Error {
  using Error::Error;
};

struct UnboundedSignal : Error {
  using Error::Error;
};

struct InfeasiblePi : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

// Automaton continuation values fail to solve or are non-finite.
struct NonFiniteValue : Error {
  using Error::Error;
};

struct ValidationError : Error {
  using Error::Error;
};

struct ParseError : Error {
  int line = 0;
  int column = 0;
  ParseError(const std::string& what, int line_, int column_)
      : Error(what + " (line " + std::to_string(line_) + ", column " +
              std::to_string(column_) + ")"),
        line(line_),
        column(column_) {}
};

}  // namespace repgame
