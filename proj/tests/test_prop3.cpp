#include <doctest.h>

#include <cmath>
#include <repgame/prop3.hpp>
#include <repgame/simulate.hpp>
#include <repgame/verify.hpp>

#include "games.hpp"

using namespace repgame;

namespace {
Rational rat(long long n, long long d) { return Rational(n) / Rational(d); }
}  // namespace

TEST_CASE("asymptotic bound RHS") {
  auto g = testgames::product_choice<Rational>();
  CHECK(prop3_bound(g, 1) == rat(1, 2));          // (2 - 1) / 2
  CHECK(prop3_bound(g, 3) == rat(5, 4));          // (3*2 - 1) / 4
  // K -> infinity: bound approaches the Stackelberg payoff
  CHECK(to_double(prop3_bound(g, 4000)) == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("responsiveness constant Delta") {
  auto g = testgames::product_choice<Rational>();
  Rational d = prop3_delta_bound(g, rat(9, 10), 1);
  CHECK(d == rat(1, 72));  // 0.1 / (2 * 0.9 * 4), min payoff gap 1
  CHECK(to_double(d) == doctest::Approx(0.0138889).epsilon(1e-5));
  // delta to 1 kills Delta ((1-delta)/delta scaling); doubling K halves it
  CHECK(prop3_delta_bound(g, rat(999, 1000), 1) == rat(1, 7992));
  CHECK(prop3_delta_bound(g, rat(9, 10), 2) == d / 2);
}

TEST_CASE("cyclic automaton") {
  auto g = testgames::product_choice<Rational>();

  SUBCASE("time-average under always-a* hits the bound") {
    for (int K : {1, 2, 3}) {
      auto b = build_prop3_tight(g, K, rat(9, 10), rat(1, 20));
      double avg = prop3_always_star_average(b.fsm, 10000);
      double bound = to_double(b.bound);
      CHECK(std::abs(avg - bound) <= 0.02);
      // the deviation path is deterministic on the clean cycle, so the
      // average is exact up to the horizon remainder
      CHECK(std::abs(avg - bound) <= 2.0 * 4.0 * (K + 1) / 10000.0);
      CHECK(avg >= bound - 0.02);  // the lower-bound inequality itself
    }
  }
  SUBCASE("incentives hold on the cycle and along the deviation tree") {
    // The flagged-cycle work states (reached after a forgiven deviation or a
    // responder slip at a rest period) are the one place the stated off-path
    // rules leave a work-period deviation unpunished; the checker surfaces
    // that (1-delta)-scale gain and everything else is exact.
    for (int K : {1, 2, 3}) {
      auto b = build_prop3_tight(g, K, rat(9, 10), rat(1, 20));
      auto report = one_shot_deviation_check(b.fsm);
      CHECK(report.bellman_residual <= 1e-9);
      double worst_clean = 0.0, worst_flagged = 0.0;
      for (const auto& e : report.entries) {
        bool flagged_work =
            (e.state.rfind("flagged_cycle_", 0) == 0 && e.state.back() != '0') ||
            (e.state.rfind("lottery_", 0) == 0 && e.branch == "forgive");
        (flagged_work ? worst_flagged : worst_clean) =
            std::max(flagged_work ? worst_flagged : worst_clean, e.gain);
      }
      CHECK(worst_clean <= 1e-9);
      CHECK(worst_flagged == doctest::Approx(0.1).epsilon(1e-9));
    }
  }
  SUBCASE("cycle value matches the closed form") {
    auto b = build_prop3_tight(g, 1, rat(9, 10), rat(1, 20));
    // V = (0 + 0.9 * 2) / (1 + 0.9) discounted-average form
    double v = 0.1 * (0.0 + 0.9 * 2.0) / (1.0 - 0.81);
    CHECK(b.fsm.closed_form_p1_value == doctest::Approx(v).epsilon(1e-12));
    CHECK(to_double(b.cycle_value) == doctest::Approx(v).epsilon(1e-12));
  }
  SUBCASE("minimal feasible delta from the bullet inequalities") {
    double dmin = prop3_min_delta(g, 1);
    CHECK(dmin < 0.9);
    CHECK(to_double(prop3_ic_slack(g.to_double_game(), dmin + 1e-4, 1)) >= 0.0);
    CHECK(to_double(prop3_ic_slack(g.to_double_game(), dmin - 1e-3, 1)) < 0.0);
    // construction rejects a discount factor below the cutoff
    CHECK_THROWS_AS(
        (void)build_prop3_tight(g, 1, Rational(1) / Rational(100), rat(1, 20)),
        PreconditionFail);
  }
  SUBCASE("prior at or above the responder threshold is rejected") {
    CHECK_THROWS_AS((void)build_prop3_tight(g, 1, rat(9, 10), rat(3, 5)),
                    PreconditionFail);
  }
  SUBCASE("responder deviation at a rest period triggers the lottery") {
    auto b = build_prop3_tight(g, 1, rat(9, 10), rat(1, 20));
    // find cycle_0, inject b* against the strategic a': expect post_1
    int s0 = b.fsm.initial;
    const auto& br = b.fsm.states[s0].branches[0];
    int after = br.next[1][0];  // a = L (strategic on-path), b = T (= b*)
    CHECK(b.fsm.states[after].name == "post_1");
    int after_star = br.next[0][0];  // a = a*, b = b*
    CHECK(b.fsm.states[after_star].name == "lottery_1");
    // the lottery forgives with probability exactly 1/2
    const auto& lot = b.fsm.states[after_star];
    REQUIRE(lot.branches.size() == 2);
    CHECK(lot.branches[0].prob == 0.5);
  }
  SUBCASE("revealed deviation at a work period flips the cycle once") {
    auto b = build_prop3_tight(g, 1, rat(9, 10), rat(1, 20));
    const auto& cycle1 = b.fsm.states[1];  // work period
    REQUIRE(cycle1.name == "cycle_1");
    int after_dev = cycle1.branches[0].next[1][0];  // a = L revealed, b = b*
    CHECK(b.fsm.states[after_dev].name == "inverted_0");
    // inverted at a rest period plays (a*, b*)
    const auto& inv = b.fsm.states[after_dev];
    CHECK(inv.branches[0].p1_strategic[0] == 1.0);
    CHECK(inv.branches[0].p2[0] == 1.0);
  }
}
