#include <doctest.h>

#include <cmath>
#include <repgame/detectors.hpp>
#include <repgame/learning.hpp>
#include <repgame/simulate.hpp>
#include <repgame/theorem1.hpp>
#include <repgame/verify.hpp>

#include "games.hpp"

using namespace repgame;

namespace {
Rational rat(long long n, long long d) { return Rational(n) / Rational(d); }
}  // namespace

TEST_CASE("transition rate r") {
  auto g = testgames::product_choice<Rational>();
  CHECK(solve_r(g, rat(9, 10)) == rat(1, 18));
  CHECK(solve_r(g, rat(99, 100)) == rat(1, 198));
  CHECK(solve_r(g, rat(999, 1000)) == rat(1, 1998));
  // boundary: r = 1 exactly at delta = 1/3, rejected at or below
  CHECK_THROWS_AS((void)solve_r(g, rat(1, 3)), DeltaTooLow);
  CHECK_THROWS_AS((void)solve_r(g, rat(1, 5)), DeltaTooLow);
}

TEST_CASE("theorem-1 automaton: value, incentives, preconditions") {
  auto g = testgames::product_choice<Rational>();

  SUBCASE("closed-form value is the worst-NE payoff, exactly") {
    auto b = build_theorem1(g, rat(9, 10), rat(1, 20), 1);
    CHECK(b.value == Rational(0));
    CHECK(b.r == rat(1, 18));
    CHECK(b.q_mix == rat(1, 4));
    CHECK(b.fsm.closed_form_p1_value == 0.0);
  }
  SUBCASE("one-shot deviations vanish on the delta and K grid") {
    for (Rational delta : {rat(2, 5), rat(7, 10), rat(9, 10), rat(99, 100)}) {
      for (int K : {1, 3}) {
        auto b = build_theorem1(g, delta, rat(1, 20), K);
        auto report = one_shot_deviation_check(b.fsm);
        CHECK(report.max_violation() <= 1e-9);
        CHECK(report.bellman_residual <= 1e-12);
        CHECK(b.value == Rational(0));
      }
    }
  }
  SUBCASE("building-phase indifference is exact, a' beats other actions") {
    auto b = build_theorem1(g, rat(9, 10), rat(1, 20), 1);
    auto report = one_shot_deviation_check(b.fsm);
    for (const auto& e : report.entries) {
      if (e.player != 1 || e.state != "building") continue;
      // both H and L attain the prescribed value exactly
      CHECK(std::abs(e.gain) <= 1e-12);
    }
  }
  SUBCASE("prior above the bound fails with the bound named") {
    try {
      (void)build_theorem1(g, rat(9, 10), rat(1, 5), 1);
      FAIL("expected PreconditionFail");
    } catch (const PreconditionFail& e) {
      CHECK(e.bound == "pi0_bar");
      CHECK(std::string(e.what()).find("0.1") != std::string::npos);
    }
  }
  SUBCASE("b' = b* collapses to the pooling automaton") {
    auto dom = testgames::dominant_pair<Rational>();
    auto b = build_theorem1(dom, rat(9, 10), rat(1, 20), 1);
    CHECK(b.pooling);
    CHECK(b.value == Rational(5));
    CHECK(one_shot_deviation_check(b.fsm).max_violation() <= 1e-12);
  }
  SUBCASE("below the cutoff the maintenance incentive visibly breaks") {
    // Assemble the shape directly with the transition gate clamped to 1 (the
    // indifference equation has no interior solution at delta = 0.2).
    detail::ThreePhaseSpec sp;
    sp.kind = "theorem1";
    sp.a_low = 1;
    sp.b_low = 1;
    sp.r = 1.0;
    sp.q_mix = 0.25;
    sp.policy = MixPolicy::Fixed;
    sp.pi_cap = 0.25;
    sp.q_star = 0.5;
    auto fsm = detail::assemble_three_phase(g, rat(1, 5), rat(1, 20), 1,
                                            std::size_t(0), std::size_t(0), sp);
    auto report = one_shot_deviation_check(fsm);
    double worst_maintenance = 0.0;
    for (const auto& e : report.entries) {
      if (e.player == 1 && e.state == "maintenance") {
        worst_maintenance = std::max(worst_maintenance, e.gain);
      }
    }
    CHECK(worst_maintenance > 0.0);
  }
}

TEST_CASE("Monte Carlo value agrees with the closed form") {
  auto g = testgames::product_choice<Rational>();
  auto b = build_theorem1(g, rat(9, 10), rat(1, 20), 1);
  auto mc = mc_value(b.fsm, 0.9, 0.05, 10000, 2024u);
  CHECK(std::abs(mc.p1_mean - 0.0) <= 3.0 * mc.p1_se);

  SUBCASE("static equilibrium automaton has the exact value, zero variance") {
    auto stat = build_static_pair(g, rat(9, 10), rat(1, 20), 1, 1, 0, 0, 0.0,
                                  Phase::Punishment);
    auto mc2 = mc_value(stat, 0.9, 0.05, 200, 7u);
    CHECK(mc2.p1_mean == 0.0);
    CHECK(mc2.p1_se == 0.0);
    CHECK(one_shot_deviation_check(stat).max_violation() <= 1e-12);
  }
}

TEST_CASE("belief bound along simulated building paths") {
  // pi_t <= q*/2 = 0.25 with zero violations over 10^4 paths.
  auto g = testgames::product_choice<Rational>();
  auto b = build_theorem1(g, rat(9, 10), rat(1, 20), 1);
  SeedSplitter seeds(17u);
  SimOptions opt;
  opt.horizon = 500;
  int violations = 0;
  for (int r = 0; r < 10000; ++r) {
    auto rng = std::mt19937_64(seeds.stream(r));
    bool commit = uniform01(rng) < 0.05;
    auto tr = simulate_run(b.fsm, commit, rng(), opt);
    if (tr.max_pi_building > 0.25 + 1e-12) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("welfare calibration") {
  auto g = testgames::product_choice<Rational>();
  SUBCASE("closed form V2 = 0.2 at delta = delta_s = 0.9, q* = 1/2") {
    CHECK(welfare_V2(g, rat(9, 10), rat(9, 10), rat(1, 2)) == rat(1, 5));
  }
  SUBCASE("V2 tends to u2(a'', b'') as q* vanishes") {
    double v = to_double(welfare_V2(g, rat(9, 10), rat(9, 10), rat(1, 100000)));
    CHECK(v == doctest::Approx(0.0).epsilon(1e-3));
  }
  SUBCASE("constant u2 gives V2 equal to that constant") {
    StageGame<Rational> flat({"a0", "a1"}, {"b0", "b1"},
                             {Rational(2), Rational(0), Rational(3), Rational(1)},
                             {Rational(4), Rational(4), Rational(4), Rational(4)});
    // u2 constant: every profile is a best reply; worst NE for p2 exists
    CHECK(welfare_V2(flat, rat(9, 10), rat(1, 2), rat(1, 4)) == Rational(4));
  }
  SUBCASE("Monte Carlo welfare matches: 0.2 within 3 s.e.") {
    auto b = build_welfare_calibrated(g, rat(9, 10), rat(1, 20), 1, rat(1, 2));
    auto mc = mc_value(b.fsm, 0.9, 0.05, 10000, 31u);
    CHECK(std::abs(mc.p2_mean - 0.2) <= 3.0 * mc.p2_se);
    CHECK(one_shot_deviation_check(b.fsm).max_violation() <= 1e-9);
  }
}

TEST_CASE("prediction-error series") {
  auto g = testgames::product_choice<Rational>();
  auto b = build_theorem1(g, rat(9, 10), rat(1, 20), 1);

  SUBCASE("building-phase per-period value") {
    CHECK(std::abs(b.fsm.building_kl - std::log(1.0 + 0.5 * 0.1)) <= 1e-12);
    CHECK(b.fsm.building_kl == doctest::Approx(0.0487902).epsilon(1e-5));
  }
  SUBCASE("cumulative error respects the entropy budget") {
    auto series = prediction_error_series(b.fsm, 0.05, 10000);
    CHECK(series.cumulative.back() <= -std::log(0.05));
    CHECK(series.within_budget);
    // budget respected for every prior in the suite
    for (double pi0 : {0.2, 0.05, 0.01}) {
      auto s = prediction_error_series(b.fsm, pi0, 10000);
      CHECK(s.cumulative.back() <= -std::log(pi0));
    }
  }
  SUBCASE("per-period error is Theta(1 - delta)") {
    for (Rational delta : {rat(9, 10), rat(99, 100), rat(999, 1000)}) {
      auto bb = build_theorem1(g, delta, rat(1, 20), 1);
      double ratio = bb.fsm.building_kl / (1.0 - to_double(delta));
      CHECK(ratio >= 0.4);
      CHECK(ratio <= 0.6);
    }
  }
  SUBCASE("maintenance contributes zero") {
    SimOptions opt;
    opt.horizon = 2000;
    opt.keep_records = true;
    opt.force_star = true;
    auto tr = simulate_run(b.fsm, false, 5u, opt);
    for (const auto& rec : tr.records) {
      if (rec.phase == Phase::Maintenance) CHECK(rec.kl == 0.0);
    }
  }
}

TEST_CASE("herding detector") {
  auto g = testgames::product_choice<Rational>();
  SUBCASE("three-phase construction never herds off b*") {
    auto b = build_theorem1(g, rat(9, 10), rat(1, 20), 1);
    CHECK(detect_herding(b.fsm, 200).empty());
  }
  SUBCASE("hand-built herd on b' with positive belief is caught") {
    auto stat = build_static_pair(g, rat(9, 10), rat(1, 20), 1, 1, 0, 0, 0.2,
                                  Phase::Building);
    auto certs = detect_herding(stat, 200);
    REQUIRE(certs.size() == 1);
    CHECK(certs[0].action == 1);
  }
  SUBCASE("zero-belief punishment states are exempt") {
    auto stat = build_static_pair(g, rat(9, 10), rat(1, 20), 1, 1, 0, 0, 0.0,
                                  Phase::Punishment);
    CHECK(detect_herding(stat, 200).empty());
  }
}

TEST_CASE("informativeness dichotomy") {
  auto g = testgames::product_choice<Rational>();
  auto b = build_theorem1(g, rat(9, 10), rat(1, 20), 1);
  SUBCASE("building phase: next action reacts to a_t") {
    auto res = informativeness_check(b.fsm, 0, 1);
    CHECK(res.informative);
    // b_{t+1} = b* with probability r after a*, probability 0 after a'
    CHECK(res.max_tv == doctest::Approx(1.0 / 18.0).epsilon(1e-9));
  }
  SUBCASE("maintenance after a*: the b*-guarantee branch holds") {
    auto res = informativeness_check(b.fsm, 2, 1);
    CHECK(res.bstar_guarantee);
    CHECK(res.holds());
  }
}

TEST_CASE("traces are reproducible and internally consistent") {
  auto g = testgames::product_choice<Rational>();
  auto b = build_theorem1(g, rat(9, 10), rat(1, 20), 1);
  SimOptions opt;
  opt.keep_records = true;
  auto t1 = simulate_run(b.fsm, false, 99u, opt);
  auto t2 = simulate_run(b.fsm, false, 99u, opt);
  REQUIRE(t1.records.size() == t2.records.size());
  for (std::size_t i = 0; i < t1.records.size(); ++i) {
    CHECK(t1.records[i].a == t2.records[i].a);
    CHECK(t1.records[i].b == t2.records[i].b);
    CHECK(t1.records[i].xi == t2.records[i].xi);
    CHECK(t1.records[i].pi == t2.records[i].pi);
  }
  // discounted sums recomputed from the records
  double u1 = 0.0, pow1 = 1.0;
  for (const auto& rec : t1.records) {
    u1 += 0.1 * pow1 * rec.u1;
    pow1 *= 0.9;
  }
  CHECK(std::abs(u1 - t1.disc_u1) <= 1e-9);
}
