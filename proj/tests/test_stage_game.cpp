#include <doctest.h>

#include <random>
#include <repgame/classify.hpp>
#include <repgame/derived.hpp>
#include <repgame/minmax.hpp>
#include <repgame/stage_game.hpp>

#include "games.hpp"
#include "oracles.hpp"

using repgame::GameConstants;
using repgame::MixedAction;
using repgame::Rational;
using repgame::StageGame;

TEST_CASE("best replies in the product choice game") {
  auto g = testgames::product_choice<double>();
  auto pure_h = MixedAction<double>::pure(0, 2);
  auto pure_l = MixedAction<double>::pure(1, 2);

  CHECK(g.best_reply_p2(pure_h) == std::vector<std::size_t>{0});  // T
  CHECK(g.best_reply_p2(pure_l) == std::vector<std::size_t>{1});  // N
  auto both = g.best_reply_p2(MixedAction<double>::uniform(2));
  CHECK(both == std::vector<std::size_t>{0, 1});
}

TEST_CASE("best reply sets are nonempty and singletons under A1") {
  std::mt19937_64 rng(11u);
  for (int k = 0; k < 200; ++k) {
    auto g = oracles::random_msm_game(rng, 2 + k % 2, 2 + (k / 2) % 2);
    for (std::size_t i = 0; i < g.na(); ++i) {
      auto br = g.best_reply_p2_pure(i);
      CHECK(!br.empty());
      CHECK(br.size() == 1);
    }
  }
}

TEST_CASE("Stackelberg objects") {
  SUBCASE("product choice") {
    auto g = testgames::product_choice<Rational>();
    auto st = g.stackelberg();
    CHECK(g.a_label(st.a_star) == "H");
    CHECK(g.b_label(st.b_star) == "T");
    CHECK(st.payoff == Rational(2));
  }
  SUBCASE("3x3 minmax example") {
    auto g = testgames::three_by_three<Rational>();
    auto st = g.stackelberg();
    CHECK(g.a_label(st.a_star) == "U");
    CHECK(g.b_label(st.b_star) == "L");
    CHECK(st.payoff == Rational(1));
  }
  SUBCASE("strictly dominant pair") {
    auto g = testgames::dominant_pair<Rational>();
    auto st = g.stackelberg();
    CHECK(st.a_star == 0);
    CHECK(st.b_star == 0);
    CHECK(st.payoff == Rational(5));
  }
  SUBCASE("tied Stackelberg payoff violates Assumption 1") {
    StageGame<double> g({"a0", "a1"}, {"b0", "b1"}, {1, 0, 1, 0},
                        {1, 0, 0, 1});
    CHECK_THROWS_AS((void)g.stackelberg(), repgame::AssumptionViolation);
  }
}

TEST_CASE("worst pure Nash equilibria") {
  SUBCASE("product choice") {
    auto g = testgames::product_choice<Rational>();
    auto ne = g.worst_pure_ne_p1();
    CHECK(g.a_label(ne.a) == "L");
    CHECK(g.b_label(ne.b) == "N");
    CHECK(ne.payoff == Rational(0));
  }
  SUBCASE("3x3") {
    auto g = testgames::three_by_three<Rational>();
    auto ne = g.worst_pure_ne_p1();
    CHECK(g.a_label(ne.a) == "B");
    CHECK(g.b_label(ne.b) == "C");
    CHECK(ne.payoff == Rational(1) / 2);
  }
  SUBCASE("Pareto-ranked coordination picks the low equilibrium") {
    auto g = testgames::coordination<Rational>();
    auto ne = g.worst_pure_ne_p1();
    CHECK(g.a_label(ne.a) == "a_lo");
    CHECK(ne.payoff == Rational(1));
  }
  SUBCASE("no pure NE") {
    // matching pennies
    StageGame<double> g({"a0", "a1"}, {"b0", "b1"}, {1, -1, -1, 1},
                        {-1, 1, 1, -1});
    CHECK_THROWS_AS((void)g.worst_pure_ne_p1(), repgame::NoPureNE);
  }
  SUBCASE("every reported pure NE passes the exhaustive check") {
    std::mt19937_64 rng(7u);
    for (int k = 0; k < 100; ++k) {
      auto g = oracles::random_msm_game(rng, 3, 3);
      for (auto [i, j] : g.pure_nash()) CHECK(oracles::is_pure_nash(g, i, j));
    }
  }
}

TEST_CASE("minmax payoff") {
  SUBCASE("product choice equals 0 exactly") {
    auto g = testgames::product_choice<Rational>();
    auto mm = repgame::minmax_p1(g);
    CHECK(mm.value == Rational(0));
  }
  SUBCASE("3x3 equals 0 exactly with witness avoiding L") {
    auto g = testgames::three_by_three<Rational>();
    auto mm = repgame::minmax_p1(g);
    CHECK(mm.value == Rational(0));
    CHECK(mm.beta.w[0] == Rational(0));  // b* = L excluded
  }
  SUBCASE("dominant pair: minmax is the Stackelberg payoff") {
    auto g = testgames::dominant_pair<Rational>();
    CHECK(repgame::minmax_p1(g).value == Rational(5));
  }
  SUBCASE("matches the grid oracle") {
    auto pcg = testgames::product_choice<double>();
    CHECK(repgame::minmax_p1(pcg).value ==
          doctest::Approx(oracles::grid_minmax_p1(pcg, 2000)).epsilon(1e-3));
    auto g33 = testgames::three_by_three<double>();
    CHECK(repgame::minmax_p1(g33).value ==
          doctest::Approx(oracles::grid_minmax_p1(g33, 300)).epsilon(1e-2));
  }
  SUBCASE("ordering: minmax <= worst NE <= Stackelberg payoff") {
    std::mt19937_64 rng(23u);
    for (int k = 0; k < 100; ++k) {
      auto g = oracles::random_msm_game(rng, 2 + k % 2, 2 + (k / 3) % 2);
      double mm = repgame::minmax_p1(g).value;
      double wne = g.worst_pure_ne_p1().payoff;
      double st = g.stackelberg().payoff;
      CHECK(mm <= wne + 1e-9);
      CHECK(wne <= st + 1e-9);
    }
  }
}

TEST_CASE("indifference thresholds") {
  SUBCASE("product choice: q* = p* = 1/2 with ties T and N") {
    auto g = testgames::product_choice<Rational>();
    auto c = GameConstants<Rational>::compute(g);
    REQUIRE(c.q_star.has_value());
    REQUIRE(c.p_star.has_value());
    CHECK(*c.q_star == Rational(1) / 2);
    CHECK(*c.p_star == Rational(1) / 2);
    CHECK(g.b_label(*c.b_starstar) == "T");
    CHECK(g.b_label(*c.b_dprime) == "N");
    CHECK(g.a_label(c.a_dprime) == "L");
  }
  SUBCASE("player 2 indifferent at q*: expected payoffs tie within 1e-10") {
    std::mt19937_64 rng(5u);
    for (int k = 0; k < 200; ++k) {
      auto g = oracles::random_msm_game(rng, 2 + k % 2, 2 + (k / 2) % 2);
      auto c = GameConstants<double>::compute(g);
      if (!c.q_star) continue;
      MixedAction<double> mix;
      mix.w.assign(g.na(), 0.0);
      mix.w[c.a_star] = *c.q_star;
      mix.w[c.a_prime] += 1.0 - *c.q_star;
      double v_low = g.u2_vs_alpha(mix, c.b_prime);
      double v_tie = g.u2_vs_alpha(mix, *c.b_starstar);
      CHECK(std::abs(v_low - v_tie) <= 1e-10);
      auto br = g.best_reply_p2(mix);
      CHECK(std::find(br.begin(), br.end(), c.b_prime) != br.end());
    }
  }
  SUBCASE("u2 independent of a is degenerate") {
    auto g = testgames::p2_indifferent<Rational>();
    CHECK_THROWS_AS((void)repgame::indifference_threshold<Rational>(g, 0, 1, 0),
                    repgame::Degenerate);
  }
}

TEST_CASE("discount cutoffs and prior bound") {
  SUBCASE("product choice: both cutoffs are 1/3 exactly") {
    auto g = testgames::product_choice<Rational>();
    auto c = GameConstants<Rational>::compute(g);
    CHECK(c.delta_low == Rational(1) / 3);
    CHECK(c.delta_low_prime == Rational(1) / 3);
  }
  SUBCASE("worst NE at the Stackelberg payoff gives cutoff 0") {
    auto g = testgames::dominant_pair<Rational>();
    auto c = GameConstants<Rational>::compute(g);
    CHECK(c.delta_low == Rational(0));
  }
  SUBCASE("pi0_bar closed form") {
    CHECK(repgame::pi0_bar<Rational>(Rational(1) / 2, 1) == Rational(1) / 10);
    CHECK(repgame::pi0_bar<Rational>(Rational(1) / 2, 2) == Rational(1) / 28);
    // q* -> 1: odds -> 1, bound -> 1/2
    CHECK(repgame::pi0_bar<double>(1.0 - 1e-10, 1) ==
          doctest::Approx(0.5).epsilon(1e-8));
  }
}

TEST_CASE("classification") {
  SUBCASE("product choice is MSM and strict lack-of-commitment") {
    auto g = testgames::product_choice<Rational>();
    auto cls = repgame::classify(g);
    CHECK(cls.satisfies_a1);
    CHECK(cls.satisfies_a2);
    CHECK(cls.strict_benefit);
    CHECK(cls.monotone_supermodular);
    CHECK(cls.strict_lack_of_commitment);
    CHECK(!cls.generalized_coordination);
  }
  SUBCASE("2x3 signal game is MSM under the stated orders") {
    auto g = testgames::two_by_three_signal<Rational>();
    auto cls = repgame::classify(g);
    CHECK(cls.monotone_supermodular);
  }
  SUBCASE("coordination game is generalized coordination") {
    auto g = testgames::coordination<Rational>();
    auto cls = repgame::classify(g);
    CHECK(cls.generalized_coordination);
    CHECK(!cls.strict_lack_of_commitment);
  }
  SUBCASE("MSM implies strict lack-of-commitment on 1000 random games") {
    std::mt19937_64 rng(31u);
    for (int k = 0; k < 1000; ++k) {
      auto g = oracles::random_msm_game(rng, 2 + k % 2, 2 + (k / 2) % 2);
      auto cls = repgame::classify(g);
      REQUIRE(cls.monotone_supermodular);
      CHECK(cls.strict_lack_of_commitment);
      CHECK(!cls.generalized_coordination);
    }
  }
  SUBCASE("MSM implies minmax equals worst-NE payoff (1e-6)") {
    std::mt19937_64 rng(37u);
    for (int k = 0; k < 300; ++k) {
      auto g = oracles::random_msm_game(rng, 2 + k % 2, 2 + (k / 2) % 2);
      auto c = GameConstants<double>::compute(g);
      CHECK(std::abs(c.v1_minmax - c.v1_low) <= 1e-6);
      CHECK(c.v1_minmax < c.stackelberg_payoff);
    }
  }
}

TEST_CASE("Condition 3 witnesses") {
  SUBCASE("3x3: witness beta = R, alpha weight on U equals 1/2") {
    auto g = testgames::three_by_three<Rational>();
    auto cls = repgame::classify(g);
    REQUIRE(cls.condition3);
    const auto& w = *cls.c3_witness;
    CHECK(w.q_weight == Rational(1) / 2);
    CHECK(w.beta.w[2] == Rational(1));  // pure R
    // beta best replies against alpha
    MixedAction<Rational> alpha = w.alpha;
    auto br = g.best_reply_p2(alpha);
    for (auto j : w.beta.support()) {
      CHECK(std::find(br.begin(), br.end(), j) != br.end());
    }
    // u1(alpha, beta) >= u1(a*, beta)
    CHECK(g.u1_mixed(alpha, w.beta) >= g.u1_vs_beta(0, w.beta));
  }
  SUBCASE("product choice satisfies Condition 3 with weight 1/2") {
    auto cls = repgame::classify(testgames::product_choice<Rational>());
    REQUIRE(cls.condition3);
    CHECK(cls.c3_witness->q_weight == Rational(1) / 2);
  }
  SUBCASE("dominant pair fails Condition 3") {
    auto cls = repgame::classify(testgames::dominant_pair<Rational>());
    CHECK(!cls.condition3);
  }
}
