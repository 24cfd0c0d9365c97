#include <doctest.h>

#include <random>
#include <repgame/belief.hpp>
#include <repgame/derived.hpp>
#include <repgame/info.hpp>
#include <repgame/rng.hpp>

using namespace repgame;

TEST_CASE("odds update") {
  CHECK(update_odds(0.05, 2.0, 1.0) == doctest::Approx(0.095238).epsilon(1e-5));
  CHECK(update_odds(0.3, 0.0, 0.7) == 0.0);   // non-a* observed
  CHECK(update_odds(0.3, 0.7, 0.0) == 1.0);   // strategic-impossible event
  CHECK(update_odds(0.3, 0.5, 0.5) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK_THROWS_AS((void)update_odds(0.5, 0.0, 0.0), BothZero);
}

TEST_CASE("odds update is associative in the likelihood ratios") {
  std::mt19937_64 rng(101u);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  for (int k = 0; k < 2000; ++k) {
    double pi = std::uniform_real_distribution<double>(0.01, 0.99)(rng);
    double l1 = u(rng), l2 = u(rng);
    double two_steps = update_odds(update_odds(pi, l1, 1.0), l2, 1.0);
    double one_step = update_odds(pi, l1 * l2, 1.0);
    CHECK(std::abs(two_steps - one_step) <= 1e-12);
  }
}

TEST_CASE("exact posterior is a martingale under the unconditional measure") {
  // i.i.d. mixing q for the strategic type, a* forever for the commitment
  // type; observe a_t each period and update exactly.
  const double pi0 = 0.2, q = 0.35;
  const int horizon = 25, runs = 10000;
  SeedSplitter seeds(99u);
  double sum = 0.0, sumsq = 0.0;
  for (int r = 0; r < runs; ++r) {
    auto rng = seeds.engine(r);
    bool commit = uniform01(rng) < pi0;
    double pi = pi0;
    for (int t = 0; t < horizon; ++t) {
      bool a_star = commit || uniform01(rng) < q;
      pi = a_star ? update_odds(pi, 1.0, q) : 0.0;
      if (pi == 0.0) break;
    }
    sum += pi;
    sumsq += pi * pi;
  }
  double mean = sum / runs;
  double se = std::sqrt((sumsq / runs - mean * mean) / runs);
  CHECK(std::abs(mean - pi0) <= 3.0 * se);
}

TEST_CASE("reputation chain under bounded memory") {
  // Product-choice numbers: q* = 1/2, mixing q*/2 = 1/4, K = 1.
  ReputationChainSpec spec{0.09, 0.25, 1};

  SUBCASE("t = 0 returns the prior") {
    PublicHistoryK h{0, {}, {}};
    CHECK(reputation_after_public_K(spec, h).pi == 0.09);
  }
  SUBCASE("any non-a* observation kills the posterior") {
    PublicHistoryK h{2, {0, 0}, {false}};
    CHECK(reputation_after_public_K(spec, h).pi == 0.0);
  }
  SUBCASE("construction chain keeps pi at or below q*/2 near the prior bound") {
    // Naive Bayes on one a* observation would give 0.09/0.91*4 -> 0.2835,
    // above q*/2 = 0.25.  The construction's accounting multiplies odds by
    // (1-q)/q = 3 instead and stays within the bound it promises.
    PublicHistoryK h{2, {0, 0}, {true}};
    double pi = reputation_after_public_K(spec, h).pi;
    CHECK(pi == doctest::Approx(0.09 / 0.91 * 3.0 / (1 + 0.09 / 0.91 * 3.0)));
    CHECK(pi <= 0.25);
  }
  SUBCASE("bound holds for every window when pi0 < pi0_bar(q*, K)") {
    for (int K = 1; K <= 4; ++K) {
      double q_star = 0.5;
      double bound = pi0_bar<double>(q_star, K);
      ReputationChainSpec s{bound * 0.999, q_star / 2.0, K};
      for (int seen = 0; seen <= K; ++seen) {
        PublicHistoryK h;
        h.t = std::max(seen, 1) + 3;
        h.b_codes.assign(h.t, 0);
        h.a_is_star.assign(seen, true);
        CHECK(reputation_after_public_K(s, h).pi <= q_star / 2.0 + 1e-12);
      }
    }
  }
  SUBCASE("post-transition observations contribute no odds factor") {
    // b* at period 1; window covers a maintenance period only.
    PublicHistoryK h{3, {0, 1, 1}, {true}};
    CHECK(reputation_after_public_K(spec, h).pi == doctest::Approx(0.09));
  }
  SUBCASE("responder action off both paths is inconsistent") {
    PublicHistoryK h{1, {7}, {true}};
    CHECK_THROWS_AS((void)reputation_after_public_K(spec, h),
                    InconsistentHistory);
  }
}

TEST_CASE("chi posterior") {
  SUBCASE("full sample gives a point mass") {
    NetworkHistoryView h{3, {0, 1, 2}, {true, false, true}};
    auto d = chi_posterior([](std::uint32_t, int) { return 0.5; }, h);
    REQUIRE(d.mass.size() == 1);
    CHECK(d.mass[0].first == 0b101u);
    CHECK(d.mass[0].second == doctest::Approx(1.0));
  }
  SUBCASE("empty sample with i.i.d. mixing is product Bernoulli") {
    NetworkHistoryView h{4, {}, {}};
    auto d = chi_posterior([](std::uint32_t, int) { return 0.3; }, h);
    CHECK(d.total() == doctest::Approx(1.0));
    for (int s = 0; s < 4; ++s) {
      CHECK(d.marginal(s) == doctest::Approx(0.3).epsilon(1e-12));
    }
  }
  SUBCASE("two-period example by hand") {
    // q(chi_0) = 0.5; q(chi_1) = 0.4 if chi_0 = 1 else 0.6; observe chi_1 = 1.
    NetworkHistoryView h{2, {1}, {true}};
    auto d = chi_posterior(
        [](std::uint32_t prefix, int s) {
          if (s == 0) return 0.5;
          return (prefix & 1u) ? 0.4 : 0.6;
        },
        h);
    CHECK(d.marginal(0) == doctest::Approx(0.4));
    CHECK(d.marginal(1) == doctest::Approx(1.0));
  }
  SUBCASE("sampled coordinates are degenerate, mass totals one") {
    std::mt19937_64 rng(3u);
    for (int k = 0; k < 50; ++k) {
      int t = 2 + static_cast<int>(rng() % 9);
      NetworkHistoryView h;
      h.t = t;
      for (int s = 0; s < t; ++s) {
        if (rng() % 3 == 0) {
          h.sampled.push_back(s);
          h.sampled_star.push_back(rng() % 2 == 0);
        }
      }
      auto d = chi_posterior(
          [](std::uint32_t, int s) { return 0.2 + 0.05 * (s % 7); }, h);
      CHECK(d.total() == doctest::Approx(1.0));
      for (std::size_t i = 0; i < h.sampled.size(); ++i) {
        double m = d.marginal(h.sampled[i]);
        CHECK(m == doctest::Approx(h.sampled_star[i] ? 1.0 : 0.0));
      }
    }
  }
  SUBCASE("cap enforced") {
    NetworkHistoryView h{21, {}, {}};
    CHECK_THROWS_AS(
        (void)chi_posterior([](std::uint32_t, int) { return 0.5; }, h),
        CapExceeded);
  }
}

TEST_CASE("KL and TV conventions") {
  CHECK(kl_divergence({0.5, 0.5}, {0.5, 0.5}) == 0.0);
  CHECK(kl_divergence({0.0, 1.0}, {0.5, 0.5}) ==
        doctest::Approx(std::log(2.0)));
  CHECK(std::isinf(kl_divergence({0.5, 0.5}, {0.0, 1.0})));

  SUBCASE("Pinsker on random pairs, zero iff equal") {
    std::mt19937_64 rng(55u);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 10000; ++k) {
      int n = 2 + static_cast<int>(rng() % 4);
      std::vector<double> p(n), q(n);
      double sp = 0, sq = 0;
      for (int i = 0; i < n; ++i) {
        p[i] = u(rng) + 1e-3;
        q[i] = u(rng) + 1e-3;
        sp += p[i];
        sq += q[i];
      }
      for (int i = 0; i < n; ++i) {
        p[i] /= sp;
        q[i] /= sq;
      }
      double d = kl_divergence(p, q);
      CHECK(d >= pinsker_floor(total_variation(p, q)) - 1e-12);
      CHECK(d >= 0.0);
      if (total_variation(p, q) > 1e-6) CHECK(d > 0.0);
      CHECK(kl_divergence(p, p) <= 1e-12);
    }
  }
}
