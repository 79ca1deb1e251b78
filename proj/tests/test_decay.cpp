#include <doctest.h>

#include <conelab/decay.hpp>

#include <cmath>

using namespace conelab;

namespace {
ThetaSeq theta_of(std::vector<double> v) {
  ThetaSeq t;
  t.values = std::move(v);
  return t;
}
}  // namespace

TEST_SUITE("decay") {
  TEST_CASE("alg lemma") {
    // 1 - 2^{-1/2} on the wide branch beats 2^{-3/2}/2 on the narrow one
    CHECK(alg_constant(0.5, 0.5) == doctest::Approx(0.2928932188134524).epsilon(1e-14));
    const AlgResult r = alg_lemma(0.25, 0.5, 0.5, 0.5);
    CHECK(r.wide_branch);
    CHECK(r.lhs == doctest::Approx(0.5857864376269049).epsilon(1e-14));
    CHECK(r.holds());
    CHECK_THROWS_AS(alg_lemma(1.0, 0.5, 0.5, 1.0), DecayError);
    CHECK_THROWS_AS(alg_lemma(0.9, 0.91, 0.5, 1.0), DecayError);
    const AlgGridReport g = alg_lemma_grid(6);
    CHECK(g.points > 0);
    CHECK(g.failures == 0);
    CHECK(g.min_margin >= 1.0 - 1e-12);
  }

  TEST_CASE("recursion step") {
    CHECK(o3_step(1.0, 0.0, 0.5, 1.0));
    CHECK_FALSE(o3_step(0.5, 0.5, 0.5, 1.0));
    // x^{3/2} + x = 1
    const double x = extremal_next(1.0, 0.5, 1.0);
    CHECK(x == doctest::Approx(0.569840290998053).epsilon(1e-13));
    CHECK(o3_step(1.0, x, 0.5, 1.0));
  }

  TEST_CASE("decay iteration") {
    const MonotoneSeq s = extremal_sequence(1.0, 0.5, 1.0, 200);
    const DecayCertificate c = iterate_decay(s, 0.5, 1.0, 0, 150);
    CHECK(c.issued);
    CHECK(c.recheck());
    CHECK(c.beta == doctest::Approx(1.0));
    CHECK(c.fitted_exponent == doctest::Approx(-2.0).epsilon(0.02));

    MonotoneSeq flat;
    flat.values.assign(20, 0.5);
    const DecayCertificate f = iterate_decay(flat, 0.5, 1.0, 0, 10);
    CHECK_FALSE(f.issued);
    CHECK(f.failure == "recursion");
    CHECK(f.failing_index == 0);

    MonotoneSeq up;
    up.values = {0.5, 0.4, 0.45, 0.1, 0.05};
    CHECK(iterate_decay(up, 0.5, 1.0, 0, 3).failure == "monotone");
    CHECK_THROWS_AS(iterate_decay(s, 1.5, 1.0, 0, 10), DecayError);
  }

  TEST_CASE("series lemma") {
    // sum_{j >= 10} j (j^-2 - (j+1)^-2) = 1/10 + trigamma(11)
    const SeriesResult r = series_lemma([](std::size_t j) { return 1.0 / double(j * j); }, 1.0, 1.0, 1, 1.0, 10);
    CHECK(std::abs(r.partial_sum - 0.19516633568168575) <= r.tail_bound + 1e-12);
    CHECK(r.holds());
    CHECK(series_lemma([](std::size_t) { return 0.5; }, 1.0, 1.0, 0, 1.0, 1, 100).partial_sum == 0.0);
    CHECK_THROWS_AS(series_lemma([](std::size_t j) { return 1.0 / double(j * j); }, 1.0, 1.0, 1, 2.0, 10),
                    DecayError);
  }

  TEST_CASE("exponents") {
    const Exponents e = check_exponents(1.0, 0.1, 0.6);
    CHECK(e.nu == doctest::Approx(1.26));
    CHECK(e.beta_bar == doctest::Approx(0.74 / 2.1));
    CHECK_THROWS_AS(check_exponents(1.0, 0.1, 0.4), DecayError);
    CHECK_THROWS_AS(search_exponents(0.005), DecayError);
    const Exponents s = search_exponents(1.0);
    CHECK(s.beta_bar > 0.0);
  }

  TEST_CASE("dyadic reindexing") {
    MonotoneSeq q4;
    q4.values = {1.0, 0.25, 0.0625};
    const MonotoneSeq q2 = dyadic_from_quartic(q4);
    CHECK(q2.scale == DyadicScale::two);
    REQUIRE(q2.size() == 5);
    CHECK(q2[1] == doctest::Approx(0.5));
    CHECK(quartic_from_dyadic(q2).values == q4.values);
  }

  TEST_CASE("Theta sums and annuli") {
    CHECK(cauchy_annuli(theta_of({0.25}), 1) == doctest::Approx(0.75));
    CHECK(cauchy_annuli(theta_of({0.0, 0.0, 0.0}), 1) == 0.0);
    std::vector<double> geo;
    for (int j = 1; j <= 60; ++j) geo.push_back(std::pow(2.0, -j));
    CHECK(cauchy_annuli(theta_of(geo), 1) == doctest::Approx(3.0).epsilon(1e-15));

    MonotoneSeq constant;
    constant.scale = DyadicScale::two;
    constant.values.assign(12, 0.3);
    for (double t : theta_from_Q(constant, 0.1, 1.0).values) CHECK(t == 0.0);

    const MonotoneSeq q2 = dyadic_from_quartic(extremal_sequence(1.0, 0.5, 1.0, 202));
    const ThetaSeq th = theta_from_Q(q2, 0.1, 1.0);
    const ThetaSumCertificate ts = sum_theta(q2, th, 1.0, 16);
    CHECK(ts.issued);
    CHECK(ts.recheck());
    CHECK(ts.direct <= ts.bound);

    const ChainReport ch = verify_annulus_chain(synthetic_annuli(th, 3), th);
    CHECK(ch.ok);
    CHECK(ch.sup_distance <= ch.bound);
  }

  TEST_CASE("bootstrap") {
    const EffectiveCertificate fw = bootstrap_uniqueness(forward_instance(0.5, 120));
    CHECK(fw.issued);
    CHECK(fw.failed_step.empty());
    CHECK(std::is_sorted(fw.tail_sums.rbegin(), fw.tail_sums.rend()));

    const EffectiveCertificate ex = bootstrap_uniqueness(exact_cone_instance());
    CHECK(ex.issued);

    const auto adv = adversarial_instances();
    CHECK(adv.size() == 3);
    for (const Adversary& a : adv) {
      const EffectiveCertificate r = bootstrap_uniqueness(a.inst);
      CHECK_FALSE(r.issued);
      CHECK(r.failed_step == a.expected_step);
      CHECK(r.failing_scale == a.expected_scale);
    }
  }
}
