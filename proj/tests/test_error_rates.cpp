#include <catch_amalgamated.hpp>

#include <cmath>

#include "fpcontrol/error_rates.hpp"
#include "fpcontrol/stats/rng.hpp"

using namespace fpc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// P(at least one of m independent events of probability a) by summing the
// probabilities of every non-empty subset pattern.
double fwer_exhaustive(double a, int m) {
  double total = 0.0;
  for (int mask = 1; mask < (1 << m); ++mask) {
    double pr = 1.0;
    for (int i = 0; i < m; ++i) pr *= (mask >> i & 1) ? a : 1.0 - a;
    total += pr;
  }
  return total;
}

}  // namespace

TEST_CASE("fwer closed form") {
  CHECK_THAT(fwer(0.05, 15), WithinAbs(1.0 - std::pow(0.95, 15), 1e-12));
  CHECK_THAT(fwer(0.05, 15), WithinAbs(0.5367, 5e-5));
  CHECK_THAT(fwer(0.05, 1), WithinAbs(0.05, 1e-15));
  for (double a : {0.01, 0.05, 0.3}) {
    for (int m = 1; m <= 5; ++m) CHECK_THAT(fwer(a, m), WithinAbs(fwer_exhaustive(a, m), 1e-15));
  }
}

TEST_CASE("fwer is increasing and bounded by pfer") {
  for (double a : {0.001, 0.05, 0.5}) {
    double prev = 0.0;
    // Beyond this m the value is 1 to double precision for a = 0.5.
    const std::size_t top = a < 0.1 ? 200 : 50;
    for (std::size_t m = 1; m <= top; ++m) {
      const double f = fwer(a, m);
      CHECK(f > prev);
      prev = f;
      if (m >= 2) CHECK(f < pfer(a, m));
      else CHECK(f <= pfer(a, m));
    }
  }
  CHECK(fwer(0.06, 10) > fwer(0.05, 10));
}

TEST_CASE("bonferroni threshold worked example") {
  CHECK_THAT(bonferroni_threshold(0.05, 15), WithinAbs(0.05 / 15, 1e-15));
  CHECK_THAT(bonferroni_threshold(0.05, 15), WithinAbs(0.003333, 5e-7));
  // 0.048850..., printed to four places by truncation as 0.0488.
  CHECK_THAT(fwer(bonferroni_threshold(0.05, 15), 15), WithinAbs(0.0488, 1e-4));
  CHECK_THAT(fwer(bonferroni_threshold(0.05, 15), 15), WithinAbs(1.0 - std::pow(1.0 - 0.05 / 15, 15), 1e-15));
  CHECK(fwer(bonferroni_threshold(0.05, 15), 15) <= 0.05);
  CHECK(bonferroni_threshold(0.05, 1) == 0.05);
}

TEST_CASE("pfer and expected false discoveries") {
  CHECK(pfer(0.05, 2000) == Catch::Approx(100.0).epsilon(1e-15));
  CHECK(pfer(0.05, 1) == 0.05);
  CHECK(expected_false_discoveries(0.05, 200) == Catch::Approx(10.0).epsilon(1e-15));
  CHECK(200 - expected_false_discoveries(0.05, 200) == Catch::Approx(190.0).epsilon(1e-15));
  CHECK(expected_false_discoveries(0.05, 0) == 0.0);
  CHECK(expected_false_discoveries(0.10, 50) == Catch::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("domain violations are input errors") {
  CHECK_THROWS_AS(fwer(0.0, 3), InputError);
  CHECK_THROWS_AS(fwer(1.0, 3), InputError);
  CHECK_THROWS_AS(fwer(0.05, 0), InputError);
  CHECK_THROWS_AS(pfer(-0.1, 3), InputError);
  CHECK_THROWS_AS(expected_false_discoveries(1.5, 3), InputError);
}

TEST_CASE("error_rate dispatch") {
  CHECK(error_rate({0.05, 15, RateKind::fwer}) == fwer(0.05, 15));
  CHECK(error_rate({0.05, 15, RateKind::pfer}) == pfer(0.05, 15));
  CHECK(error_rate({0.05, 15, RateKind::pcer}) == 0.05);
}

TEST_CASE("alpha percentage") {
  CHECK_THAT(alpha_percentage(0.05, 1000, 68), WithinAbs(73.5, 0.1));
  CHECK_THAT(alpha_percentage(0.05, 1000, 68), WithinAbs(50.0 / 68.0 * 100.0, 1e-12));
  CHECK_THAT(alpha_percentage(0.05, 1000, 50), WithinAbs(100.0, 1e-12));
  CHECK_THAT(alpha_percentage(0.05, 1000, 1000), WithinAbs(5.0, 1e-12));
  CHECK_THAT(alpha_percentage(0.05, 1000, 10), WithinAbs(500.0, 1e-12));
  double prev = 1e300;
  for (std::size_t n = 1; n <= 1000; ++n) {
    const double v = alpha_percentage(0.05, 1000, n);
    CHECK(v < prev);
    prev = v;
  }
  CHECK_THROWS_AS(alpha_percentage(0.05, 1000, 0), UndefinedResult);
  try {
    alpha_percentage(0.05, 1000, 0);
  } catch (const UndefinedResult& e) {
    CHECK(std::string(e.what()).find("no significant results") != std::string::npos);
  }
}

TEST_CASE("alpha percentage profile on null p-values") {
  auto rng = stats::rng_stream(314, 0);
  std::vector<double> p(1000);
  for (auto& v : p) v = rng.uniform();
  const std::vector<double> alphas{0.01, 0.05};
  const auto rows = alpha_percentage_profile(p.size(), count_significant(p, alphas));
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) CHECK_THAT(r.alpha_percentage, WithinAbs(100.0, 15.0 + (r.alpha == 0.01 ? 25.0 : 0.0)));

  // Doubling the significant count at fixed m halves alpha%. Appending zeros
  // also grows m, so the effect is computed from the counts.
  std::size_t n05 = rows[1].n_significant;
  auto with_extra = p;
  with_extra.resize(p.size() + n05, 0.0);
  const auto doubled = alpha_percentage_profile(with_extra.size(), count_significant(with_extra, alphas));
  const double expect = 0.05 * with_extra.size() / (2.0 * n05) * 100.0;
  CHECK_THAT(doubled[1].alpha_percentage, WithinAbs(expect, 1e-9));
  CHECK(doubled[1].alpha_percentage < 0.6 * rows[1].alpha_percentage);

  auto with_500 = p;
  with_500.resize(1500, 0.0);
  const auto r500 = alpha_percentage_profile(1500, count_significant(with_500, alphas));
  CHECK_THAT(r500[1].alpha_percentage, WithinAbs(75.0 / (n05 + 500.0) * 100.0, 1e-9));
  CHECK(r500[1].alpha_percentage < 0.5 * rows[1].alpha_percentage);
}

TEST_CASE("alpha percentage profile consistency and errors") {
  const auto one = alpha_percentage_profile(1000, {{0.05, 68}});
  CHECK(one[0].alpha_percentage == alpha_percentage(0.05, 1000, 68));
  const auto above = alpha_percentage_profile(1000, {{0.05, 20}});
  CHECK(above[0].exceeds_null_expectation);
  const auto none = alpha_percentage_profile(1000, {{0.01, 0}, {0.05, 3}});
  CHECK(std::isnan(none[0].alpha_percentage));
  CHECK_THROWS_AS(alpha_percentage_profile(1000, {{0.01, 30}, {0.05, 20}}), InputError);
}
