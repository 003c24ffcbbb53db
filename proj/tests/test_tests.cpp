#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "fpcontrol/stats/rng.hpp"
#include "fpcontrol/stats/tests.hpp"
#include "oracles.hpp"

using namespace fpc::stats;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Pooled t statistic written out directly.
double pooled_t(const std::vector<double>& a, const std::vector<double>& b) {
  auto mean = [](const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0) / x.size(); };
  const double ma = mean(a), mb = mean(b);
  double ss = 0;
  for (double v : a) ss += (v - ma) * (v - ma);
  for (double v : b) ss += (v - mb) * (v - mb);
  const double df = a.size() + b.size() - 2.0;
  return (ma - mb) / std::sqrt(ss / df * (1.0 / a.size() + 1.0 / b.size()));
}

}  // namespace

TEST_CASE("identical samples give t = 0 and p = 1") {
  const std::vector<double> a{1.5, 2.0, 4.25, 3.0};
  const auto r = t_test_two_sample(a, a);
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == 1.0);
  CHECK_FALSE(r.degenerate);
}

TEST_CASE("shifted samples: quadrature and permutation oracles") {
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{11, 12, 13};
  const auto r = t_test_two_sample(a, b);
  CHECK(r.statistic < 0);
  CHECK(r.df == 4.0);
  const double t = pooled_t(a, b);
  CHECK_THAT(r.statistic, WithinAbs(t, 1e-12));
  CHECK_THAT(r.p_value, WithinRel(2.0 * oracle::t_cdf(-std::fabs(t), 4.0), 1e-8));
  CHECK(r.p_value < 3e-4);

  // Among all 20 relabelings of the six values, the observed split is one of
  // the two most extreme, so the exact permutation p is 2/20. The parametric
  // p must be far smaller than that and consistent with its extremeness.
  std::vector<double> pool{1, 2, 3, 11, 12, 13};
  std::vector<int> pick{1, 1, 1, 0, 0, 0};
  int as_extreme = 0, total = 0;
  do {
    std::vector<double> x, y;
    for (int i = 0; i < 6; ++i) (pick[i] ? x : y).push_back(pool[i]);
    as_extreme += std::fabs(pooled_t(x, y)) >= std::fabs(t) - 1e-12;
    ++total;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  CHECK(total == 20);
  CHECK(as_extreme == 2);
  CHECK(r.p_value < static_cast<double>(as_extreme) / total);
}

TEST_CASE("statistic sign follows mean(a) - mean(b)") {
  const std::vector<double> a{5, 6, 7.5};
  const std::vector<double> b{1, 2, 2.5, 3};
  CHECK(t_test_two_sample(a, b).statistic > 0);
  CHECK(t_test_two_sample(b, a).statistic < 0);
  CHECK(t_test_two_sample(a, b, Variance::welch).statistic > 0);
}

TEST_CASE("zero variance is flagged, not thrown") {
  const std::vector<double> a{2, 2, 2};
  const std::vector<double> b{2, 2, 2, 2};
  const std::vector<double> c{3, 3};
  const auto same = t_test_two_sample(a, b);
  CHECK(same.degenerate);
  CHECK(same.p_value == 1.0);
  const auto diff = t_test_two_sample(a, c);
  CHECK(diff.degenerate);
  CHECK(diff.p_value == 0.0);
}

TEST_CASE("fewer than two values is an input error") {
  const std::vector<double> a{1};
  const std::vector<double> b{1, 2};
  CHECK_THROWS_AS(t_test_two_sample(a, b), fpc::InputError);
}

TEST_CASE("welch t uses Satterthwaite df") {
  const std::vector<double> a{1, 2, 3, 4, 10};
  const std::vector<double> b{0.1, 0.2, 0.15};
  const auto r = t_test_two_sample(a, b, Variance::welch);
  const double va = 12.5, vb = 0.0025;  // sample variances
  const double sa = va / 5, sb = vb / 3;
  const double df = (sa + sb) * (sa + sb) / (sa * sa / 4 + sb * sb / 2);
  CHECK_THAT(r.df, WithinRel(df, 1e-12));
  CHECK_THAT(r.statistic, WithinRel((4.0 - 0.15) / std::sqrt(sa + sb), 1e-12));
}

TEST_CASE("two-group ANOVA equals the squared pooled t") {
  auto s = rng_stream(3, 1);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> a(7), b(12);
    for (auto& v : a) v = s.normal(0.3, 1.0);
    for (auto& v : b) v = s.normal(0.0, 1.7);
    const auto t = t_test_two_sample(a, b);
    const std::vector<GroupSample> groups{GroupSample(a), GroupSample(b)};
    const auto f = anova_oneway(groups);
    CHECK_THAT(f.statistic, WithinRel(t.statistic * t.statistic, 1e-10));
    CHECK_THAT(f.p_value, WithinAbs(t.p_value, 1e-10));
    CHECK(f.df == 1.0);
    CHECK(f.df_denominator == 17.0);
  }
}

TEST_CASE("null p-values are uniform") {
  auto s = rng_stream(17, 0);
  const int reps = 10000;
  std::vector<double> pt(reps), pf(reps);
  std::vector<double> a(10), b(10);
  for (int r = 0; r < reps; ++r) {
    for (auto& v : a) v = s.normal();
    for (auto& v : b) v = s.normal();
    pt[r] = t_test_two_sample(a, b).p_value;
    std::vector<GroupSample> g(3);
    for (auto& grp : g) {
      grp.values.resize(10);
      for (auto& v : grp.values) v = s.normal();
    }
    pf[r] = anova_oneway(g).p_value;
  }
  CHECK(oracle::ks_uniform(pt) < oracle::ks_critical(0.01, reps));
  CHECK(oracle::ks_uniform(pf) < oracle::ks_critical(0.01, reps));
  const double se = std::sqrt(0.05 * 0.95 / reps);
  const double frac_t = std::count_if(pt.begin(), pt.end(), [](double p) { return p < 0.05; }) / double(reps);
  const double frac_f = std::count_if(pf.begin(), pf.end(), [](double p) { return p < 0.05; }) / double(reps);
  CHECK(std::fabs(frac_t - 0.05) < 3 * se);
  CHECK(std::fabs(frac_f - 0.05) < 3 * se);
}

TEST_CASE("t test rejection rate at 10^5 null replicates") {
  auto s = rng_stream(18, 0);
  const int reps = 100000;
  std::vector<double> a(10), b(10);
  int hits = 0;
  for (int r = 0; r < reps; ++r) {
    for (auto& v : a) v = s.normal();
    for (auto& v : b) v = s.normal();
    hits += t_test_two_sample(a, b).p_value < 0.05;
  }
  CHECK(std::fabs(hits / double(reps) - 0.05) < 3 * std::sqrt(0.05 * 0.95 / reps));
}

TEST_CASE("null F has mean df2/(df2-2)") {
  auto s = rng_stream(19, 0);
  const int reps = 20000;
  double sum = 0;
  for (int r = 0; r < reps; ++r) {
    std::vector<GroupSample> g(4);
    for (auto& grp : g) {
      grp.values.resize(16);
      for (auto& v : grp.values) v = s.normal(5.0, 2.0);
    }
    sum += anova_oneway(g).statistic;
  }
  const double df2 = 60.0;
  const double expect = df2 / (df2 - 2.0);
  // Var F(3,60) = 2 df2^2 (df1 + df2 - 2) / (df1 (df2-2)^2 (df2-4))
  const double var = 2 * df2 * df2 * (3 + df2 - 2) / (3 * (df2 - 2) * (df2 - 2) * (df2 - 4));
  CHECK(std::fabs(sum / reps - expect) < 4 * std::sqrt(var / reps));
}

TEST_CASE("anova table bookkeeping") {
  const std::vector<GroupSample> g{GroupSample({1, 2, 3}), GroupSample({4, 5, 6}), GroupSample({7, 8, 9, 10})};
  const auto t = anova_table(g);
  CHECK(t.df_within == 7.0);
  CHECK_THAT(t.ss_within, WithinAbs(2 + 2 + 5, 1e-12));
  CHECK_THAT(t.mse, WithinAbs(9.0 / 7.0, 1e-12));
  const double grand = 55.0 / 10.0;
  const double ssb = 3 * std::pow(2 - grand, 2) + 3 * std::pow(5 - grand, 2) + 4 * std::pow(8.5 - grand, 2);
  CHECK_THAT(t.ss_between, WithinAbs(ssb, 1e-12));
  CHECK_THAT(t.test.statistic, WithinRel((ssb / 2) / (9.0 / 7.0), 1e-12));
}
