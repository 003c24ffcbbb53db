#pragma once

// Two-sample t-tests and one-way ANOVA.

#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fpcontrol/errors.hpp"
#include "fpcontrol/stats/special.hpp"

namespace fpc::stats {

struct GroupSample {
  std::vector<double> values;
  std::string group_label;

  GroupSample() = default;
  explicit GroupSample(std::vector<double> v, std::string label = {})
      : values(std::move(v)), group_label(std::move(label)) {}
};

struct TestStatisticResult {
  double statistic = 0.0;
  double df = 0.0;                     // t df, or numerator df for F
  std::optional<double> df_denominator;  // F only
  double p_value = 1.0;
  // Mean difference and its standard error (two-sample tests only).
  double estimate = 0.0;
  double std_error = 0.0;
  // Zero within-group variance: p is 1 (equal means) or 0 (unequal means).
  bool degenerate = false;
};

enum class Variance { pooled, welch };

inline double mean(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Sum of squared deviations around the mean.
inline double sum_sq_dev(std::span<const double> x, double m) {
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s;
}

inline double sample_variance(std::span<const double> x) {
  return sum_sq_dev(x, mean(x)) / static_cast<double>(x.size() - 1);
}

namespace detail {

inline void check_sample(std::span<const double> x, const char* who) {
  if (x.size() < 2) throw InputError(std::string(who) + ": each group needs at least 2 values");
  for (double v : x) {
    if (!std::isfinite(v)) throw InputError(std::string(who) + ": non-finite value in group");
  }
}

inline TestStatisticResult degenerate_t(double diff, double df) {
  TestStatisticResult r;
  r.df = df;
  r.estimate = diff;
  r.degenerate = true;
  if (diff == 0.0) {
    r.statistic = 0.0;
    r.p_value = 1.0;
  } else {
    r.statistic = std::copysign(std::numeric_limits<double>::infinity(), diff);
    r.p_value = 0.0;
  }
  return r;
}

}  // namespace detail

/// Two-sided two-sample t-test of mean(a) - mean(b).
inline TestStatisticResult t_test_two_sample(std::span<const double> a, std::span<const double> b,
                                             Variance variance = Variance::pooled) {
  detail::check_sample(a, "t_test_two_sample");
  detail::check_sample(b, "t_test_two_sample");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = mean(a);
  const double mb = mean(b);
  const double ssa = sum_sq_dev(a, ma);
  const double ssb = sum_sq_dev(b, mb);
  const double diff = ma - mb;

  double se = 0.0;
  double df = 0.0;
  if (variance == Variance::pooled) {
    df = na + nb - 2.0;
    const double sp2 = (ssa + ssb) / df;
    se = std::sqrt(sp2 * (1.0 / na + 1.0 / nb));
  } else {
    const double va = ssa / (na - 1.0) / na;
    const double vb = ssb / (nb - 1.0) / nb;
    se = std::sqrt(va + vb);
    const double denom = va * va / (na - 1.0) + vb * vb / (nb - 1.0);
    df = denom > 0.0 ? (va + vb) * (va + vb) / denom : na + nb - 2.0;
  }
  if (se == 0.0) return detail::degenerate_t(diff, df);

  TestStatisticResult r;
  r.statistic = diff / se;
  r.df = df;
  r.estimate = diff;
  r.std_error = se;
  r.p_value = student_t_two_sided_p(r.statistic, df);
  return r;
}

inline TestStatisticResult t_test_two_sample(const GroupSample& a, const GroupSample& b,
                                             Variance variance = Variance::pooled) {
  return t_test_two_sample(std::span<const double>(a.values), std::span<const double>(b.values),
                           variance);
}

/// Pairwise comparison of two group means using an externally pooled
/// error variance (the ANOVA mean square error) and its df.
inline TestStatisticResult t_test_from_mse(double mean_a, std::size_t n_a, double mean_b,
                                           std::size_t n_b, double mse, double df) {
  const double diff = mean_a - mean_b;
  const double se = std::sqrt(mse * (1.0 / static_cast<double>(n_a) + 1.0 / static_cast<double>(n_b)));
  if (se == 0.0) return detail::degenerate_t(diff, df);
  TestStatisticResult r;
  r.statistic = diff / se;
  r.df = df;
  r.estimate = diff;
  r.std_error = se;
  r.p_value = student_t_two_sided_p(r.statistic, df);
  return r;
}

struct AnovaTable {
  TestStatisticResult test;
  std::vector<double> means;
  std::vector<std::size_t> sizes;
  double ss_between = 0.0;
  double ss_within = 0.0;
  double mse = 0.0;        // within-group mean square
  double df_within = 0.0;  // N - k
};

inline AnovaTable anova_table(std::span<const GroupSample> groups) {
  if (groups.size() < 2) throw InputError("anova_oneway: need at least 2 groups");
  AnovaTable t;
  double total = 0.0;
  std::size_t n_total = 0;
  for (const auto& g : groups) {
    detail::check_sample(g.values, "anova_oneway");
    const double m = mean(g.values);
    t.means.push_back(m);
    t.sizes.push_back(g.values.size());
    t.ss_within += sum_sq_dev(g.values, m);
    total += m * static_cast<double>(g.values.size());
    n_total += g.values.size();
  }
  const double grand = total / static_cast<double>(n_total);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const double d = t.means[i] - grand;
    t.ss_between += static_cast<double>(t.sizes[i]) * d * d;
  }
  const double k = static_cast<double>(groups.size());
  const double df1 = k - 1.0;
  const double df2 = static_cast<double>(n_total) - k;
  t.df_within = df2;
  t.mse = t.ss_within / df2;

  t.test.df = df1;
  t.test.df_denominator = df2;
  if (t.ss_within == 0.0) {
    t.test.degenerate = true;
    // Identical means under zero within variance: nothing to detect.
    const bool all_equal = t.ss_between == 0.0;
    t.test.statistic = all_equal ? 0.0 : std::numeric_limits<double>::infinity();
    t.test.p_value = all_equal ? 1.0 : 0.0;
    return t;
  }
  t.test.statistic = (t.ss_between / df1) / t.mse;
  t.test.p_value = f_upper_p(t.test.statistic, df1, df2);
  return t;
}

inline TestStatisticResult anova_oneway(std::span<const GroupSample> groups) {
  return anova_table(groups).test;
}

}  // namespace fpc::stats
