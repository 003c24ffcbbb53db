#pragma once

// Closed-form error-rate arithmetic for a family of m independent tests,
// each run at per-test level alpha.

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fpcontrol/errors.hpp"

namespace fpc {

enum class RateKind { pcer, fwer, fdr, pfer };

struct ErrorRateSpec {
  double alpha = 0.05;
  std::size_t m = 1;
  RateKind rate_kind = RateKind::fwer;
};

namespace detail {

inline void check_alpha_m(double alpha, std::size_t m) {
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
  require(m >= 1, "m must be at least 1");
}

}  // namespace detail

/// Probability of at least one false positive when all m nulls are true:
/// 1 - (1 - alpha)^m.
inline double fwer(double alpha, std::size_t m) {
  detail::check_alpha_m(alpha, m);
  return -std::expm1(static_cast<double>(m) * std::log1p(-alpha));
}

inline double bonferroni_threshold(double alpha, std::size_t m) {
  detail::check_alpha_m(alpha, m);
  return alpha / static_cast<double>(m);
}

// Expected count of false positives under the complete null.
inline double pfer(double alpha, std::size_t m) {
  detail::check_alpha_m(alpha, m);
  return alpha * static_cast<double>(m);
}

inline double pcer(double alpha) {
  detail::require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
  return alpha;
}

inline double error_rate(const ErrorRateSpec& spec) {
  switch (spec.rate_kind) {
    case RateKind::pcer: return pcer(spec.alpha);
    case RateKind::fwer: return fwer(spec.alpha, spec.m);
    case RateKind::pfer: return pfer(spec.alpha, spec.m);
    case RateKind::fdr:
      // Under the complete null every discovery is false, so the FDR of
      // unadjusted testing equals its FWER.
      return fwer(spec.alpha, spec.m);
  }
  return 0.0;
}

/// Expected number of false discoveries among n_significant results declared
/// at a given FDR level.
inline double expected_false_discoveries(double fdr_level, std::size_t n_significant) {
  detail::require(fdr_level > 0.0 && fdr_level < 1.0, "fdr_level must lie in (0,1)");
  return fdr_level * static_cast<double>(n_significant);
}

/// Steinfatt's alpha percentage: expected false positives (alpha*m) over the
/// observed number of significant results, times 100. Values above 100 mean
/// fewer significant results were seen than the complete null predicts; they
/// are returned as-is.
inline double alpha_percentage(double alpha, std::size_t m, std::size_t n_observed_significant) {
  detail::check_alpha_m(alpha, m);
  if (n_observed_significant == 0) {
    throw UndefinedResult(
        "alpha percentage is undefined with zero significant results; report "
        "\"no significant results\" instead");
  }
  return alpha * static_cast<double>(m) / static_cast<double>(n_observed_significant) * 100.0;
}

struct AlphaPercentageRow {
  double alpha = 0.0;
  std::size_t n_significant = 0;
  double alpha_percentage = 0.0;  // NaN when n_significant == 0
  bool exceeds_null_expectation = false;  // alpha% > 100
};

/// One alpha% row per alpha. Counts must come from a single p-value vector,
/// so they are nondecreasing in alpha.
inline std::vector<AlphaPercentageRow> alpha_percentage_profile(
    std::size_t m, const std::map<double, std::size_t>& n_significant_at) {
  detail::require(m >= 1, "m must be at least 1");
  detail::require(!n_significant_at.empty(), "alpha_percentage_profile: no alphas given");
  std::vector<AlphaPercentageRow> rows;
  std::size_t previous = 0;
  for (const auto& [alpha, count] : n_significant_at) {
    detail::require(count <= m, "alpha_percentage_profile: count exceeds m");
    if (count < previous) {
      throw InputError(
          "alpha_percentage_profile: significant counts decrease as alpha grows; "
          "counts are inconsistent with a single p-value vector");
    }
    previous = count;
    AlphaPercentageRow row{alpha, count, std::nan(""), false};
    if (count > 0) {
      row.alpha_percentage = alpha_percentage(alpha, m, count);
      row.exceeds_null_expectation = row.alpha_percentage > 100.0;
    } else {
      detail::check_alpha_m(alpha, m);
    }
    rows.push_back(row);
  }
  return rows;
}

// Counts p <= alpha for each alpha, ready for alpha_percentage_profile.
inline std::map<double, std::size_t> count_significant(std::span<const double> p,
                                                       std::span<const double> alphas) {
  std::map<double, std::size_t> out;
  for (double a : alphas) {
    std::size_t c = 0;
    for (double v : p) c += (v <= a) ? 1 : 0;
    out[a] = c;
  }
  return out;
}

}  // namespace fpc
