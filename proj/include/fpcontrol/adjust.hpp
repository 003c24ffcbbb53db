#pragma once

// Multiple-comparison procedures.
//
// p-adjusting methods (bonferroni, sidak, holm, bh, by, none) return adjusted
// p-values and reject where adjusted <= level. Rejection-set methods
// (fixed_sequence, lsd_gate, snk) return only the rejection mask.
//
// Every p-adjusting method accepts an effective family size m >= p.size().
// Hypotheses beyond p.size() are treated as untested with p = 1, which is how
// a single reported p-value is corrected inside a larger declared family.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "fpcontrol/errors.hpp"
#include "fpcontrol/stats/tests.hpp"
#include "fpcontrol/studentized_range.hpp"

namespace fpc {

enum class Method { bonferroni, sidak, holm, bh, by, fixed_sequence, lsd_gate, snk, none };

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::bonferroni: return "bonferroni";
    case Method::sidak: return "sidak";
    case Method::holm: return "holm";
    case Method::bh: return "bh";
    case Method::by: return "by";
    case Method::fixed_sequence: return "fixed_sequence";
    case Method::lsd_gate: return "lsd";
    case Method::snk: return "snk";
    case Method::none: return "none";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view s) {
  for (Method m : {Method::bonferroni, Method::sidak, Method::holm, Method::bh, Method::by,
                   Method::fixed_sequence, Method::lsd_gate, Method::snk, Method::none}) {
    if (s == method_name(m)) return m;
  }
  if (s == "fdr" || s == "benjamini-hochberg") return Method::bh;
  if (s == "unadjusted") return Method::none;
  if (s == "fixed-sequence") return Method::fixed_sequence;
  return std::nullopt;
}

inline bool adjusts_p_values(Method m) {
  return m == Method::bonferroni || m == Method::sidak || m == Method::holm || m == Method::bh ||
         m == Method::by || m == Method::none;
}

struct PValueFamily {
  std::vector<double> p;
  std::vector<std::string> labels;  // empty, or one unique label per p
  std::string family_id;

  void validate() const {
    if (p.empty()) throw InputError("p-value family is empty");
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!(p[i] >= 0.0 && p[i] <= 1.0)) {
        throw InputError("p-value " + std::to_string(i) + " outside [0,1]");
      }
    }
    if (!labels.empty()) {
      if (labels.size() != p.size()) throw InputError("labels and p-values differ in length");
      std::unordered_set<std::string> seen(labels.begin(), labels.end());
      if (seen.size() != labels.size()) throw InputError("labels must be unique");
    }
  }
};

struct AdjustmentOutcome {
  Method method = Method::none;
  std::optional<std::vector<double>> adjusted_p;
  std::vector<bool> rejected;
  double level = 0.05;
  std::vector<std::string> labels;  // pair labels for group-based methods
  bool degenerate = false;

  std::size_t n_rejected() const {
    return static_cast<std::size_t>(std::count(rejected.begin(), rejected.end(), true));
  }
};

namespace detail {

inline std::size_t effective_m(const PValueFamily& f, std::optional<std::size_t> m_override) {
  f.validate();
  const std::size_t m = m_override.value_or(f.p.size());
  if (m < f.p.size()) throw InputError("m override is smaller than the number of p-values");
  return m;
}

inline void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw InputError("level must lie in (0,1)");
}

inline std::vector<std::size_t> ascending_order(std::span<const double> p) {
  std::vector<std::size_t> idx(p.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  return idx;
}

inline AdjustmentOutcome finish(Method method, const PValueFamily& f, std::vector<double> adj,
                                double level) {
  AdjustmentOutcome out;
  out.method = method;
  out.level = level;
  out.labels = f.labels;
  out.rejected.resize(adj.size());
  for (std::size_t i = 0; i < adj.size(); ++i) {
    // Guard against rounding pushing an adjusted value below its raw value.
    adj[i] = std::clamp(std::max(adj[i], f.p[i]), 0.0, 1.0);
    out.rejected[i] = adj[i] <= level;
  }
  out.adjusted_p = std::move(adj);
  return out;
}

}  // namespace detail

inline AdjustmentOutcome adjust_none(const PValueFamily& f, double level = 0.05) {
  f.validate();
  detail::check_level(level);
  return detail::finish(Method::none, f, f.p, level);
}

// adjusted = min(1, m p)
inline AdjustmentOutcome adjust_bonferroni(const PValueFamily& f, double level = 0.05,
                                           std::optional<std::size_t> m_override = {}) {
  const double m = static_cast<double>(detail::effective_m(f, m_override));
  detail::check_level(level);
  std::vector<double> adj(f.p.size());
  for (std::size_t i = 0; i < adj.size(); ++i) adj[i] = std::min(1.0, m * f.p[i]);
  return detail::finish(Method::bonferroni, f, std::move(adj), level);
}

// adjusted = 1 - (1 - p)^m
inline AdjustmentOutcome adjust_sidak(const PValueFamily& f, double level = 0.05,
                                      std::optional<std::size_t> m_override = {}) {
  const double m = static_cast<double>(detail::effective_m(f, m_override));
  detail::check_level(level);
  std::vector<double> adj(f.p.size());
  for (std::size_t i = 0; i < adj.size(); ++i) {
    const double exact = f.p[i] >= 1.0 ? 1.0 : -std::expm1(m * std::log1p(-f.p[i]));
    // p <= 1 - (1-p)^m <= m p holds exactly; keep rounding from breaking it
    adj[i] = std::clamp(exact, f.p[i], std::min(1.0, m * f.p[i]));
  }
  return detail::finish(Method::sidak, f, std::move(adj), level);
}

/// Holm step-down: with p sorted ascending,
/// adjusted_(i) = max_{j <= i} min(1, (m - j + 1) p_(j)).
inline AdjustmentOutcome adjust_holm(const PValueFamily& f, double level = 0.05,
                                     std::optional<std::size_t> m_override = {}) {
  const std::size_t m = detail::effective_m(f, m_override);
  detail::check_level(level);
  const auto order = detail::ascending_order(f.p);
  std::vector<double> adj(f.p.size());
  double running = 0.0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const double mult = static_cast<double>(m - rank);
    running = std::max(running, std::min(1.0, mult * f.p[order[rank]]));
    adj[order[rank]] = running;
  }
  return detail::finish(Method::holm, f, std::move(adj), level);
}

namespace detail {

// Step-up: adjusted_(i) = min_{j >= i} min(1, scale p_(j) / j).
inline std::vector<double> step_up(std::span<const double> p, double scale) {
  const auto order = ascending_order(p);
  std::vector<double> adj(p.size());
  double running = 1.0;
  for (std::size_t r = order.size(); r-- > 0;) {
    const double j = static_cast<double>(r + 1);
    running = std::min(running, std::min(1.0, scale * p[order[r]] / j));
    adj[order[r]] = running;
  }
  return adj;
}

}  // namespace detail

/// Benjamini–Hochberg.
inline AdjustmentOutcome adjust_bh(const PValueFamily& f, double level = 0.05,
                                   std::optional<std::size_t> m_override = {}) {
  const double m = static_cast<double>(detail::effective_m(f, m_override));
  detail::check_level(level);
  return detail::finish(Method::bh, f, detail::step_up(f.p, m), level);
}

inline double harmonic_number(std::size_t m) {
  double h = 0.0;
  for (std::size_t i = m; i >= 1; --i) h += 1.0 / static_cast<double>(i);
  return h;
}

/// Benjamini–Yekutieli: BH with m replaced by m * H_m.
inline AdjustmentOutcome adjust_by(const PValueFamily& f, double level = 0.05,
                                   std::optional<std::size_t> m_override = {}) {
  const std::size_t m = detail::effective_m(f, m_override);
  detail::check_level(level);
  const double scale = static_cast<double>(m) * harmonic_number(m);
  return detail::finish(Method::by, f, detail::step_up(f.p, scale), level);
}

/// Dispatch for the p-adjusting methods.
inline AdjustmentOutcome adjust(const PValueFamily& f, Method method, double level = 0.05,
                                std::optional<std::size_t> m_override = {}) {
  switch (method) {
    case Method::bonferroni: return adjust_bonferroni(f, level, m_override);
    case Method::sidak: return adjust_sidak(f, level, m_override);
    case Method::holm: return adjust_holm(f, level, m_override);
    case Method::bh: return adjust_bh(f, level, m_override);
    case Method::by: return adjust_by(f, level, m_override);
    case Method::none: return adjust_none(f, level);
    default:
      throw InputError(std::string("method '") + std::string(method_name(method)) +
                       "' does not adjust p-values");
  }
}

/// Tests hypotheses in the given order, each at the full level, stopping at
/// the first non-rejection. Later hypotheses are never tested.
inline AdjustmentOutcome fixed_sequence(const PValueFamily& f, std::span<const std::size_t> order,
                                        double level = 0.05) {
  f.validate();
  detail::check_level(level);
  if (order.size() != f.p.size()) throw InputError("fixed_sequence: order is not a permutation");
  std::vector<bool> seen(f.p.size(), false);
  for (std::size_t i : order) {
    if (i >= f.p.size() || seen[i]) throw InputError("fixed_sequence: order is not a permutation");
    seen[i] = true;
  }
  AdjustmentOutcome out;
  out.method = Method::fixed_sequence;
  out.level = level;
  out.labels = f.labels;
  out.rejected.assign(f.p.size(), false);
  for (std::size_t i : order) {
    if (f.p[i] > level) break;
    out.rejected[i] = true;
  }
  return out;
}

// Row order as the testing order.
inline AdjustmentOutcome fixed_sequence(const PValueFamily& f, double level = 0.05) {
  std::vector<std::size_t> order(f.p.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  return fixed_sequence(f, order, level);
}

namespace detail {

inline std::string group_name(const stats::GroupSample& g, std::size_t i) {
  return g.group_label.empty() ? "g" + std::to_string(i + 1) : g.group_label;
}

// Pair (i, j), i < j, in the order (0,1), (0,2), ..., (k-2, k-1).
inline std::vector<std::string> pair_labels(std::span<const stats::GroupSample> groups) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      out.push_back(group_name(groups[i], i) + "-" + group_name(groups[j], j));
    }
  }
  return out;
}

inline std::size_t pair_index(std::size_t i, std::size_t j, std::size_t k) {
  if (i > j) std::swap(i, j);
  // Pairs before row i: sum_{r < i} (k - 1 - r).
  return i * (2 * k - i - 1) / 2 + (j - i - 1);
}

}  // namespace detail

/// Fisher's protected LSD: pairwise tests at the unadjusted level, run only
/// when the omnibus F-test rejects. Pairwise tests use the ANOVA MSE and df.
inline AdjustmentOutcome lsd_gate(std::span<const stats::GroupSample> groups, double level = 0.05) {
  if (groups.size() < 3) throw InputError("lsd_gate: need at least 3 groups");
  detail::check_level(level);
  const auto table = stats::anova_table(groups);
  const std::size_t k = groups.size();

  AdjustmentOutcome out;
  out.method = Method::lsd_gate;
  out.level = level;
  out.labels = detail::pair_labels(groups);
  out.rejected.assign(k * (k - 1) / 2, false);
  out.degenerate = table.test.degenerate;
  if (table.test.p_value > level) return out;

  std::size_t idx = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j, ++idx) {
      const auto t = stats::t_test_from_mse(table.means[i], table.sizes[i], table.means[j],
                                            table.sizes[j], table.mse, table.df_within);
      out.rejected[idx] = t.p_value <= level;
    }
  }
  return out;
}

/// Student–Newman–Keuls step-down range procedure (balanced designs).
///
/// Means are sorted; a stretch of r adjacent means is significant when its
/// range exceeds q(level, r, df) * sqrt(MSE / n). A stretch is tested only if
/// every stretch containing it was significant. A pair is rejected when the
/// stretch spanning it is significant.
inline AdjustmentOutcome snk(std::span<const stats::GroupSample> groups, double level = 0.05) {
  if (groups.size() < 2) throw InputError("snk: need at least 2 groups");
  detail::check_level(level);
  const std::size_t n = groups.front().values.size();
  for (const auto& g : groups) {
    if (g.values.size() != n) {
      throw InputError("snk: unequal group sizes are not supported (balanced designs only)");
    }
  }
  const auto table = stats::anova_table(groups);
  const std::size_t k = groups.size();

  std::vector<std::size_t> sorted(k);
  std::iota(sorted.begin(), sorted.end(), std::size_t{0});
  std::stable_sort(sorted.begin(), sorted.end(),
                   [&](std::size_t a, std::size_t b) { return table.means[a] < table.means[b]; });

  const double unit = std::sqrt(table.mse / static_cast<double>(n));
  // sig[i][j]: stretch of sorted positions i..j was tested and significant.
  std::vector<std::vector<bool>> sig(k, std::vector<bool>(k, false));

  AdjustmentOutcome out;
  out.method = Method::snk;
  out.level = level;
  out.labels = detail::pair_labels(groups);
  out.rejected.assign(k * (k - 1) / 2, false);
  out.degenerate = table.test.degenerate;

  for (std::size_t r = k; r >= 2; --r) {
    const double critical = studentized_range_quantile(level, static_cast<int>(r), table.df_within);
    for (std::size_t i = 0; i + r <= k; ++i) {
      const std::size_t j = i + r - 1;
      const bool left_ok = (i == 0) || sig[i - 1][j];
      const bool right_ok = (j == k - 1) || sig[i][j + 1];
      if (r < k && !(left_ok && right_ok)) continue;
      const double range = table.means[sorted[j]] - table.means[sorted[i]];
      bool significant;
      if (unit == 0.0) {
        significant = range > 0.0;
      } else {
        significant = range / unit > critical;
      }
      if (significant) {
        sig[i][j] = true;
        out.rejected[detail::pair_index(sorted[i], sorted[j], k)] = true;
      }
    }
  }
  return out;
}

}  // namespace fpc
