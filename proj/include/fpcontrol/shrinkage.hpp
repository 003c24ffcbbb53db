#pragma once

// Shrinkage of effect estimates toward zero under the normal-means model
// theta_hat_i ~ N(theta_i, se_i^2):
//
//   fixed_normal  theta_i ~ N(0, sigma^2), sigma chosen by the analyst
//                 (optionally calibrated by simulation, see calibrate_sigma)
//   eb_normal     theta_i ~ N(0, sigma^2), sigma by marginal maximum likelihood
//   spike_slab    theta_i ~ pi0 δ0 + (1 - pi0) N(0, sigma^2), fitted by EM
//
// A result is "significant" when its central posterior interval excludes 0.

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fpcontrol/errors.hpp"
#include "fpcontrol/parallel.hpp"
#include "fpcontrol/scenario.hpp"
#include "fpcontrol/stats/rng.hpp"
#include "fpcontrol/stats/special.hpp"
#include "fpcontrol/stats/tests.hpp"

namespace fpc {

struct EffectSummary {
  double theta_hat = 0.0;
  double se = 1.0;
  std::string label;
  // Residual degrees of freedom behind theta_hat / se. Infinite means the
  // ratio is treated as exactly normal.
  double df = std::numeric_limits<double>::infinity();

  void validate() const {
    if (!std::isfinite(theta_hat)) throw InputError("effect '" + label + "': estimate is not finite");
    if (!(se > 0.0) || !std::isfinite(se)) {
      throw InputError("effect '" + label + "': standard error must be positive and finite");
    }
    if (!(df > 0.0)) throw InputError("effect '" + label + "': degrees of freedom must be positive");
  }
};

/// Replaces se by the normal-scale standard error that gives theta_hat / se
/// the same two-sided p-value under N(0,1) as the t ratio has under t(df).
/// Summaries with infinite df come back unchanged.
inline EffectSummary normal_equivalent(const EffectSummary& e) {
  if (!std::isfinite(e.df)) return e;
  EffectSummary out = e;
  out.df = std::numeric_limits<double>::infinity();
  const double t = std::fabs(e.theta_hat) / e.se;
  if (t < 1e-6) {
    // limit of |t| / z as t -> 0 is f_t(0) / phi(0)
    const double ratio = stats::student_t_pdf(0.0, e.df) / stats::normal_pdf(0.0);
    out.se = e.se / ratio;
    return out;
  }
  const double p = stats::student_t_two_sided_p(t, e.df);
  if (!(p > 1e-300)) return out;
  const double z = -stats::normal_quantile(0.5 * p);
  if (z > t) return out;
  out.se = std::fabs(e.theta_hat) / z;
  return out;
}

inline std::vector<EffectSummary> normal_equivalent(std::span<const EffectSummary> effects) {
  std::vector<EffectSummary> out;
  out.reserve(effects.size());
  for (const auto& e : effects) out.push_back(normal_equivalent(e));
  return out;
}

enum class PriorKind { fixed_normal, eb_normal, spike_slab };

struct FitDiagnostics {
  bool fitted = false;
  std::size_t iterations = 0;
  double log_marginal = std::numeric_limits<double>::quiet_NaN();
  bool converged = true;
  std::vector<double> objective_trace;  // one entry per iterate, starting value first
};

struct ShrinkagePrior {
  PriorKind kind = PriorKind::fixed_normal;
  double sigma = 1.0;
  std::optional<double> pi0;  // spike_slab only
  FitDiagnostics fit;

  static ShrinkagePrior fixed(double sigma) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InputError("prior sigma must be >= 0 and finite");
    return ShrinkagePrior{PriorKind::fixed_normal, sigma, std::nullopt, {}};
  }

  static ShrinkagePrior spike_slab(double pi0, double sigma) {
    if (!(pi0 >= 0.0 && pi0 <= 1.0)) throw InputError("pi0 must lie in [0,1]");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InputError("prior sigma must be >= 0 and finite");
    return ShrinkagePrior{PriorKind::spike_slab, sigma, pi0, {}};
  }
};

struct ShrunkenEffect {
  double posterior_mean = 0.0;
  double posterior_sd = 0.0;
  std::optional<double> prob_null;  // spike_slab only
  double interval_lo = 0.0;
  double interval_hi = 0.0;
  double interval_level = 0.95;
  bool degenerate = false;  // sigma = 0 prior: point mass at zero

  bool excludes_zero() const { return interval_lo > 0.0 || interval_hi < 0.0; }
};

inline constexpr std::size_t kMinEbEffects = 3;
inline constexpr std::size_t kMinSpikeSlabEffects = 10;

namespace detail {

inline void check_interval_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw InputError("interval level must lie in (0,1)");
}

inline ShrunkenEffect conjugate_normal(const EffectSummary& e, double sigma, double level) {
  ShrunkenEffect out;
  out.interval_level = level;
  if (sigma == 0.0) {
    out.degenerate = true;
    return out;
  }
  const double s2 = sigma * sigma;
  const double v = e.se * e.se;
  out.posterior_mean = e.theta_hat * s2 / (s2 + v);
  out.posterior_sd = std::sqrt(s2 * v / (s2 + v));
  const double z = stats::normal_quantile(0.5 + 0.5 * level);
  out.interval_lo = out.posterior_mean - z * out.posterior_sd;
  out.interval_hi = out.posterior_mean + z * out.posterior_sd;
  return out;
}

// Posterior weight of the spike, computed in log space.
inline double spike_weight(double theta_hat, double se, double pi0, double sigma) {
  if (pi0 >= 1.0 || sigma == 0.0) return pi0 >= 1.0 ? 1.0 : pi0;
  if (pi0 <= 0.0) return 0.0;
  const double v = se * se;
  const double log_spike = std::log(pi0) + stats::normal_log_density(theta_hat, v);
  const double log_slab = std::log1p(-pi0) + stats::normal_log_density(theta_hat, v + sigma * sigma);
  return 1.0 / (1.0 + std::exp(log_slab - log_spike));
}

// Quantile of p0 δ0 + (1 - p0) N(m, s^2); the point mass fills the CDF jump at 0.
inline double mixture_quantile(double u, double p0, double m, double s) {
  if (p0 >= 1.0 || s == 0.0) return 0.0;
  const double below_zero = (1.0 - p0) * stats::normal_cdf(-m / s);
  if (u < below_zero) return m + s * stats::normal_quantile(u / (1.0 - p0));
  if (u <= below_zero + p0) return 0.0;
  return m + s * stats::normal_quantile((u - p0) / (1.0 - p0));
}

}  // namespace detail

inline ShrunkenEffect shrink_with_prior(const EffectSummary& raw, const ShrinkagePrior& prior,
                                        double interval_level = 0.95) {
  raw.validate();
  const EffectSummary e = normal_equivalent(raw);
  detail::check_interval_level(interval_level);
  if (prior.kind != PriorKind::spike_slab) {
    return detail::conjugate_normal(e, prior.sigma, interval_level);
  }
  const double pi0 = prior.pi0.value_or(0.0);
  const double sigma = prior.sigma;
  const double p0 = detail::spike_weight(e.theta_hat, e.se, pi0, sigma);

  ShrunkenEffect out;
  out.interval_level = interval_level;
  out.prob_null = p0;
  if (sigma == 0.0 || p0 >= 1.0) {
    out.degenerate = sigma == 0.0;
    return out;
  }
  const double s2 = sigma * sigma;
  const double v = e.se * e.se;
  const double slab_mean = e.theta_hat * s2 / (s2 + v);
  const double slab_var = s2 * v / (s2 + v);
  out.posterior_mean = (1.0 - p0) * slab_mean;
  const double second_moment = (1.0 - p0) * (slab_var + slab_mean * slab_mean);
  out.posterior_sd = std::sqrt(std::max(0.0, second_moment - out.posterior_mean * out.posterior_mean));
  const double tail = 0.5 * (1.0 - interval_level);
  const double slab_sd = std::sqrt(slab_var);
  out.interval_lo = detail::mixture_quantile(tail, p0, slab_mean, slab_sd);
  out.interval_hi = detail::mixture_quantile(1.0 - tail, p0, slab_mean, slab_sd);
  return out;
}

/// Normal(0, sigma^2) prior with sigma fixed in advance. sigma = 0 shrinks
/// everything to exactly zero and flags the result as degenerate.
inline ShrunkenEffect shrink_fixed_normal(const EffectSummary& e, double sigma,
                                          double interval_level = 0.95) {
  return shrink_with_prior(e, ShrinkagePrior::fixed(sigma), interval_level);
}

inline std::vector<ShrunkenEffect> shrink_all(std::span<const EffectSummary> effects,
                                              const ShrinkagePrior& prior,
                                              double interval_level = 0.95) {
  std::vector<ShrunkenEffect> out;
  out.reserve(effects.size());
  for (const auto& e : effects) out.push_back(shrink_with_prior(e, prior, interval_level));
  return out;
}

/// sum_i log N(theta_hat_i; 0, sigma^2 + se_i^2)
inline double normal_log_marginal(std::span<const EffectSummary> effects, double sigma) {
  double ll = 0.0;
  for (const auto& raw : effects) {
    const EffectSummary e = normal_equivalent(raw);
    ll += stats::normal_log_density(e.theta_hat, e.se * e.se + sigma * sigma);
  }
  return ll;
}

inline double spike_slab_log_marginal(std::span<const EffectSummary> effects, double pi0, double sigma) {
  double ll = 0.0;
  for (const auto& raw : effects) {
    const EffectSummary e = normal_equivalent(raw);
    const double v = e.se * e.se;
    const double a = pi0 > 0.0 ? std::log(pi0) + stats::normal_log_density(e.theta_hat, v)
                               : -std::numeric_limits<double>::infinity();
    const double b = pi0 < 1.0 ? std::log1p(-pi0) + stats::normal_log_density(e.theta_hat, v + sigma * sigma)
                               : -std::numeric_limits<double>::infinity();
    const double hi = std::max(a, b);
    ll += hi + std::log(std::exp(a - hi) + std::exp(b - hi));
  }
  return ll;
}

namespace detail {

// Maximizes sum_i w_i log N(theta_hat_i; 0, sigma^2 + se_i^2) over sigma >= 0:
// coarse log-scale grid, Brent refinement around the best cell, and the
// boundary sigma = 0 as an explicit candidate.
inline double maximize_weighted_sigma(std::span<const EffectSummary> effects, std::span<const double> w) {
  auto objective = [&](double sigma) {
    double ll = 0.0;
    for (std::size_t i = 0; i < effects.size(); ++i) {
      if (w[i] == 0.0) continue;
      ll += w[i] * stats::normal_log_density(effects[i].theta_hat, effects[i].se * effects[i].se + sigma * sigma);
    }
    return ll;
  };
  double min_se = std::numeric_limits<double>::infinity();
  double max_scale = 0.0;
  for (const auto& e : effects) {
    min_se = std::min(min_se, e.se);
    max_scale = std::max(max_scale, std::fabs(e.theta_hat) + e.se);
  }
  const double log_lo = std::log(1e-6 * min_se);
  const double log_hi = std::log(10.0 * max_scale);
  constexpr int grid = 64;
  int best_cell = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int g = 0; g <= grid; ++g) {
    const double v = objective(std::exp(log_lo + (log_hi - log_lo) * g / grid));
    if (v > best_value) {
      best_value = v;
      best_cell = g;
    }
  }
  const double a = log_lo + (log_hi - log_lo) * std::max(0, best_cell - 1) / grid;
  const double b = log_lo + (log_hi - log_lo) * std::min(grid, best_cell + 1) / grid;
  std::uintmax_t iters = 200;
  const auto [log_sigma, neg] = boost::math::tools::brent_find_minima(
      [&](double u) { return -objective(std::exp(u)); }, a, b, std::numeric_limits<double>::digits, iters);
  double sigma = std::exp(log_sigma);
  double value = -neg;
  if (best_value > value) {
    sigma = std::exp(log_lo + (log_hi - log_lo) * best_cell / grid);
    value = best_value;
  }
  if (objective(0.0) >= value) return 0.0;
  return sigma;
}

}  // namespace detail

/// Empirical-Bayes normal prior: sigma maximizes the marginal likelihood
/// prod_i N(theta_hat_i; 0, sigma^2 + se_i^2).
inline ShrinkagePrior fit_eb_normal(std::span<const EffectSummary> raw) {
  if (raw.size() < kMinEbEffects) {
    throw InputError("empirical-Bayes fit needs at least " + std::to_string(kMinEbEffects) +
                     " effects; with so few, sigma cannot be estimated. Use a fixed normal prior instead.");
  }
  for (const auto& e : raw) e.validate();
  const std::vector<EffectSummary> effects = normal_equivalent(raw);
  const std::vector<double> w(effects.size(), 1.0);
  ShrinkagePrior prior;
  prior.kind = PriorKind::eb_normal;
  prior.sigma = detail::maximize_weighted_sigma(effects, w);
  prior.fit.fitted = true;
  prior.fit.iterations = 1;
  prior.fit.log_marginal = normal_log_marginal(effects, prior.sigma);
  prior.fit.objective_trace = {prior.fit.log_marginal};
  return prior;
}

struct SpikeSlabOptions {
  std::size_t max_iterations = 500;
  double tolerance = 1e-8;        // stop when the objective gains less than this
  std::optional<double> fixed_pi0;  // hold pi0 fixed (pi0 = 0 collapses to the EB normal fit)
  double initial_pi0 = 0.5;
  // Beta(null_weight, 1) prior on pi0. 1 gives plain maximum likelihood.
  double null_weight = 10.0;
};

/// Spike-and-slab prior fitted by EM on the marginal mixture
/// pi0 N(0, se^2) + (1 - pi0) N(0, se^2 + sigma^2).
///
/// EM maximizes log-marginal + (null_weight - 1) log pi0. The penalty
/// settles the flat ridge at sigma -> 0, where the likelihood cannot tell
/// spike from slab, on pi0 = 1 instead of an arbitrary value.
///
/// E-step: w_i = posterior spike weight. M-step:
/// pi0 = (sum w + null_weight - 1) / (n + null_weight - 1); sigma maximizes
/// sum (1 - w_i) log N(theta_hat_i; 0, se_i^2 + sigma^2) and is never moved to
/// a value that lowers that sum, so the objective is nondecreasing.
/// fit.objective_trace holds it per iterate; fit.log_marginal is the
/// unpenalized value at the end.
inline ShrinkagePrior fit_spike_slab(std::span<const EffectSummary> raw, const SpikeSlabOptions& opt = {}) {
  if (raw.size() < kMinSpikeSlabEffects) {
    throw InputError("spike-and-slab fit needs at least " + std::to_string(kMinSpikeSlabEffects) +
                     " effects. Use a fixed normal prior instead.");
  }
  for (const auto& e : raw) e.validate();
  if (opt.fixed_pi0 && !(*opt.fixed_pi0 >= 0.0 && *opt.fixed_pi0 <= 1.0)) {
    throw InputError("fixed pi0 must lie in [0,1]");
  }
  if (!(opt.null_weight >= 1.0) || !std::isfinite(opt.null_weight)) {
    throw InputError("null weight must be finite and at least 1");
  }
  const std::vector<EffectSummary> effects = normal_equivalent(raw);
  const std::size_t n = effects.size();
  const double extra = opt.fixed_pi0 ? 0.0 : opt.null_weight - 1.0;
  auto objective = [&](double p0, double s) {
    const double ll = spike_slab_log_marginal(effects, p0, s);
    return extra > 0.0 ? ll + extra * std::log(p0) : ll;
  };

  double pi0 = opt.fixed_pi0.value_or(opt.initial_pi0);
  double sigma = 0.0;
  for (const auto& e : effects) sigma += e.se;
  sigma /= static_cast<double>(n);
  {
    const std::vector<double> ones(n, 1.0);
    const double eb = detail::maximize_weighted_sigma(effects, ones);
    if (eb > 0.0) sigma = eb;
  }

  ShrinkagePrior prior = ShrinkagePrior::spike_slab(pi0, sigma);
  double ll = objective(pi0, sigma);
  prior.fit.objective_trace.push_back(ll);
  prior.fit.converged = false;

  std::vector<double> w(n);
  std::vector<double> slab_w(n);
  std::size_t iter = 0;
  while (iter < opt.max_iterations) {
    ++iter;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = detail::spike_weight(effects[i].theta_hat, effects[i].se, pi0, sigma);
      slab_w[i] = 1.0 - w[i];
    }
    if (!opt.fixed_pi0) {
      double s = 0.0;
      for (double v : w) s += v;
      pi0 = (s + extra) / (static_cast<double>(n) + extra);
    }
    double total_slab = 0.0;
    for (double v : slab_w) total_slab += v;
    if (total_slab > 1e-12) {
      const double candidate = detail::maximize_weighted_sigma(effects, slab_w);
      auto weighted = [&](double s) {
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          v += slab_w[i] * stats::normal_log_density(effects[i].theta_hat,
                                                    effects[i].se * effects[i].se + s * s);
        }
        return v;
      };
      if (weighted(candidate) >= weighted(sigma)) sigma = candidate;
    }
    const double next = objective(pi0, sigma);
    prior.fit.objective_trace.push_back(next);
    const double gain = next - ll;
    ll = next;
    if (gain < opt.tolerance) {
      prior.fit.converged = true;
      break;
    }
  }
  prior.pi0 = pi0;
  prior.sigma = sigma;
  prior.fit.fitted = true;
  prior.fit.iterations = iter;
  prior.fit.log_marginal = spike_slab_log_marginal(effects, pi0, sigma);
  return prior;
}

/// Mean difference and pooled standard error of one two-group outcome.
inline EffectSummary summarize_two_groups(std::span<const double> a, std::span<const double> b,
                                          std::string label = {}) {
  const auto t = stats::t_test_two_sample(a, b, stats::Variance::pooled);
  if (t.degenerate) {
    throw InputError("outcome '" + label + "': zero within-group variance, standard error is 0");
  }
  return EffectSummary{t.estimate, t.std_error, std::move(label), t.df};
}

struct TwoStepResult {
  std::vector<EffectSummary> summaries;
  ShrinkagePrior prior;
  std::vector<ShrunkenEffect> shrunken;
};

/// Summary statistics per outcome, then a spike-and-slab fit across outcomes
/// and posterior shrinkage of every estimate.
inline TwoStepResult two_step(std::span<const std::pair<stats::GroupSample, stats::GroupSample>> outcomes,
                              double interval_level = 0.95, const SpikeSlabOptions& opt = {}) {
  if (outcomes.size() < kMinSpikeSlabEffects) {
    throw InputError("two-step shrinkage needs at least " + std::to_string(kMinSpikeSlabEffects) + " outcomes");
  }
  TwoStepResult r;
  r.summaries.reserve(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& [a, b] = outcomes[i];
    std::string label = a.group_label.empty() ? "outcome" + std::to_string(i + 1) : a.group_label;
    r.summaries.push_back(summarize_two_groups(a.values, b.values, std::move(label)));
  }
  r.prior = fit_spike_slab(r.summaries, opt);
  r.shrunken = shrink_all(r.summaries, r.prior, interval_level);
  return r;
}

// ---------------------------------------------------------------------------
// Calibration of a fixed prior sigma by simulation

struct CalibrationOptions {
  double interval_level = 0.95;  // decision rule: central interval excludes 0
  double tolerance = 0.005;      // required |achieved FPR - target|
  std::size_t workers = 1;
  std::optional<std::uint64_t> seed;  // overrides design.master_seed
};

struct CalibrationStep {
  double sigma;
  double fpr;
};

struct CalibrationResult {
  double sigma = 0.0;
  double achieved_fpr = 0.0;
  std::size_t replicates = 0;
  std::size_t tests = 0;  // replicates * m
  std::uint64_t seed = 0;
  std::vector<CalibrationStep> trace;
};

/// Simulated (theta_hat, se) for every outcome of every replicate of a
/// two-group design, flattened replicate-major.
inline std::vector<EffectSummary> simulate_summaries(const ScenarioSpec& design, std::uint64_t seed,
                                                     std::size_t workers) {
  design.validate();
  if (design.multi_group()) throw InputError("scenario key 'groups': calibration needs a two-group design");
  const auto effects = design.effects();
  std::vector<EffectSummary> out(design.replicates * design.m);
  parallel_for(design.replicates, workers, [&](std::size_t, std::size_t r) {
    auto rng = stats::rng_stream(seed, r);
    std::vector<double> a, b;
    for (std::size_t i = 0; i < design.m; ++i) {
      draw_two_groups(rng, effects[i], design.sd, design.n_per_group, a, b);
      const auto t = stats::t_test_two_sample(a, b);
      // A zero-variance draw has probability zero with continuous data.
      out[r * design.m + i] = EffectSummary{t.estimate, std::max(t.std_error, 1e-300), {}};
    }
  });
  return out;
}

/// Fraction of effects whose posterior interval under N(0, sigma^2) excludes 0.
/// For the conjugate posterior this reduces to |theta_hat| sigma > z se sqrt(sigma^2 + se^2).
inline double shrinkage_fpr(std::span<const EffectSummary> summaries, double sigma, double interval_level) {
  if (sigma <= 0.0) return 0.0;
  const double z = stats::normal_quantile(0.5 + 0.5 * interval_level);
  std::size_t hits = 0;
  for (const auto& e : summaries) {
    if (std::fabs(e.theta_hat) * sigma > z * e.se * std::sqrt(sigma * sigma + e.se * e.se)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(summaries.size());
}

/// Finds sigma whose Monte Carlo false-positive rate on an all-null design
/// matches target_fpr. The FPR is nondecreasing in sigma, so bisection on
/// log sigma over [1e-6, 1e3] x sd converges; the same simulated data are
/// reused at every step.
inline CalibrationResult calibrate_sigma(const ScenarioSpec& design, double target_fpr,
                                         const CalibrationOptions& opt = {}) {
  design.validate();
  if (!design.all_null()) throw InputError("scenario key 'effect_vector': calibration requires an all-null design");
  if (!(target_fpr > 0.0 && target_fpr < 1.0)) throw InputError("target FPR must lie in (0,1)");
  detail::check_interval_level(opt.interval_level);

  CalibrationResult result;
  result.seed = opt.seed.value_or(design.master_seed.value_or(0));
  result.replicates = design.replicates;
  const auto summaries = simulate_summaries(design, result.seed, opt.workers);
  result.tests = summaries.size();

  double log_lo = std::log(1e-6 * design.sd);
  double log_hi = std::log(1e3 * design.sd);
  const double fpr_lo = shrinkage_fpr(summaries, std::exp(log_lo), opt.interval_level);
  const double fpr_hi = shrinkage_fpr(summaries, std::exp(log_hi), opt.interval_level);
  result.trace.push_back({std::exp(log_lo), fpr_lo});
  result.trace.push_back({std::exp(log_hi), fpr_hi});
  if (target_fpr < fpr_lo - opt.tolerance || target_fpr > fpr_hi + opt.tolerance) {
    throw NumericalError("calibrate_sigma: target FPR " + std::to_string(target_fpr) +
                         " is outside the reachable range [" + std::to_string(fpr_lo) + ", " +
                         std::to_string(fpr_hi) + "] for sigma in [1e-6, 1e3] x sd");
  }

  double best_sigma = std::exp(log_hi);
  double best_fpr = fpr_hi;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (log_lo + log_hi);
    const double fpr = shrinkage_fpr(summaries, std::exp(mid), opt.interval_level);
    result.trace.push_back({std::exp(mid), fpr});
    if (std::fabs(fpr - target_fpr) < std::fabs(best_fpr - target_fpr)) {
      best_sigma = std::exp(mid);
      best_fpr = fpr;
    }
    if (std::fabs(fpr - target_fpr) <= 0.1 * opt.tolerance || log_hi - log_lo < 1e-12) break;
    if (fpr < target_fpr) {
      log_lo = mid;
    } else {
      log_hi = mid;
    }
  }
  if (std::fabs(best_fpr - target_fpr) > opt.tolerance) {
    throw NumericalError("calibrate_sigma: closest achievable FPR " + std::to_string(best_fpr) +
                         " misses target " + std::to_string(target_fpr));
  }
  result.sigma = best_sigma;
  result.achieved_fpr = best_fpr;
  return result;
}

}  // namespace fpc
