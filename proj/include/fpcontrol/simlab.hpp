#pragma once

// Monte Carlo measurement of achieved error rates and power.
//
// Every replicate r draws its data from rng_stream(master_seed, r), so a
// report is a pure function of (spec, procedure, seed) no matter how many
// workers run it. Per-replicate metrics are stored by index and reduced in
// index order.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fpcontrol/adjust.hpp"
#include "fpcontrol/errors.hpp"
#include "fpcontrol/parallel.hpp"
#include "fpcontrol/scenario.hpp"
#include "fpcontrol/shrinkage.hpp"
#include "fpcontrol/stats/rng.hpp"
#include "fpcontrol/stats/tests.hpp"

namespace fpc {

/// A decision procedure applied to each simulated family.
struct Procedure {
  enum class Kind { p_adjust, fixed_sequence, lsd, snk, shrink_fixed, shrink_eb, shrink_spike_slab };

  Kind kind = Kind::p_adjust;
  Method method = Method::none;  // p_adjust only
  double level = 0.05;
  double sigma = 1.0;             // shrink_fixed only, outcome units
  double interval_level = 0.95;   // shrinkage decision rule

  static Procedure p_adjust(Method m, double level = 0.05) { return {Kind::p_adjust, m, level}; }
  static Procedure shrink_fixed(double sigma, double interval_level = 0.95) {
    return {Kind::shrink_fixed, Method::none, 1.0 - interval_level, sigma, interval_level};
  }
  static Procedure shrink_eb(double interval_level = 0.95) {
    return {Kind::shrink_eb, Method::none, 1.0 - interval_level, 0.0, interval_level};
  }
  static Procedure two_step(double interval_level = 0.95) {
    return {Kind::shrink_spike_slab, Method::none, 1.0 - interval_level, 0.0, interval_level};
  }

  bool needs_groups() const { return kind == Kind::lsd || kind == Kind::snk; }
  bool is_shrinkage() const {
    return kind == Kind::shrink_fixed || kind == Kind::shrink_eb || kind == Kind::shrink_spike_slab;
  }

  std::string name() const {
    switch (kind) {
      case Kind::p_adjust: return std::string(method_name(method));
      case Kind::fixed_sequence: return "fixed_sequence";
      case Kind::lsd: return "lsd";
      case Kind::snk: return "snk";
      case Kind::shrink_fixed: return "shrink-fixed:" + detail::format_number(sigma);
      case Kind::shrink_eb: return "shrink-eb";
      case Kind::shrink_spike_slab: return "two-step";
    }
    return "?";
  }
};

inline std::vector<std::string> procedure_names() {
  return {"none", "bonferroni", "sidak", "holm", "bh", "by", "fixed_sequence", "lsd", "snk",
          "shrink-fixed:<sigma>", "shrink-eb", "two-step"};
}

/// Parses a procedure name; `level` is the test level for p-based methods and
/// 1 - interval level for shrinkage.
inline Procedure parse_procedure(std::string_view name, double level = 0.05) {
  if (!(level > 0.0 && level < 1.0)) throw InputError("level must lie in (0,1)");
  if (name == "fixed_sequence" || name == "fixed-sequence") return {Procedure::Kind::fixed_sequence, Method::fixed_sequence, level};
  if (name == "lsd") return {Procedure::Kind::lsd, Method::lsd_gate, level};
  if (name == "snk") return {Procedure::Kind::snk, Method::snk, level};
  if (name == "shrink-eb") return Procedure::shrink_eb(1.0 - level);
  if (name == "two-step" || name == "spike-slab") return Procedure::two_step(1.0 - level);
  if (name.starts_with("shrink-fixed:")) {
    const auto sigma = detail::parse_number<double>(name.substr(13), "procedure");
    if (!(sigma > 0.0)) throw InputError("shrink-fixed sigma must be positive");
    return Procedure::shrink_fixed(sigma, 1.0 - level);
  }
  if (const auto m = parse_method(name); m && adjusts_p_values(*m)) return Procedure::p_adjust(*m, level);
  std::string valid;
  for (const auto& n : procedure_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw InputError("unknown procedure '" + std::string(name) + "'; valid: " + valid);
}

struct RateEstimate {
  double value = 0.0;
  double mc_se = 0.0;
};

struct SimReport {
  std::string procedure;
  std::string mode = "standard";
  std::uint64_t seed = 0;
  std::size_t n_replicates = 0;
  std::size_t m = 0;
  std::size_t m_null = 0;

  RateEstimate per_comparison_fpr;  // mean over replicates of V / m0
  RateEstimate fwer;                // P(V >= 1)
  RateEstimate fdr;                 // mean of V / max(R, 1)
  RateEstimate pfer_observed;       // mean of V
  RateEstimate average_power;       // mean of S / m1
  std::vector<std::size_t> power_index;      // 0-based test index of each true effect
  std::vector<RateEstimate> power_per_effect;

  // Totals over all replicates; null + true rejections = total rejections.
  std::size_t total_rejections = 0;
  std::size_t null_rejections = 0;
  std::size_t true_rejections = 0;
  std::vector<std::string> notes;
};

namespace detail {

// Replicate outcome for one arm: rejection/success mask over the m tests.
using Mask = std::vector<bool>;

struct ArmAccumulator {
  std::vector<double> v, s, r, fdp, pcer, tpr;
  std::vector<std::vector<std::size_t>> power_counts;  // per worker, per test
};

inline RateEstimate binary_rate(double rate, std::size_t n) {
  return {rate, std::sqrt(std::max(0.0, rate * (1.0 - rate)) / static_cast<double>(n))};
}

inline RateEstimate mean_with_se(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double mu = std::accumulate(x.begin(), x.end(), 0.0) / n;
  if (x.size() < 2) return {mu, 0.0};
  double ss = 0.0;
  for (double v : x) ss += (v - mu) * (v - mu);
  return {mu, std::sqrt(ss / (n - 1.0) / n)};
}

struct EngineResult {
  std::vector<SimReport> reports;
  std::vector<ArmAccumulator> arms;
};

/// Runs `replicates` replicates; evaluate(rng) returns one mask per arm.
template <class Evaluate>
EngineResult run_engine(const ScenarioSpec& spec, std::uint64_t seed, std::size_t n_arms,
                                  std::size_t workers, Evaluate&& evaluate) {
  const auto effects = spec.effects();
  const std::size_t m = effects.size();
  const std::size_t R = spec.replicates;
  workers = std::clamp<std::size_t>(workers, 1, R);

  std::vector<ArmAccumulator> acc(n_arms);
  for (auto& a : acc) {
    a.v.assign(R, 0.0);
    a.s.assign(R, 0.0);
    a.r.assign(R, 0.0);
    a.fdp.assign(R, 0.0);
    a.pcer.assign(R, 0.0);
    a.tpr.assign(R, 0.0);
    a.power_counts.assign(workers, std::vector<std::size_t>(m, 0));
  }
  std::size_t m0 = 0;
  for (double e : effects) m0 += (e == 0.0) ? 1 : 0;
  const std::size_t m1 = m - m0;

  parallel_for(R, workers, [&](std::size_t worker, std::size_t rep) {
    auto rng = stats::rng_stream(seed, rep);
    const std::vector<Mask> masks = evaluate(rng);
    for (std::size_t arm = 0; arm < n_arms; ++arm) {
      const Mask& mask = masks[arm];
      std::size_t v = 0, s = 0;
      for (std::size_t i = 0; i < m; ++i) {
        if (!mask[i]) continue;
        if (effects[i] == 0.0) {
          ++v;
        } else {
          ++s;
          ++acc[arm].power_counts[worker][i];
        }
      }
      auto& a = acc[arm];
      a.v[rep] = static_cast<double>(v);
      a.s[rep] = static_cast<double>(s);
      a.r[rep] = static_cast<double>(v + s);
      a.fdp[rep] = static_cast<double>(v) / static_cast<double>(std::max<std::size_t>(v + s, 1));
      a.pcer[rep] = m0 ? static_cast<double>(v) / static_cast<double>(m0) : 0.0;
      a.tpr[rep] = m1 ? static_cast<double>(s) / static_cast<double>(m1) : 0.0;
    }
  });

  std::vector<SimReport> reports(n_arms);
  for (std::size_t arm = 0; arm < n_arms; ++arm) {
    auto& a = acc[arm];
    SimReport rep;
    rep.seed = seed;
    rep.n_replicates = R;
    rep.m = m;
    rep.m_null = m0;
    rep.per_comparison_fpr = mean_with_se(a.pcer);
    std::size_t any = 0;
    for (double v : a.v) any += v > 0.0 ? 1 : 0;
    rep.fwer = binary_rate(static_cast<double>(any) / static_cast<double>(R), R);
    rep.fdr = mean_with_se(a.fdp);
    rep.pfer_observed = mean_with_se(a.v);
    rep.average_power = mean_with_se(a.tpr);
    for (std::size_t i = 0; i < m; ++i) {
      if (effects[i] == 0.0) continue;
      std::size_t hits = 0;
      for (const auto& w : a.power_counts) hits += w[i];
      rep.power_index.push_back(i);
      rep.power_per_effect.push_back(binary_rate(static_cast<double>(hits) / static_cast<double>(R), R));
    }
    for (std::size_t i = 0; i < R; ++i) {
      rep.null_rejections += static_cast<std::size_t>(a.v[i]);
      rep.true_rejections += static_cast<std::size_t>(a.s[i]);
      rep.total_rejections += static_cast<std::size_t>(a.r[i]);
    }
    reports[arm] = std::move(rep);
  }
  return {std::move(reports), std::move(acc)};
}

inline std::uint64_t resolve_seed(const ScenarioSpec& spec, std::optional<std::uint64_t> seed) {
  if (seed) return *seed;
  if (spec.master_seed) return *spec.master_seed;
  throw InputError("scenario key 'master_seed': no seed given");
}

}  // namespace detail

/// One simulated family: per-test summaries for two-group designs, or the
/// raw groups plus pairwise summaries (ANOVA MSE) for k-group designs.
struct ReplicateData {
  std::vector<double> p;
  std::vector<EffectSummary> summaries;
  std::vector<stats::GroupSample> groups;  // k-group designs only
};

inline ReplicateData generate_replicate(const ScenarioSpec& spec, stats::RngStream& rng) {
  ReplicateData d;
  if (spec.multi_group()) {
    d.groups = draw_groups(spec, rng);
    const auto table = stats::anova_table(d.groups);
    for (std::size_t i = 0; i < spec.groups; ++i) {
      for (std::size_t j = i + 1; j < spec.groups; ++j) {
        const auto t = stats::t_test_from_mse(table.means[i], table.sizes[i], table.means[j], table.sizes[j],
                                              table.mse, table.df_within);
        d.p.push_back(t.p_value);
        d.summaries.push_back({t.estimate, std::max(t.std_error, 1e-300), {}});
      }
    }
    return d;
  }
  const auto effects = spec.effects();
  d.p.resize(spec.m);
  d.summaries.resize(spec.m);
  std::vector<double> a, b;
  for (std::size_t i = 0; i < spec.m; ++i) {
    draw_two_groups(rng, effects[i], spec.sd, spec.n_per_group, a, b);
    const auto t = stats::t_test_two_sample(a, b);
    d.p[i] = t.p_value;
    d.summaries[i] = EffectSummary{t.estimate, std::max(t.std_error, 1e-300), {}, t.df};
  }
  return d;
}

/// Checks that a procedure can run on a family of the given size (and design)
/// before any replicate is simulated.
inline void validate_procedure(const Procedure& proc, const ScenarioSpec& spec, std::size_t family_size) {
  if (proc.needs_groups()) {
    if (!spec.multi_group()) {
      throw InputError("procedure '" + proc.name() + "' needs a k-group design with groups >= 3");
    }
    if (family_size != spec.m) {
      throw InputError("procedure '" + proc.name() + "' cannot be applied to sub-families");
    }
  }
  if (proc.kind == Procedure::Kind::shrink_eb && family_size < kMinEbEffects) {
    throw InputError("procedure 'shrink-eb' needs families of at least " + std::to_string(kMinEbEffects) + " tests");
  }
  if (proc.kind == Procedure::Kind::shrink_spike_slab && family_size < kMinSpikeSlabEffects) {
    throw InputError("procedure 'two-step' needs families of at least " + std::to_string(kMinSpikeSlabEffects) +
                     " tests");
  }
  if (!(proc.level > 0.0 && proc.level < 1.0)) throw InputError("procedure level must lie in (0,1)");
}

/// Applies a procedure to the tests [first, first + count) of a replicate.
inline detail::Mask apply_procedure(const Procedure& proc, const ReplicateData& d, std::size_t first,
                                    std::size_t count) {
  detail::Mask mask(count, false);
  switch (proc.kind) {
    case Procedure::Kind::p_adjust: {
      PValueFamily f;
      f.p.assign(d.p.begin() + first, d.p.begin() + first + count);
      const auto out = adjust(f, proc.method, proc.level);
      for (std::size_t i = 0; i < count; ++i) mask[i] = out.rejected[i];
      break;
    }
    case Procedure::Kind::fixed_sequence: {
      PValueFamily f;
      f.p.assign(d.p.begin() + first, d.p.begin() + first + count);
      const auto out = fixed_sequence(f, proc.level);
      for (std::size_t i = 0; i < count; ++i) mask[i] = out.rejected[i];
      break;
    }
    case Procedure::Kind::lsd:
    case Procedure::Kind::snk: {
      const auto out = proc.kind == Procedure::Kind::lsd ? lsd_gate(d.groups, proc.level) : snk(d.groups, proc.level);
      for (std::size_t i = 0; i < count; ++i) mask[i] = out.rejected[i];
      break;
    }
    case Procedure::Kind::shrink_fixed:
    case Procedure::Kind::shrink_eb:
    case Procedure::Kind::shrink_spike_slab: {
      const std::span<const EffectSummary> fam(d.summaries.data() + first, count);
      ShrinkagePrior prior;
      if (proc.kind == Procedure::Kind::shrink_fixed) {
        prior = ShrinkagePrior::fixed(proc.sigma);
      } else if (proc.kind == Procedure::Kind::shrink_eb) {
        prior = fit_eb_normal(fam);
      } else {
        prior = fit_spike_slab(fam);
      }
      for (std::size_t i = 0; i < count; ++i) {
        mask[i] = shrink_with_prior(fam[i], prior, proc.interval_level).excludes_zero();
      }
      break;
    }
  }
  return mask;
}

struct SimOptions {
  std::optional<std::uint64_t> seed;  // overrides spec.master_seed
  std::size_t workers = 1;
};

/// Achieved error rates of one procedure on the scenario.
inline SimReport run_scenario(const ScenarioSpec& spec, const Procedure& proc, const SimOptions& opt = {}) {
  spec.validate();
  validate_procedure(proc, spec, spec.m);
  const auto seed = detail::resolve_seed(spec, opt.seed);
  auto engine = detail::run_engine(spec, seed, 1, opt.workers, [&](stats::RngStream& rng) {
    const auto d = generate_replicate(spec, rng);
    return std::vector<detail::Mask>{apply_procedure(proc, d, 0, spec.m)};
  });
  auto& reports = engine.reports;
  reports[0].procedure = proc.name();
  return reports[0];
}

/// Optional stopping: each test is re-run as data accumulate (nested samples
/// at the scheduled looks) and the experiment stops at the first look with
/// p <= level. A test "succeeds" if any look succeeds.
inline SimReport run_optional_stopping(const ScenarioSpec& spec, double level, const SimOptions& opt = {}) {
  spec.validate();
  if (spec.multi_group()) throw InputError("scenario key 'groups': optional stopping uses two-group designs");
  if (!(level > 0.0 && level < 1.0)) throw InputError("level must lie in (0,1)");
  const auto seed = detail::resolve_seed(spec, opt.seed);
  const auto effects = spec.effects();
  const auto sizes = spec.look_sizes();
  auto engine = detail::run_engine(spec, seed, 1, opt.workers, [&](stats::RngStream& rng) {
    detail::Mask mask(spec.m, false);
    std::vector<double> a, b;
    for (std::size_t i = 0; i < spec.m; ++i) {
      draw_two_groups(rng, effects[i], spec.sd, spec.n_per_group, a, b);
      for (std::size_t n : sizes) {
        const auto t = stats::t_test_two_sample(std::span<const double>(a.data(), n),
                                                std::span<const double>(b.data(), n));
        if (t.p_value <= level) {
          mask[i] = true;
          break;
        }
      }
    }
    return std::vector<detail::Mask>{mask};
  });
  auto& reports = engine.reports;
  auto& r = reports[0];
  r.procedure = "none";
  r.mode = "optional_stopping";
  r.notes.push_back("looks=" + std::to_string(sizes.size()));
  return r;
}

// ---------------------------------------------------------------------------
// Forking paths

enum class AnalysisVariant { raw, log1p_shifted, rank, trimmed, covariate_adjusted };

inline std::string_view variant_name(AnalysisVariant v) {
  switch (v) {
    case AnalysisVariant::raw: return "raw";
    case AnalysisVariant::log1p_shifted: return "log1p-shifted";
    case AnalysisVariant::rank: return "rank";
    case AnalysisVariant::trimmed: return "trimmed-10%";
    case AnalysisVariant::covariate_adjusted: return "covariate-adjusted";
  }
  return "?";
}

// Variant v of an analysis is kDefaultVariants[v % 5].
inline constexpr AnalysisVariant kDefaultVariants[] = {
    AnalysisVariant::raw, AnalysisVariant::log1p_shifted, AnalysisVariant::rank, AnalysisVariant::trimmed,
    AnalysisVariant::covariate_adjusted};

namespace detail {

// Average ranks (1-based) with ties sharing their mean rank.
inline std::vector<double> average_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

// Two-group comparison adjusted for a covariate by OLS, y ~ 1 + group + c;
// p-value of the group coefficient with N - 3 df (Frisch–Waugh).
inline double covariate_adjusted_p(const std::vector<double>& a, const std::vector<double>& b,
                                   const std::vector<double>& cov) {
  const std::size_t n = a.size() + b.size();
  std::vector<double> y(a);
  y.insert(y.end(), b.begin(), b.end());
  std::vector<double> g(n, 0.0);
  std::fill(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(a.size()), 1.0);
  auto residualize = [&](std::vector<double> v) {
    const double cm = stats::mean(cov);
    const double vm = stats::mean(v);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sxy += (cov[i] - cm) * (v[i] - vm);
      sxx += (cov[i] - cm) * (cov[i] - cm);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    for (std::size_t i = 0; i < n; ++i) v[i] = v[i] - vm - slope * (cov[i] - cm);
    return v;
  };
  const auto ry = residualize(y);
  const auto rg = residualize(g);
  double sgg = 0.0, sgy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sgg += rg[i] * rg[i];
    sgy += rg[i] * ry[i];
  }
  const double beta = sgy / sgg;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) rss += (ry[i] - beta * rg[i]) * (ry[i] - beta * rg[i]);
  const double df = static_cast<double>(n) - 3.0;
  const double se = std::sqrt(rss / df / sgg);
  if (se == 0.0) return beta == 0.0 ? 1.0 : 0.0;
  return stats::student_t_two_sided_p(beta / se, df);
}

inline double variant_p(AnalysisVariant v, const std::vector<double>& a, const std::vector<double>& b,
                        const std::vector<double>& cov) {
  switch (v) {
    case AnalysisVariant::raw: return stats::t_test_two_sample(a, b).p_value;
    case AnalysisVariant::log1p_shifted: {
      const double lo = std::min(*std::min_element(a.begin(), a.end()), *std::min_element(b.begin(), b.end()));
      std::vector<double> la(a.size()), lb(b.size());
      for (std::size_t i = 0; i < a.size(); ++i) la[i] = std::log1p(a[i] - lo);
      for (std::size_t i = 0; i < b.size(); ++i) lb[i] = std::log1p(b[i] - lo);
      return stats::t_test_two_sample(la, lb).p_value;
    }
    case AnalysisVariant::rank: {
      std::vector<double> pooled(a);
      pooled.insert(pooled.end(), b.begin(), b.end());
      const auto r = average_ranks(pooled);
      const std::vector<double> ra(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(a.size()));
      const std::vector<double> rb(r.begin() + static_cast<std::ptrdiff_t>(a.size()), r.end());
      return stats::t_test_two_sample(ra, rb).p_value;
    }
    case AnalysisVariant::trimmed: {
      auto trim = [](std::vector<double> x) {
        std::sort(x.begin(), x.end());
        const std::size_t cut = x.size() / 10;
        if (x.size() - 2 * cut < 2) return x;
        return std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(cut),
                                   x.end() - static_cast<std::ptrdiff_t>(cut));
      };
      return stats::t_test_two_sample(trim(a), trim(b)).p_value;
    }
    case AnalysisVariant::covariate_adjusted: return covariate_adjusted_p(a, b, cov);
  }
  return 1.0;
}

}  // namespace detail

/// Forking paths: the same data analysed analyst_variants ways (variants
/// cycled from `variants`, default kDefaultVariants); a test succeeds if the
/// smallest p-value over variants is <= level.
inline SimReport run_forking_paths(const ScenarioSpec& spec, double level, const SimOptions& opt = {},
                                   std::span<const AnalysisVariant> variants = kDefaultVariants) {
  spec.validate();
  if (spec.multi_group()) throw InputError("scenario key 'groups': forking paths uses two-group designs");
  if (!(level > 0.0 && level < 1.0)) throw InputError("level must lie in (0,1)");
  if (variants.empty()) throw InputError("forking paths: no analysis variants");
  const auto seed = detail::resolve_seed(spec, opt.seed);
  const auto effects = spec.effects();
  const std::size_t n = spec.n_per_group;
  auto engine = detail::run_engine(spec, seed, 1, opt.workers, [&](stats::RngStream& rng) {
    detail::Mask mask(spec.m, false);
    std::vector<double> a, b, cov(2 * n);
    for (std::size_t i = 0; i < spec.m; ++i) {
      draw_two_groups(rng, effects[i], spec.sd, n, a, b);
      // Nuisance covariate, unrelated to the outcome; always drawn so the
      // stream does not depend on which variants are in use.
      for (auto& c : cov) c = rng.normal();
      double best = 1.0;
      for (std::size_t v = 0; v < spec.analyst_variants; ++v) {
        best = std::min(best, detail::variant_p(variants[v % variants.size()], a, b, cov));
      }
      mask[i] = best <= level;
    }
    return std::vector<detail::Mask>{mask};
  });
  auto& reports = engine.reports;
  auto& r = reports[0];
  r.procedure = "none";
  r.mode = "forking_paths";
  std::string used;
  for (std::size_t v = 0; v < spec.analyst_variants; ++v) {
    used += (v ? "," : "") + std::string(variant_name(variants[v % variants.size()]));
  }
  r.notes.push_back("variants=" + used);
  return r;
}

struct PartitionReport {
  SimReport whole_family;
  SimReport per_subfamily;
};

/// The same procedure applied once to the whole family and independently
/// within each sub-family, on identical data.
inline PartitionReport run_family_partition(const ScenarioSpec& spec, const Procedure& proc,
                                            const SimOptions& opt = {}) {
  spec.validate();
  const auto parts = spec.partition();
  validate_procedure(proc, spec, spec.m);
  for (std::size_t s : parts) validate_procedure(proc, spec, s);
  const auto seed = detail::resolve_seed(spec, opt.seed);
  auto engine = detail::run_engine(spec, seed, 2, opt.workers, [&](stats::RngStream& rng) {
    const auto d = generate_replicate(spec, rng);
    detail::Mask whole = apply_procedure(proc, d, 0, spec.m);
    detail::Mask split(spec.m, false);
    std::size_t first = 0;
    for (std::size_t s : parts) {
      const auto sub = apply_procedure(proc, d, first, s);
      std::copy(sub.begin(), sub.end(), split.begin() + static_cast<std::ptrdiff_t>(first));
      first += s;
    }
    return std::vector<detail::Mask>{std::move(whole), std::move(split)};
  });
  auto& reports = engine.reports;
  reports[0].procedure = proc.name();
  reports[0].mode = "whole_family";
  reports[1].procedure = proc.name();
  reports[1].mode = "per_subfamily";
  reports[1].notes.push_back("partition=" + detail::format_list(parts));
  return {std::move(reports[0]), std::move(reports[1])};
}

struct PairedDifference {
  std::string baseline;
  std::string other;
  std::string metric;
  RateEstimate difference;  // other - baseline, paired over replicates
};

struct ComparisonTable {
  std::vector<SimReport> reports;
  std::vector<PairedDifference> differences;
};

/// Every procedure sees identical replicate data (common random numbers).
/// Differences are taken against the first procedure, replicate by replicate.
inline ComparisonTable compare_procedures(const ScenarioSpec& spec, std::span<const Procedure> procs,
                                          const SimOptions& opt = {}) {
  spec.validate();
  if (procs.size() < 2) throw InputError("compare_procedures: need at least 2 procedures");
  for (const auto& p : procs) validate_procedure(p, spec, spec.m);
  const auto seed = detail::resolve_seed(spec, opt.seed);

  auto engine = detail::run_engine(spec, seed, procs.size(), opt.workers, [&](stats::RngStream& rng) {
    const auto d = generate_replicate(spec, rng);
    std::vector<detail::Mask> masks;
    masks.reserve(procs.size());
    for (const auto& p : procs) masks.push_back(apply_procedure(p, d, 0, spec.m));
    return masks;
  });

  ComparisonTable table;
  table.reports = std::move(engine.reports);
  for (std::size_t i = 0; i < procs.size(); ++i) table.reports[i].procedure = procs[i].name();

  const std::size_t R = spec.replicates;
  const auto& base = engine.arms[0];
  auto paired = [R](const std::vector<double>& x, const std::vector<double>& y, bool indicator) {
    std::vector<double> d(R);
    for (std::size_t r = 0; r < R; ++r) {
      d[r] = indicator ? (y[r] > 0.0 ? 1.0 : 0.0) - (x[r] > 0.0 ? 1.0 : 0.0) : y[r] - x[r];
    }
    return detail::mean_with_se(d);
  };
  for (std::size_t i = 1; i < procs.size(); ++i) {
    const auto& arm = engine.arms[i];
    const auto& a = table.reports[0].procedure;
    const auto& b = table.reports[i].procedure;
    table.differences.push_back({a, b, "fwer", paired(base.v, arm.v, true)});
    table.differences.push_back({a, b, "per_comparison_fpr", paired(base.pcer, arm.pcer, false)});
    table.differences.push_back({a, b, "fdr", paired(base.fdp, arm.fdp, false)});
    table.differences.push_back({a, b, "pfer_observed", paired(base.v, arm.v, false)});
    table.differences.push_back({a, b, "average_power", paired(base.tpr, arm.tpr, false)});
  }
  return table;
}

// ---------------------------------------------------------------------------
// Report text format

namespace detail {

inline std::string fmt(double v) { return format_number(v); }

inline void write_rate(std::ostringstream& out, const std::string& name, const RateEstimate& r) {
  out << name << ',' << fmt(r.value) << ',' << fmt(r.mc_se) << '\n';
}

}  // namespace detail

/// Delimited text: `#` metadata lines, then a `rate,value,mc_se` header and
/// one row per rate in fixed order; power rows are named power_<test>, 1-based.
inline std::string to_text(const SimReport& r) {
  std::ostringstream out;
  out << "# procedure=" << r.procedure << '\n';
  out << "# mode=" << r.mode << '\n';
  out << "# seed=" << r.seed << '\n';
  out << "# replicates=" << r.n_replicates << '\n';
  out << "# m=" << r.m << " m_null=" << r.m_null << '\n';
  out << "# rejections total=" << r.total_rejections << " null=" << r.null_rejections
      << " true=" << r.true_rejections << '\n';
  for (const auto& n : r.notes) out << "# " << n << '\n';
  out << "rate,value,mc_se\n";
  detail::write_rate(out, "per_comparison_fpr", r.per_comparison_fpr);
  detail::write_rate(out, "fwer", r.fwer);
  detail::write_rate(out, "fdr", r.fdr);
  detail::write_rate(out, "pfer_observed", r.pfer_observed);
  detail::write_rate(out, "average_power", r.average_power);
  for (std::size_t i = 0; i < r.power_index.size(); ++i) {
    detail::write_rate(out, "power_" + std::to_string(r.power_index[i] + 1), r.power_per_effect[i]);
  }
  return out.str();
}

/// One block per report (separated by a blank line), then the paired
/// differences as `baseline,other,metric,difference,mc_se`.
inline std::string to_text(const ComparisonTable& t) {
  std::ostringstream out;
  for (const auto& r : t.reports) out << to_text(r) << '\n';
  out << "baseline,other,metric,difference,mc_se\n";
  for (const auto& d : t.differences) {
    out << d.baseline << ',' << d.other << ',' << d.metric << ',' << detail::fmt(d.difference.value) << ','
        << detail::fmt(d.difference.mc_se) << '\n';
  }
  return out.str();
}

inline std::string to_text(const PartitionReport& p) {
  return to_text(p.whole_family) + "\n" + to_text(p.per_subfamily);
}

}  // namespace fpc
