#pragma once

// Command-line front end. run_cli() is the whole program; tools/fpcontrol.cpp
// only forwards main() to it, so tests can drive commands in-process.
//
// Exit status:
//   0  success
//   1  usage error (bad flags, unknown subcommand)
//   2  input error (malformed table or scenario, violated precondition)
//   3  numerical failure (unreachable calibration target, non-convergence)
//   4  file could not be written

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fpcontrol/adjust.hpp"
#include "fpcontrol/error_rates.hpp"
#include "fpcontrol/errors.hpp"
#include "fpcontrol/io/svg.hpp"
#include "fpcontrol/io/table.hpp"
#include "fpcontrol/scenario.hpp"
#include "fpcontrol/shrinkage.hpp"
#include "fpcontrol/simlab.hpp"

namespace fpc::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInput = 2, kNumerical = 3, kIo = 4 };

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicates;
  std::size_t workers = 1;
  bool verbose = false;
};

// Writes to `path`, or to `fallback` when path is empty or "-".
inline void emit(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path + "'");
  f << text;
  if (!f) throw IoError("cannot write '" + path + "'");
}

inline std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

inline ScenarioSpec load_scenario(const std::string& name_or_path) {
  if (auto b = bundled_scenario(name_or_path)) return *b;
  std::ifstream in(name_or_path);
  if (!in) {
    std::string names;
    for (const auto& [n, _] : bundled_scenarios()) names += (names.empty() ? "" : ", ") + n;
    throw InputError("'" + name_or_path + "' is neither a readable file nor a bundled scenario (" + names + ")");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

// --seed beats the scenario's master_seed; with neither, draw one and say so.
inline std::uint64_t pick_seed(const Globals& g, const ScenarioSpec& spec, std::ostream& log) {
  if (g.seed) return *g.seed;
  if (spec.master_seed) return *spec.master_seed;
  const auto s = entropy_seed();
  log << "seed=" << s << " (drawn from system entropy)\n";
  return s;
}

// ---------------------------------------------------------------------------

struct AdjustArgs {
  std::string input;
  std::string output;
  std::string method = "bonferroni";
  std::string p_column = "p";
  double level = 0.05;
  std::optional<std::size_t> m_override;
};

inline int cmd_adjust(const AdjustArgs& a, std::ostream& out, std::ostream& err) {
  const auto method = parse_method(a.method);
  if (!method || method == Method::lsd_gate || method == Method::snk) {
    err << "error: unknown method '" << a.method
        << "'; valid: bonferroni, sidak, holm, bh, by, fixed_sequence, none\n";
    return kInput;
  }
  auto table = io::read_table_file(a.input);
  if (table.empty()) throw InputError("input table '" + a.input + "' has no rows");

  PValueFamily family;
  family.p = table.numeric_column(a.p_column);
  family.family_id = a.input;
  for (std::size_t r = 0; r < family.p.size(); ++r) {
    if (!(family.p[r] >= 0.0 && family.p[r] <= 1.0)) {
      throw InputError("row " + std::to_string(r + 2) + ", column '" + a.p_column + "': p-value outside [0,1]");
    }
  }
  AdjustmentOutcome outcome;
  if (*method == Method::fixed_sequence) {
    outcome = fixed_sequence(family, a.level);  // row order is the testing order
  } else {
    outcome = adjust(family, *method, a.level, a.m_override);
  }
  if (outcome.adjusted_p) table.add_column("adjusted_p", io::format_column(*outcome.adjusted_p));
  std::vector<std::string> rejected;
  for (bool r : outcome.rejected) rejected.emplace_back(r ? "1" : "0");
  table.add_column("rejected", rejected);
  emit(a.output, io::to_string(table), out);

  const std::size_t m = a.m_override.value_or(family.p.size());
  std::size_t raw_significant = 0;
  for (double p : family.p) raw_significant += p <= a.level ? 1 : 0;
  std::ostream& summary = (a.output.empty() || a.output == "-") ? err : out;
  summary << "m=" << m << " method=" << method_name(*method) << " level=" << io::format_double(a.level)
          << " rejected=" << outcome.n_rejected() << " raw_significant=" << raw_significant;
  if (raw_significant == 0) {
    summary << " alpha%=NA (no significant results)\n";
  } else {
    const double ap = alpha_percentage(a.level, m, raw_significant);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", ap);
    summary << " alpha%=" << buf;
    if (ap > 100.0) summary << " (fewer significant results than expected under the complete null)";
    summary << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct ShrinkArgs {
  std::string input;
  std::string output;
  std::string summary;
  std::optional<double> fixed_sigma;
  bool eb = false;
  bool spike_slab = false;
  bool raw = false;  // input is raw data: outcome, group, value
  double interval_level = 0.95;
  std::string estimate_column = "estimate";
  std::string se_column = "se";
};

inline std::string level_tag(double level) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%g", level * 100.0);
  return buf;
}

// Raw data (outcome, group, value) to per-outcome summaries: mean of the
// first-listed group minus mean of the second, pooled standard error.
inline io::Table summarize_raw(const io::Table& raw) {
  const auto outcome = raw.string_column("outcome");
  const auto group = raw.string_column("group");
  const auto value = raw.numeric_column("value");
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::string>> group_order;
  std::map<std::pair<std::string, std::string>, std::vector<double>> cells;
  for (std::size_t r = 0; r < value.size(); ++r) {
    if (!cells.count({outcome[r], group[r]})) {
      if (!group_order.count(outcome[r])) order.push_back(outcome[r]);
      group_order[outcome[r]].push_back(group[r]);
    }
    cells[{outcome[r], group[r]}].push_back(value[r]);
  }
  io::Table t;
  t.columns = {"label", "estimate", "se", "df"};
  for (const auto& o : order) {
    const auto& gs = group_order[o];
    if (gs.size() != 2) throw InputError("outcome '" + o + "': expected exactly 2 groups, found " + std::to_string(gs.size()));
    const auto e = summarize_two_groups(cells[{o, gs[0]}], cells[{o, gs[1]}], o);
    t.rows.push_back({o, io::format_double(e.theta_hat), io::format_double(e.se), io::format_double(e.df)});
  }
  return t;
}

inline int cmd_shrink(const ShrinkArgs& a, std::ostream& out, std::ostream& err) {
  const int chosen = (a.fixed_sigma ? 1 : 0) + (a.eb ? 1 : 0) + (a.spike_slab ? 1 : 0);
  if (chosen != 1) throw InputError("choose exactly one prior: --fixed SIGMA, --eb or --spike-slab");
  auto table = io::read_table_file(a.input);
  if (a.raw) table = summarize_raw(table);
  if (table.empty()) throw InputError("input table '" + a.input + "' has no rows");

  const auto est = table.numeric_column(a.raw ? "estimate" : a.estimate_column);
  const auto se = table.numeric_column(a.raw ? "se" : a.se_column);
  // optional residual df per row; absent means the ratio is taken as normal
  std::vector<double> df(est.size(), std::numeric_limits<double>::infinity());
  if (table.find("df")) df = table.numeric_column("df");
  std::vector<EffectSummary> effects;
  for (std::size_t r = 0; r < est.size(); ++r) {
    EffectSummary e{est[r], se[r], "row " + std::to_string(r + 2), df[r]};
    e.validate();
    effects.push_back(std::move(e));
  }

  ShrinkagePrior prior;
  if (a.fixed_sigma) {
    prior = ShrinkagePrior::fixed(*a.fixed_sigma);
  } else if (a.eb) {
    if (effects.size() < kMinEbEffects) {
      throw InputError("--eb needs at least " + std::to_string(kMinEbEffects) +
                       " rows; with fewer, use --fixed SIGMA");
    }
    prior = fit_eb_normal(effects);
  } else {
    if (effects.size() < kMinSpikeSlabEffects) {
      throw InputError("--spike-slab needs at least " + std::to_string(kMinSpikeSlabEffects) +
                       " rows; with fewer, use --fixed SIGMA");
    }
    prior = fit_spike_slab(effects);
  }
  const auto shrunk = shrink_all(effects, prior, a.interval_level);

  std::vector<double> pm, psd, pn, lo, hi;
  for (const auto& s : shrunk) {
    pm.push_back(s.posterior_mean);
    psd.push_back(s.posterior_sd);
    pn.push_back(s.prob_null.value_or(std::nan("")));
    lo.push_back(s.interval_lo);
    hi.push_back(s.interval_hi);
  }
  const auto tag = level_tag(a.interval_level);
  table.add_column("posterior_mean", io::format_column(pm));
  table.add_column("posterior_sd", io::format_column(psd));
  table.add_column("prob_null", io::format_column(pn));
  table.add_column("lo" + tag, io::format_column(lo));
  table.add_column("hi" + tag, io::format_column(hi));
  emit(a.output, io::to_string(table), out);

  std::ostringstream side;
  side << "prior=" << (prior.kind == PriorKind::fixed_normal ? "fixed_normal"
                       : prior.kind == PriorKind::eb_normal  ? "eb_normal"
                                                             : "spike_slab")
       << '\n';
  side << "sigma=" << io::format_double(prior.sigma) << '\n';
  if (prior.pi0) side << "pi0=" << io::format_double(*prior.pi0) << '\n';
  side << "n=" << effects.size() << '\n';
  side << "interval_level=" << io::format_double(a.interval_level) << '\n';
  if (prior.fit.fitted) {
    side << "iterations=" << prior.fit.iterations << '\n';
    side << "log_marginal=" << io::format_double(prior.fit.log_marginal) << '\n';
    side << "converged=" << (prior.fit.converged ? "true" : "false") << '\n';
  }
  std::size_t excluded = 0;
  for (const auto& s : shrunk) excluded += s.excludes_zero() ? 1 : 0;
  side << "intervals_excluding_zero=" << excluded << '\n';

  std::string sidecar = a.summary;
  if (sidecar.empty() && !a.output.empty() && a.output != "-") sidecar = a.output + ".summary";
  if (sidecar.empty()) {
    err << side.str();
  } else {
    emit(sidecar, side.str(), out);
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string scenario;
  std::vector<std::string> procedures{"none"};
  std::string mode = "auto";
  std::string output;
  double level = 0.05;
};

inline std::string summarize_report(const SimReport& r) {
  std::ostringstream s;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%s [%s]: per-comparison FPR %.4f ± %.4f, FWER %.4f ± %.4f, FDR %.4f ± %.4f, "
                "false positives/family %.3f ± %.3f",
                r.procedure.c_str(), r.mode.c_str(), r.per_comparison_fpr.value, r.per_comparison_fpr.mc_se,
                r.fwer.value, r.fwer.mc_se, r.fdr.value, r.fdr.mc_se, r.pfer_observed.value, r.pfer_observed.mc_se);
  s << buf;
  if (!r.power_index.empty()) {
    std::snprintf(buf, sizeof buf, ", average power %.4f ± %.4f", r.average_power.value, r.average_power.mc_se);
    s << buf;
  }
  s << " (replicates=" << r.n_replicates << ", seed=" << r.seed << ")\n";
  return s.str();
}

inline int cmd_simulate(const SimulateArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  auto spec = load_scenario(a.scenario);
  if (g.replicates) spec.replicates = *g.replicates;
  spec.master_seed = pick_seed(g, spec, err);
  spec.validate();
  SimOptions opt{spec.master_seed, g.workers};

  std::string mode = a.mode;
  if (mode == "auto") {
    if (a.procedures.size() > 1) mode = "compare";
    else if (spec.looks > 1) mode = "optional_stopping";
    else if (spec.analyst_variants > 1) mode = "forking_paths";
    else if (spec.partition().size() > 1) mode = "family_partition";
    else mode = "standard";
  }

  std::vector<Procedure> procs;
  for (const auto& p : a.procedures) procs.push_back(parse_procedure(p, a.level));

  std::string text;
  std::ostringstream human;
  if (mode == "standard") {
    const auto r = run_scenario(spec, procs.front(), opt);
    text = to_text(r);
    human << summarize_report(r);
  } else if (mode == "optional_stopping") {
    const auto r = run_optional_stopping(spec, a.level, opt);
    text = to_text(r);
    human << summarize_report(r);
  } else if (mode == "forking_paths") {
    const auto r = run_forking_paths(spec, a.level, opt);
    text = to_text(r);
    human << summarize_report(r);
  } else if (mode == "family_partition") {
    const auto r = run_family_partition(spec, procs.front(), opt);
    text = to_text(r);
    human << summarize_report(r.whole_family) << summarize_report(r.per_subfamily);
  } else if (mode == "compare") {
    const auto t = compare_procedures(spec, procs, opt);
    text = to_text(t);
    for (const auto& r : t.reports) human << summarize_report(r);
  } else {
    throw InputError("unknown mode '" + mode +
                     "'; valid: auto, standard, optional_stopping, forking_paths, family_partition, compare");
  }
  emit(a.output, text, out);
  ((a.output.empty() || a.output == "-") ? err : out) << human.str();
  return kOk;
}

// ---------------------------------------------------------------------------

struct CalibrateArgs {
  std::string scenario;
  std::string output;
  double target_fpr = 0.05;
  double interval_level = 0.95;
  std::optional<std::uint64_t> verify_seed;
};

inline int cmd_calibrate(const CalibrateArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  auto spec = load_scenario(a.scenario);
  if (g.replicates) spec.replicates = *g.replicates;
  const auto seed = pick_seed(g, spec, err);
  CalibrationOptions opt;
  opt.interval_level = a.interval_level;
  opt.workers = g.workers;
  opt.seed = seed;
  const auto result = calibrate_sigma(spec, a.target_fpr, opt);

  std::ostringstream text;
  text << "sigma=" << io::format_double(result.sigma) << '\n';
  text << "achieved_fpr=" << io::format_double(result.achieved_fpr) << '\n';
  text << "target_fpr=" << io::format_double(a.target_fpr) << '\n';
  text << "interval_level=" << io::format_double(a.interval_level) << '\n';
  text << "replicates=" << result.replicates << '\n';
  text << "tests=" << result.tests << '\n';
  text << "seed=" << result.seed << '\n';
  if (a.verify_seed) {
    const auto fresh = simulate_summaries(spec, *a.verify_seed, g.workers);
    text << "verify_seed=" << *a.verify_seed << '\n';
    text << "verify_fpr=" << io::format_double(shrinkage_fpr(fresh, result.sigma, a.interval_level)) << '\n';
  }
  if (g.verbose) {
    for (const auto& step : result.trace) {
      err << "bisection sigma=" << io::format_double(step.sigma) << " fpr=" << io::format_double(step.fpr) << '\n';
    }
  }
  out << text.str();
  if (!a.output.empty() && a.output != "-") emit(a.output, text.str(), out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct PlotArgs {
  std::vector<std::string> raw;
  std::vector<std::string> shrunk;
  std::string output;
};

inline std::vector<io::PlotPoint> raw_points(const io::Table& t) {
  const auto est = t.numeric_column("estimate");
  const auto se = t.numeric_column("se");
  std::vector<io::PlotPoint> pts;
  for (std::size_t i = 0; i < est.size(); ++i) pts.push_back({est[i], est[i] - se[i], est[i] + se[i]});
  return pts;
}

inline std::vector<io::PlotPoint> shrunk_points(const io::Table& t) {
  const auto pm = t.numeric_column("posterior_mean");
  std::vector<double> lo, hi;
  if (t.find("lo95") && t.find("hi95")) {
    lo = t.numeric_column("lo95");
    hi = t.numeric_column("hi95");
  } else {
    const auto sd = t.numeric_column("posterior_sd");
    for (std::size_t i = 0; i < pm.size(); ++i) {
      lo.push_back(pm[i] - sd[i]);
      hi.push_back(pm[i] + sd[i]);
    }
  }
  std::vector<io::PlotPoint> pts;
  for (std::size_t i = 0; i < pm.size(); ++i) pts.push_back({pm[i], lo[i], hi[i]});
  return pts;
}

inline int cmd_plot_fig2(const PlotArgs& a, std::ostream& out) {
  if (a.raw.empty() || a.raw.size() != a.shrunk.size()) {
    throw InputError("give matching --raw and --shrunk tables (one or two pairs)");
  }
  std::vector<io::PlotPanel> panels;
  for (std::size_t i = 0; i < a.raw.size(); ++i) {
    const auto raw = io::read_table_file(a.raw[i]);
    const auto shr = io::read_table_file(a.shrunk[i]);
    if (raw.empty() || shr.empty()) throw InputError("plot-fig2: empty effect table");
    if (raw.size() != shr.size()) {
      throw InputError("plot-fig2: '" + a.raw[i] + "' has " + std::to_string(raw.size()) + " rows but '" +
                       a.shrunk[i] + "' has " + std::to_string(shr.size()));
    }
    panels.push_back({"estimates ± SE: " + std::filesystem::path(a.raw[i]).filename().string(), raw_points(raw)});
    panels.push_back({"shrunken estimates: " + std::filesystem::path(a.shrunk[i]).filename().string(),
                      shrunk_points(shr)});
  }
  std::ostringstream svg;
  io::write_panels_svg(svg, panels);
  emit(a.output, svg.str(), out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string scenario;
  std::string output;
  bool raw = false;
};

/// One replicate of a two-group scenario as a table: summaries
/// (label, estimate, se, df, p, true_effect) or raw data (outcome, group, value).
inline int cmd_generate(const GenerateArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  auto spec = load_scenario(a.scenario);
  if (spec.multi_group()) throw InputError("generate: only two-group scenarios are supported");
  const auto seed = pick_seed(g, spec, err);
  auto rng = stats::rng_stream(seed, 0);
  const auto effects = spec.effects();
  io::Table t;
  t.columns = a.raw ? std::vector<std::string>{"outcome", "group", "value"}
                    : std::vector<std::string>{"label", "estimate", "se", "df", "p", "true_effect"};
  std::vector<double> ga, gb;
  for (std::size_t i = 0; i < spec.m; ++i) {
    draw_two_groups(rng, effects[i], spec.sd, spec.n_per_group, ga, gb);
    const std::string label = "gene" + std::to_string(i + 1);
    if (a.raw) {
      for (double v : ga) t.rows.push_back({label, "a", io::format_double(v)});
      for (double v : gb) t.rows.push_back({label, "b", io::format_double(v)});
    } else {
      const auto r = stats::t_test_two_sample(ga, gb);
      t.rows.push_back({label, io::format_double(r.estimate), io::format_double(r.std_error),
                        io::format_double(r.df), io::format_double(r.p_value), io::format_double(effects[i] * spec.sd)});
    }
  }
  emit(a.output, io::to_string(t), out);
  return kOk;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"fpcontrol: multiple-testing adjustment, effect shrinkage and false-positive simulation"};
  app.require_subcommand(1);
  app.fallthrough();

  detail::Globals g;
  std::uint64_t seed_value = 0;
  std::size_t replicates_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Master random seed");
  auto* reps_opt = app.add_option("--replicates", replicates_value, "Override the scenario's replicate count")
                       ->check(CLI::PositiveNumber);
  app.add_option("--workers", g.workers, "Worker threads for simulations")->check(CLI::PositiveNumber);
  app.add_flag("--verbose,-v", g.verbose, "Print diagnostic traces");

  detail::AdjustArgs adjust_args;
  auto* adjust_cmd = app.add_subcommand("adjust", "Adjust a table of p-values");
  adjust_cmd->add_option("input", adjust_args.input, "Table with a p column")->required();
  adjust_cmd->add_option("--method,-m", adjust_args.method,
                         "bonferroni, sidak, holm, bh, by, fixed_sequence (row order), none");
  adjust_cmd->add_option("--level", adjust_args.level, "Significance level");
  adjust_cmd->add_option("--m-override", adjust_args.m_override,
                         "Family size when the table holds only some of the family's tests");
  adjust_cmd->add_option("--p-column", adjust_args.p_column, "Name of the p-value column");
  adjust_cmd->add_option("--output,-o", adjust_args.output, "Output table (default stdout)");

  detail::ShrinkArgs shrink_args;
  auto* shrink_cmd = app.add_subcommand("shrink", "Shrink a table of effect estimates toward zero");
  shrink_cmd->add_option("input", shrink_args.input, "Table with estimate and se columns")->required();
  shrink_cmd->add_option("--fixed", shrink_args.fixed_sigma, "Fixed Normal(0, SIGMA) prior");
  shrink_cmd->add_flag("--eb", shrink_args.eb, "Empirical-Bayes normal prior");
  shrink_cmd->add_flag("--spike-slab", shrink_args.spike_slab, "Empirical-Bayes spike-and-slab prior");
  shrink_cmd->add_flag("--raw", shrink_args.raw, "Input is raw data with outcome, group, value columns");
  shrink_cmd->add_option("--interval-level", shrink_args.interval_level, "Posterior interval level");
  shrink_cmd->add_option("--estimate-column", shrink_args.estimate_column, "Name of the estimate column");
  shrink_cmd->add_option("--se-column", shrink_args.se_column,
                         "Name of the standard-error column (a df column, if present, is also read)");
  shrink_cmd->add_option("--output,-o", shrink_args.output, "Output table (default stdout)");
  shrink_cmd->add_option("--summary", shrink_args.summary, "Sidecar summary file (default OUTPUT.summary)");

  detail::SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Measure achieved error rates by simulation");
  sim_cmd->add_option("scenario", sim_args.scenario, "Scenario file or bundled scenario name")->required();
  sim_cmd->add_option("--procedure,-p", sim_args.procedures, "Procedure(s); several means a paired comparison");
  sim_cmd->add_option("--mode", sim_args.mode,
                      "auto, standard, optional_stopping, forking_paths, family_partition, compare");
  sim_cmd->add_option("--level", sim_args.level, "Test level (1 - interval level for shrinkage)");
  sim_cmd->add_option("--output,-o", sim_args.output, "Report file (default stdout)");

  detail::CalibrateArgs cal_args;
  auto* cal_cmd = app.add_subcommand("calibrate", "Choose a fixed prior sigma by null simulation");
  cal_cmd->add_option("scenario", cal_args.scenario, "All-null scenario file or bundled name")->required();
  cal_cmd->add_option("--target-fpr", cal_args.target_fpr, "Desired false-positive rate");
  cal_cmd->add_option("--interval-level", cal_args.interval_level, "Posterior interval used as decision rule");
  cal_cmd->add_option("--verify-seed", cal_args.verify_seed, "Re-measure the FPR on fresh data from this seed");
  cal_cmd->add_option("--output,-o", cal_args.output, "Result file");

  detail::PlotArgs plot_args;
  auto* plot_cmd = app.add_subcommand("plot-fig2", "SVG of raw vs shrunken estimates");
  plot_cmd->add_option("--raw", plot_args.raw, "Table with estimate, se")->required();
  plot_cmd->add_option("--shrunk", plot_args.shrunk, "Output of shrink")->required();
  plot_cmd->add_option("--output,-o", plot_args.output, "SVG file")->required();

  detail::GenerateArgs gen_args;
  auto* gen_cmd = app.add_subcommand("generate", "Write one simulated replicate of a scenario as a table");
  gen_cmd->add_option("scenario", gen_args.scenario, "Scenario file or bundled name")->required();
  gen_cmd->add_flag("--raw", gen_args.raw, "Write raw data (outcome, group, value)");
  gen_cmd->add_option("--output,-o", gen_args.output, "Output table (default stdout)");

  auto* list_cmd = app.add_subcommand("scenarios", "List bundled scenarios, or print one");
  std::string show_name;
  list_cmd->add_option("name", show_name, "Scenario to print");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }
  if (*seed_opt) g.seed = seed_value;
  if (*reps_opt) g.replicates = replicates_value;

  try {
    if (*adjust_cmd) return detail::cmd_adjust(adjust_args, out, err);
    if (*shrink_cmd) return detail::cmd_shrink(shrink_args, out, err);
    if (*sim_cmd) return detail::cmd_simulate(sim_args, g, out, err);
    if (*cal_cmd) return detail::cmd_calibrate(cal_args, g, out, err);
    if (*plot_cmd) return detail::cmd_plot_fig2(plot_args, out);
    if (*gen_cmd) return detail::cmd_generate(gen_args, g, out, err);
    if (*list_cmd) {
      if (show_name.empty()) {
        for (const auto& [name, text] : bundled_scenarios()) {
          out << name << "\t" << text.substr(2, text.find('\n') - 2) << '\n';
        }
      } else {
        const auto& all = bundled_scenarios();
        const auto it = all.find(show_name);
        if (it == all.end()) throw InputError("no bundled scenario named '" + show_name + "'");
        out << it->second;
      }
      return kOk;
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInput;
  } catch (const UndefinedResult& e) {
    err << "error: " << e.what() << '\n';
    return kInput;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  }
  return kUsage;
}

}  // namespace fpc::cli
