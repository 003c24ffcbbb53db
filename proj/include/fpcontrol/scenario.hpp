#pragma once

// Generative description of a simulated experiment, its flat key-value text
// form, the bundled scenarios, and the data generators used by simlab and by
// sigma calibration.
//
// Text form: one `key = value` per line, `#` starts a comment. List values are
// comma separated; an item `v*n` repeats v n times, so `effect_vector =
// -2*5, 0*95` is five planted effects followed by 95 nulls. Keys are the field
// names of ScenarioSpec.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fpcontrol/errors.hpp"
#include "fpcontrol/stats/rng.hpp"
#include "fpcontrol/stats/tests.hpp"

namespace fpc {

struct ScenarioSpec {
  std::size_t m = 1;            // tests per family
  std::size_t groups = 2;       // 2: m independent two-group outcomes; >= 3: one k-group experiment
  std::size_t n_per_group = 10;
  std::vector<double> effect_vector;  // true effect per test, outcome-SD units; empty = all null
  std::vector<double> group_means;    // k-group designs only, outcome-SD units; empty = all zero
  double sd = 1.0;
  std::size_t looks = 1;
  std::vector<double> look_schedule;  // fractions of n; empty = equally spaced
  std::size_t analyst_variants = 1;
  std::vector<std::size_t> family_partition;  // empty = one family of size m
  std::size_t replicates = 10000;
  std::optional<std::uint64_t> master_seed;

  bool multi_group() const { return groups >= 3; }

  // True effect per test. For k-group designs the tests are the pairwise
  // comparisons (0,1), (0,2), ..., and effects are mean differences.
  std::vector<double> effects() const {
    if (multi_group()) {
      std::vector<double> means = group_means.empty() ? std::vector<double>(groups, 0.0) : group_means;
      std::vector<double> out;
      for (std::size_t i = 0; i < groups; ++i) {
        for (std::size_t j = i + 1; j < groups; ++j) out.push_back(means[i] - means[j]);
      }
      return out;
    }
    return effect_vector.empty() ? std::vector<double>(m, 0.0) : effect_vector;
  }

  std::vector<double> schedule() const {
    if (!look_schedule.empty()) return look_schedule;
    std::vector<double> s(looks);
    for (std::size_t j = 0; j < looks; ++j) {
      s[j] = static_cast<double>(j + 1) / static_cast<double>(looks);
    }
    return s;
  }

  // Sample size per group at each look (nested: later looks extend earlier ones).
  std::vector<std::size_t> look_sizes() const {
    std::vector<std::size_t> out;
    for (double f : schedule()) {
      out.push_back(static_cast<std::size_t>(std::lround(f * static_cast<double>(n_per_group))));
    }
    return out;
  }

  std::vector<std::size_t> partition() const {
    return family_partition.empty() ? std::vector<std::size_t>{m} : family_partition;
  }

  bool all_null() const {
    const auto e = effects();
    return std::all_of(e.begin(), e.end(), [](double v) { return v == 0.0; });
  }

  void validate() const {
    auto fail = [](const std::string& key, const std::string& why) {
      throw InputError("scenario key '" + key + "': " + why);
    };
    if (m < 1) fail("m", "must be at least 1");
    if (groups < 2) fail("groups", "must be at least 2");
    if (n_per_group < 2) fail("n_per_group", "must be at least 2");
    if (!(sd > 0.0) || !std::isfinite(sd)) fail("sd", "must be positive and finite");
    if (replicates < 1) fail("replicates", "must be at least 1");
    if (multi_group()) {
      if (m != groups * (groups - 1) / 2) {
        fail("m", "k-group designs test all pairs, so m must equal groups*(groups-1)/2 = " +
                      std::to_string(groups * (groups - 1) / 2));
      }
      if (!group_means.empty() && group_means.size() != groups) {
        fail("group_means", "length must equal groups");
      }
      if (!effect_vector.empty()) {
        if (effect_vector.size() != m) fail("effect_vector", "length must equal m");
        if (effect_vector != effects()) fail("effect_vector", "disagrees with group_means pairwise differences");
      }
    } else {
      if (!group_means.empty()) fail("group_means", "only valid when groups >= 3");
      if (!effect_vector.empty() && effect_vector.size() != m) fail("effect_vector", "length must equal m");
    }
    for (double e : effect_vector) {
      if (!std::isfinite(e)) fail("effect_vector", "non-finite entry");
    }
    if (looks < 1) fail("looks", "must be at least 1");
    if (!look_schedule.empty()) {
      if (look_schedule.size() != looks) fail("look_schedule", "length must equal looks");
      for (std::size_t j = 0; j < look_schedule.size(); ++j) {
        if (!(look_schedule[j] > 0.0)) fail("look_schedule", "fractions must be positive");
        if (j > 0 && !(look_schedule[j] > look_schedule[j - 1])) fail("look_schedule", "must be strictly increasing");
      }
      if (look_schedule.back() != 1.0) fail("look_schedule", "last look must be 1");
    }
    const auto sizes = look_sizes();
    if (sizes.front() < 2) fail("look_schedule", "first look leaves fewer than 2 observations per group");
    for (std::size_t j = 1; j < sizes.size(); ++j) {
      if (sizes[j] <= sizes[j - 1]) fail("look_schedule", "looks must add observations");
    }
    if (analyst_variants < 1) fail("analyst_variants", "must be at least 1");
    if (!family_partition.empty()) {
      std::size_t total = 0;
      for (std::size_t s : family_partition) {
        if (s == 0) fail("family_partition", "sub-family sizes must be positive");
        total += s;
      }
      if (total != m) fail("family_partition", "sizes must sum to m");
    }
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view text, const std::string& key) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InputError("scenario key '" + key + "': cannot parse '" + std::string(text) + "'");
  }
  return value;
}

template <class T>
std::vector<T> parse_list(std::string_view text, const std::string& key) {
  std::vector<T> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    const auto item = trim(text.substr(start, end - start));
    if (const auto star = item.find('*'); star != std::string_view::npos) {
      const T value = parse_number<T>(item.substr(0, star), key);
      const auto count = parse_number<std::size_t>(item.substr(star + 1), key);
      out.insert(out.end(), count, value);
    } else {
      out.push_back(parse_number<T>(item, key));
    }
    start = end + 1;
  }
  return out;
}

template <class T>
std::string format_number(T v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// Run-length form of a list: "0*95, -2*5".
template <class T>
std::string format_list(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    if (!out.empty()) out += ", ";
    out += format_number(v[i]);
    if (j - i > 1) out += "*" + std::to_string(j - i);
    i = j;
  }
  return out;
}

}  // namespace detail

inline ScenarioSpec parse_scenario(std::string_view text) {
  ScenarioSpec s;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = detail::trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("scenario line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key(detail::trim(view.substr(0, eq)));
    const auto value = detail::trim(view.substr(eq + 1));
    using detail::parse_list;
    using detail::parse_number;
    if (key == "m") s.m = parse_number<std::size_t>(value, key);
    else if (key == "groups") s.groups = parse_number<std::size_t>(value, key);
    else if (key == "n_per_group") s.n_per_group = parse_number<std::size_t>(value, key);
    else if (key == "effect_vector") s.effect_vector = parse_list<double>(value, key);
    else if (key == "group_means") s.group_means = parse_list<double>(value, key);
    else if (key == "sd") s.sd = parse_number<double>(value, key);
    else if (key == "looks") s.looks = parse_number<std::size_t>(value, key);
    else if (key == "look_schedule") s.look_schedule = parse_list<double>(value, key);
    else if (key == "analyst_variants") s.analyst_variants = parse_number<std::size_t>(value, key);
    else if (key == "family_partition") s.family_partition = parse_list<std::size_t>(value, key);
    else if (key == "replicates") s.replicates = parse_number<std::size_t>(value, key);
    else if (key == "master_seed") s.master_seed = parse_number<std::uint64_t>(value, key);
    else throw InputError("scenario key '" + key + "': unknown key");
  }
  s.validate();
  return s;
}

inline std::string to_text(const ScenarioSpec& s) {
  using detail::format_list;
  using detail::format_number;
  std::ostringstream out;
  out << "m = " << s.m << '\n';
  out << "groups = " << s.groups << '\n';
  out << "n_per_group = " << s.n_per_group << '\n';
  if (!s.effect_vector.empty()) out << "effect_vector = " << format_list(s.effect_vector) << '\n';
  if (!s.group_means.empty()) out << "group_means = " << format_list(s.group_means) << '\n';
  out << "sd = " << format_number(s.sd) << '\n';
  out << "looks = " << s.looks << '\n';
  if (!s.look_schedule.empty()) out << "look_schedule = " << format_list(s.look_schedule) << '\n';
  out << "analyst_variants = " << s.analyst_variants << '\n';
  if (!s.family_partition.empty()) out << "family_partition = " << format_list(s.family_partition) << '\n';
  out << "replicates = " << s.replicates << '\n';
  if (s.master_seed) out << "master_seed = " << *s.master_seed << '\n';
  return out.str();
}

/// Scenarios shipped with the tool, by name.
inline const std::map<std::string, std::string>& bundled_scenarios() {
  static const std::map<std::string, std::string> specs = {
      {"paper-fwer15",
       "# 15 independent null comparisons\n"
       "m = 15\ngroups = 2\nn_per_group = 10\neffect_vector = 0*15\nsd = 1\n"
       "replicates = 10000\nmaster_seed = 20210622\n"},
      {"paper-pfer2000",
       "# 2000 null tests; expected false-positive count alpha*m = 100\n"
       "m = 2000\ngroups = 2\nn_per_group = 10\nsd = 1\n"
       "replicates = 10000\nmaster_seed = 20210623\n"},
      {"fig2",
       "# 100 genes, 2 x 10 samples, five genes 2 SD lower in the first group\n"
       "m = 100\ngroups = 2\nn_per_group = 10\neffect_vector = -2*5, 0*95\nsd = 1\n"
       "replicates = 10000\nmaster_seed = 7\n"},
      {"fig2-null",
       "# 100 genes, 2 x 10 samples, no true effects\n"
       "m = 100\ngroups = 2\nn_per_group = 10\neffect_vector = 0*100\nsd = 1\n"
       "replicates = 10000\nmaster_seed = 7\n"},
      {"lsd-k3",
       "# three equal groups: all three pairwise comparisons null\n"
       "m = 3\ngroups = 3\nn_per_group = 10\ngroup_means = 0*3\nsd = 1\n"
       "replicates = 10000\nmaster_seed = 1003\n"},
      {"lsd-k6",
       "# six equal groups: 15 null pairwise comparisons\n"
       "m = 15\ngroups = 6\nn_per_group = 10\ngroup_means = 0*6\nsd = 1\n"
       "replicates = 10000\nmaster_seed = 1006\n"},
      {"lsd-k3-partial",
       "# one group far from two equal ones: a single null pair behind a gate that always opens\n"
       "m = 3\ngroups = 3\nn_per_group = 10\ngroup_means = 0, 0, 10\nsd = 1\n"
       "replicates = 10000\nmaster_seed = 1013\n"},
      {"lsd-k6-partial",
       "# five equal groups and one far away: 10 null pairs behind a gate that always opens\n"
       "m = 15\ngroups = 6\nn_per_group = 10\ngroup_means = 0*5, 10\nsd = 1\n"
       "replicates = 10000\nmaster_seed = 1016\n"},
      {"snk-k5",
       "# partial null: two pairs of equal means, clusters far apart\n"
       "m = 10\ngroups = 5\nn_per_group = 10\ngroup_means = 0, 0, 10, 10, 20\nsd = 1\n"
       "replicates = 10000\nmaster_seed = 1105\n"},
      {"looks-5",
       "# one null comparison inspected after every 10 subjects per group\n"
       "m = 1\ngroups = 2\nn_per_group = 50\nsd = 1\nlooks = 5\n"
       "look_schedule = 0.2, 0.4, 0.6, 0.8, 1\nreplicates = 10000\nmaster_seed = 505\n"},
      {"forking-5",
       "# one null comparison analysed five ways\n"
       "m = 1\ngroups = 2\nn_per_group = 20\nsd = 1\nanalyst_variants = 5\n"
       "replicates = 10000\nmaster_seed = 555\n"},
      {"partition-10x10",
       "# 100 null tests corrected as one family or as ten families of ten\n"
       "m = 100\ngroups = 2\nn_per_group = 10\nsd = 1\nfamily_partition = 10*10\n"
       "replicates = 10000\nmaster_seed = 1010\n"},
      {"calib-null",
       "# null design for sigma calibration: 20 outcomes, 2 x 10 samples\n"
       "m = 20\ngroups = 2\nn_per_group = 10\nsd = 1\n"
       "replicates = 4000\nmaster_seed = 4242\n"},
  };
  return specs;
}

inline std::optional<ScenarioSpec> bundled_scenario(const std::string& name) {
  const auto& all = bundled_scenarios();
  const auto it = all.find(name);
  if (it == all.end()) return std::nullopt;
  return parse_scenario(it->second);
}

// ---------------------------------------------------------------------------
// Data generation

/// Draws one two-group outcome: b ~ N(0, sd), a ~ N(effect * sd, sd), so the
/// true mean difference a - b is effect * sd.
inline void draw_two_groups(stats::RngStream& rng, double effect, double sd, std::size_t n,
                            std::vector<double>& a, std::vector<double>& b) {
  a.resize(n);
  b.resize(n);
  for (auto& v : a) v = rng.normal(effect * sd, sd);
  for (auto& v : b) v = rng.normal(0.0, sd);
}

inline std::vector<stats::GroupSample> draw_groups(const ScenarioSpec& spec, stats::RngStream& rng) {
  std::vector<stats::GroupSample> out(spec.groups);
  for (std::size_t g = 0; g < spec.groups; ++g) {
    const double mu = spec.group_means.empty() ? 0.0 : spec.group_means[g];
    out[g].group_label = "g" + std::to_string(g + 1);
    out[g].values.resize(spec.n_per_group);
    for (auto& v : out[g].values) v = rng.normal(mu * spec.sd, spec.sd);
  }
  return out;
}

}  // namespace fpc
