#pragma once

// Distribution of the studentized range Q = (max - min of k iid normals) / s,
// with s^2 an independent chi-square(df)/df variance estimate.
//
//   P(Q <= q) = ∫ f_s(s) W(q s) ds,
//   W(w)      = k ∫ φ(z) [Φ(z) - Φ(z - w)]^(k-1) dz   (range of k normals)
//
// Both integrals use fixed-order Gauss–Legendre panels. Quantiles are found by
// root bracketing and memoized in a process-wide cache that can be backed by a
// delimited-text file.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>

#include "fpcontrol/errors.hpp"
#include "fpcontrol/stats/special.hpp"

namespace fpc {

namespace detail {

using Gauss16 = boost::math::quadrature::gauss<double, 16>;

template <class F>
double panel_integrate(F&& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    sum += Gauss16::integrate(f, a + i * h, a + (i + 1) * h);
  }
  return sum;
}

// P(range of k standard normals <= w).
inline double normal_range_cdf(double w, int k) {
  if (w <= 0.0) return 0.0;
  auto integrand = [w, k](double z) {
    const double inner = stats::normal_cdf(z) - stats::normal_cdf(z - w);
    if (inner <= 0.0) return 0.0;
    return stats::normal_pdf(z) * std::pow(inner, k - 1);
  };
  // φ(z) is negligible outside ±8.5; the bracket vanishes for z < -8.5.
  const double v = k * panel_integrate(integrand, -8.5, 8.5, 24);
  return std::min(1.0, std::max(0.0, v));
}

}  // namespace detail

inline double studentized_range_cdf(double q, int k, double df) {
  if (k < 2) throw InputError("studentized range: k must be at least 2");
  if (!(df > 0.0)) throw InputError("studentized range: df must be positive");
  if (q <= 0.0) return 0.0;
  if (df >= 1e7) return detail::normal_range_cdf(q, k);

  // Density of s = sqrt(chi2_df / df).
  const double half = 0.5 * df;
  const double log_norm = std::log(2.0 * df) - half * std::log(2.0) - std::lgamma(half);
  auto s_density = [df, half, log_norm](double s) {
    if (s <= 0.0) return 0.0;
    const double x = df * s * s;
    return std::exp(log_norm + std::log(s) + (half - 1.0) * std::log(x) - 0.5 * x);
  };
  // Wilson–Hilferty bounds at ±9 standard deviations of the cube-root scale.
  const double c = 2.0 / (9.0 * df);
  const double lo_cube = 1.0 - c - 9.0 * std::sqrt(c);
  const double hi_cube = 1.0 - c + 9.0 * std::sqrt(c);
  const double s_lo = lo_cube > 0.0 ? std::sqrt(lo_cube * lo_cube * lo_cube) : 0.0;
  const double s_hi = std::sqrt(hi_cube * hi_cube * hi_cube);

  auto integrand = [&](double s) { return s_density(s) * detail::normal_range_cdf(q * s, k); };
  const double v = detail::panel_integrate(integrand, s_lo, s_hi, 40);
  return std::min(1.0, std::max(0.0, v));
}

/// Key of one cached quantile: upper-tail level, number of means, error df.
struct StudentizedRangeKey {
  double level;
  int k;
  double df;
  auto operator<=>(const StudentizedRangeKey&) const = default;
};

/// Memo of studentized-range quantiles, optionally persisted as
///
///   # fpcontrol studentized-range cache v1
///   level,k,df,q
///   0.05,3,10,3.8767...
///
/// Reads are shared; the first computation of a cell is done under the lock.
class StudentizedRangeCache {
 public:
  static constexpr const char* kHeader = "# fpcontrol studentized-range cache v1";

  static StudentizedRangeCache& global() {
    static StudentizedRangeCache cache;
    return cache;
  }

  // Loads `path` if it exists; new cells are appended to it from then on.
  void attach_file(const std::filesystem::path& path) {
    std::lock_guard lock(mutex_);
    path_ = path;
    if (std::filesystem::exists(path)) load_locked(path);
  }

  double quantile(double level, int k, double df);

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return table_.size();
  }

  void clear() {
    std::lock_guard lock(mutex_);
    table_.clear();
    path_.reset();
  }

 private:
  void load_locked(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::string line;
    if (!std::getline(in, line) || line != kHeader) {
      // Unknown version or corrupt: ignore and regenerate.
      return;
    }
    std::getline(in, line);  // column header
    while (std::getline(in, line)) {
      std::istringstream row(line);
      std::string cell[4];
      for (auto& c : cell) std::getline(row, c, ',');
      try {
        StudentizedRangeKey key{std::stod(cell[0]), std::stoi(cell[1]), std::stod(cell[2])};
        table_[key] = std::stod(cell[3]);
      } catch (const std::exception&) {
        continue;
      }
    }
  }

  void append_locked(const StudentizedRangeKey& key, double q) {
    if (!path_) return;
    const bool fresh = !std::filesystem::exists(*path_) || std::filesystem::file_size(*path_) == 0;
    std::ofstream out(*path_, std::ios::app);
    if (!out) return;
    if (fresh) out << kHeader << "\nlevel,k,df,q\n";
    char buf[4][32];
    auto put = [](char* b, double v) { *std::to_chars(b, b + 31, v).ptr = '\0'; };
    put(buf[0], key.level);
    put(buf[2], key.df);
    put(buf[3], q);
    out << buf[0] << ',' << key.k << ',' << buf[2] << ',' << buf[3] << '\n';
  }

  mutable std::mutex mutex_;
  std::map<StudentizedRangeKey, double> table_;
  std::optional<std::filesystem::path> path_;
};

/// Upper-`level` quantile of the studentized range: P(Q > q) = level.
inline double studentized_range_quantile_uncached(double level, int k, double df) {
  if (!(level > 0.0 && level < 1.0)) throw InputError("studentized range: level outside (0,1)");
  if (k < 2) throw InputError("studentized range: k must be at least 2");
  const double target = 1.0 - level;
  auto f = [&](double q) { return studentized_range_cdf(q, k, df) - target; };
  double lo = 0.0;
  double hi = 4.0;
  while (f(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw NumericalError("studentized range: quantile bracket overflow");
  }
  std::uintmax_t iters = 200;
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(40),
                                                  iters);
  return 0.5 * (a + b);
}

inline double StudentizedRangeCache::quantile(double level, int k, double df) {
  const StudentizedRangeKey key{level, k, df};
  std::lock_guard lock(mutex_);
  if (auto it = table_.find(key); it != table_.end()) return it->second;
  const double q = studentized_range_quantile_uncached(level, k, df);
  table_[key] = q;
  append_locked(key, q);
  return q;
}

inline double studentized_range_quantile(double level, int k, double df) {
  return StudentizedRangeCache::global().quantile(level, k, df);
}

}  // namespace fpc
