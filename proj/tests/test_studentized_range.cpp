#include <catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "fpcontrol/stats/special.hpp"
#include "fpcontrol/studentized_range.hpp"

using namespace fpc;
using Catch::Matchers::WithinAbs;

namespace {

// Upper quantile of max-min of k standard normals over an independent
// sqrt(chi2_df / df), from `draws` simulated values.
double mc_studentized_range(double level, int k, double df, int draws, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  std::chi_squared_distribution<double> chi(df);
  std::vector<double> q(draws);
  for (auto& v : q) {
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < k; ++i) {
      const double x = z(gen);
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    v = (hi - lo) / std::sqrt(chi(gen) / df);
  }
  const auto pos = static_cast<std::size_t>((1.0 - level) * draws);
  std::nth_element(q.begin(), q.begin() + pos, q.end());
  return q[pos];
}

}  // namespace

TEST_CASE("k = 2 reduces to sqrt(2) times the normal quantile") {
  CHECK_THAT(studentized_range_quantile(0.05, 2, 1e6), WithinAbs(2.772, 0.01));
  CHECK_THAT(studentized_range_quantile(0.05, 2, 1e6), WithinAbs(std::sqrt(2.0) * 1.959964, 1e-3));
  // With finite df, q(2) = sqrt(2) * t critical.
  for (double df : {5.0, 12.0, 40.0}) {
    CHECK_THAT(studentized_range_quantile(0.05, 2, df),
               WithinAbs(std::sqrt(2.0) * stats::student_t_quantile_upper(0.025, df), 1e-6));
  }
}

TEST_CASE("k = 3, df = 10 against a Monte Carlo oracle") {
  const double mc = mc_studentized_range(0.05, 3, 10.0, 1000000, 0x5eed);
  CHECK_THAT(studentized_range_quantile(0.05, 3, 10.0), WithinAbs(mc, 0.02));
}

TEST_CASE("other cells against Monte Carlo") {
  CHECK_THAT(studentized_range_quantile(0.05, 5, 45.0), WithinAbs(mc_studentized_range(0.05, 5, 45.0, 400000, 1), 0.03));
  CHECK_THAT(studentized_range_quantile(0.01, 4, 20.0), WithinAbs(mc_studentized_range(0.01, 4, 20.0, 400000, 2), 0.06));
}

TEST_CASE("quantile increases with k") {
  double prev = 0.0;
  for (int k = 2; k <= 10; ++k) {
    const double q = studentized_range_quantile(0.05, k, 20.0);
    CHECK(q > prev);
    prev = q;
  }
}

TEST_CASE("cdf is a distribution function") {
  CHECK(studentized_range_cdf(0.0, 4, 10.0) == 0.0);
  double prev = 0.0;
  for (double q = 0.25; q < 12.0; q += 0.25) {
    const double c = studentized_range_cdf(q, 4, 10.0);
    CHECK(c >= prev - 1e-12);
    prev = c;
  }
  CHECK(prev > 0.999);
}

TEST_CASE("cache persists cells to a versioned text file") {
  const auto path = std::filesystem::temp_directory_path() / "fpcontrol_qcache_test.txt";
  std::filesystem::remove(path);
  StudentizedRangeCache cache;
  cache.attach_file(path);
  const double q = cache.quantile(0.05, 4, 18.0);
  cache.quantile(0.05, 4, 18.0);
  CHECK(cache.size() == 1);
  {
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == StudentizedRangeCache::kHeader);
  }
  StudentizedRangeCache reloaded;
  reloaded.attach_file(path);
  CHECK(reloaded.size() == 1);
  CHECK(reloaded.quantile(0.05, 4, 18.0) == q);

  // An unknown version is ignored and regenerated.
  {
    std::ofstream out(path);
    out << "# some other cache v9\nlevel,k,df,q\n0.05,4,18,99\n";
  }
  StudentizedRangeCache stale;
  stale.attach_file(path);
  CHECK(stale.size() == 0);
  CHECK(stale.quantile(0.05, 4, 18.0) == q);
  std::filesystem::remove(path);
}

TEST_CASE("bad arguments") {
  CHECK_THROWS_AS(studentized_range_quantile_uncached(0.05, 1, 10.0), InputError);
  CHECK_THROWS_AS(studentized_range_quantile_uncached(1.5, 3, 10.0), InputError);
}
