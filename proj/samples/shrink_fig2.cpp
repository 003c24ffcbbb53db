// Two-step shrinkage on the bundled 100-gene design: five genes carry a
// -2 SD effect, the rest are null.
#include <cmath>
#include <cstdio>

#include "fpcontrol/fpcontrol.hpp"

int main() {
  const auto spec = *fpc::bundled_scenario("fig2");
  auto rng = fpc::stats::rng_stream(*spec.master_seed, 0);
  const auto effects = spec.effects();

  std::vector<std::pair<fpc::stats::GroupSample, fpc::stats::GroupSample>> outcomes;
  std::vector<double> a, b;
  for (std::size_t i = 0; i < spec.m; ++i) {
    fpc::draw_two_groups(rng, effects[i], spec.sd, spec.n_per_group, a, b);
    outcomes.emplace_back(fpc::stats::GroupSample(a, "gene" + std::to_string(i + 1)), fpc::stats::GroupSample(b));
  }

  const auto r = fpc::two_step(outcomes);
  std::printf("pi0=%.3f sigma=%.3f (%zu EM iterations)\n", *r.prior.pi0, r.prior.sigma, r.prior.fit.iterations);
  for (std::size_t i = 0; i < r.summaries.size(); ++i) {
    const auto& s = r.shrunken[i];
    if (i < 5 || std::fabs(r.summaries[i].theta_hat) > 1.5) {
      std::printf("%-7s raw %+.3f  shrunk %+.3f  P(null) %.3f\n", r.summaries[i].label.c_str(),
                  r.summaries[i].theta_hat, s.posterior_mean, *s.prob_null);
    }
  }
}
