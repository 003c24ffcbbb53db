// Adjust one family of p-values several ways and compare what survives.
#include <cstdio>

#include "fpcontrol/fpcontrol.hpp"

int main() {
  fpc::PValueFamily family;
  family.p = {0.001, 0.008, 0.012, 0.031, 0.044, 0.07, 0.2, 0.41, 0.66, 0.9};

  for (auto m : {fpc::Method::none, fpc::Method::bonferroni, fpc::Method::holm, fpc::Method::bh, fpc::Method::by}) {
    const auto out = fpc::adjust(family, m, 0.05);
    std::printf("%-10s rejected %zu of %zu\n", std::string(fpc::method_name(m)).c_str(), out.n_rejected(),
                family.p.size());
  }
  std::printf("FWER of 10 unadjusted tests at 0.05: %.4f\n", fpc::fwer(0.05, 10));
  std::printf("Bonferroni per-test threshold: %.4f\n", fpc::bonferroni_threshold(0.05, 10));
}
