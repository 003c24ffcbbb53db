// False positive rate under optional stopping: the same null comparison
// inspected 1, 2, 5 and 10 times as data accumulate, stopping at p < 0.05.
#include <cstdio>

#include "fpcontrol/fpcontrol.hpp"

int main() {
  for (int looks : {1, 2, 5, 10}) {
    std::string text = "m = 1\ngroups = 2\nn_per_group = 50\nsd = 1\nreplicates = 4000\nmaster_seed = 42\n";
    text += "looks = " + std::to_string(looks) + "\nlook_schedule = ";
    for (int k = 1; k <= looks; ++k) text += (k > 1 ? ", " : "") + fpc::detail::format_number(double(k) / looks);
    const auto spec = fpc::parse_scenario(text);
    const auto r = fpc::run_optional_stopping(spec, 0.05);
    std::printf("looks=%-2d FPR %.4f (MC-SE %.4f)\n", looks, r.per_comparison_fpr.value, r.per_comparison_fpr.mc_se);
  }
}
