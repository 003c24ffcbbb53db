#include "fpcontrol/cli.hpp"

int main(int argc, char** argv) {
  const char* cache = std::getenv("FPCONTROL_QTUKEY_CACHE");
  if (cache && *cache) fpc::StudentizedRangeCache::global().attach_file(cache);
  return fpc::cli::run_cli(argc, argv);
}
