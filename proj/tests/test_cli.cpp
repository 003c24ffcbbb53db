#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fpcontrol/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "fpcontrol");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = fpc::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "fpcontrol_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  const auto p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("adjust: padded bonferroni example") {
  const auto in = write("one.csv", "label,p\nx,0.0021\n");
  const auto r = run({"adjust", in, "--method", "bonferroni", "--m-override", "15"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "label,p,adjusted_p,rejected\nx,0.0021,0.0315,1\n");
  CHECK(r.err.find("m=15 method=bonferroni") != std::string::npos);
}

TEST_CASE("adjust: errors") {
  const auto empty = write("empty.csv", "p\n");
  const auto out = (scratch() / "should_not_exist.csv").string();
  auto r = run({"adjust", empty, "-o", out});
  CHECK(r.code == fpc::cli::kInput);
  CHECK_FALSE(fs::exists(out));

  const auto in = write("two.csv", "p\n0.01\n0.5\n");
  r = run({"adjust", in, "--method", "tukey"});
  CHECK(r.code == fpc::cli::kInput);
  CHECK(r.err.find("bonferroni, sidak, holm, bh, by") != std::string::npos);

  const auto bad = write("bad.csv", "p\n0.01\n1.5\n");
  r = run({"adjust", bad});
  CHECK(r.code == fpc::cli::kInput);
  CHECK(r.err.find("row 3, column 'p'") != std::string::npos);

  const auto text = write("text.csv", "p\n0.01\nx\n");
  CHECK(run({"adjust", text}).err.find("row 3") != std::string::npos);

  CHECK(run({"adjust"}).code == fpc::cli::kUsage);
  CHECK(run({"frobnicate"}).code == fpc::cli::kUsage);
  CHECK(run({"adjust", in, "-o", (scratch() / "no_dir" / "x.csv").string()}).code == fpc::cli::kIo);
}

TEST_CASE("adjust: alpha percentage on null p-values") {
  auto rng = fpc::stats::rng_stream(1000, 0);
  std::string text = "p\n";
  for (int i = 0; i < 1000; ++i) text += fpc::io::format_double(rng.uniform()) + "\n";
  const auto in = write("uniform.csv", text);
  const auto r = run({"adjust", in, "--method", "none"});
  REQUIRE(r.code == 0);
  const auto pos = r.err.find("alpha%=");
  REQUIRE(pos != std::string::npos);
  const double ap = std::stod(r.err.substr(pos + 7));
  CHECK(std::fabs(ap - 100.0) < 25.0);
}

TEST_CASE("adjust: fixed sequence follows row order") {
  const auto in = write("seq.csv", "p\n0.01\n0.2\n0.01\n");
  const auto r = run({"adjust", in, "--method", "fixed_sequence"});
  CHECK(r.out == "p,rejected\n0.01,1\n0.2,0\n0.01,0\n");
}

TEST_CASE("shrink: fixed prior and sidecar") {
  const auto in = write("effects.csv", "estimate,se\n2,1\n-0.5,0.25\n");
  const auto out = (scratch() / "shrunk.csv").string();
  const auto r = run({"shrink", in, "--fixed", "1", "-o", out});
  REQUIRE(r.code == 0);
  const auto table = slurp(out);
  CHECK(table.starts_with("estimate,se,posterior_mean,posterior_sd,prob_null,lo95,hi95\n2,1,1,"));
  CHECK(table.find(",NA,") != std::string::npos);
  const auto side = slurp(out + ".summary");
  CHECK(side.find("prior=fixed_normal\nsigma=1\n") == 0);

  const auto again = (scratch() / "shrunk2.csv").string();
  run({"shrink", in, "--fixed", "1", "-o", again});
  CHECK(slurp(again) == table);
}

TEST_CASE("shrink: minimum rows for fitted priors") {
  const auto in = write("two_effects.csv", "estimate,se\n2,1\n-0.5,0.25\n");
  auto r = run({"shrink", in, "--eb"});
  CHECK(r.code == fpc::cli::kInput);
  CHECK(r.err.find("--fixed") != std::string::npos);
  r = run({"shrink", in, "--spike-slab"});
  CHECK(r.code == fpc::cli::kInput);
  CHECK(r.err.find("--fixed") != std::string::npos);
  CHECK(run({"shrink", in}).code == fpc::cli::kInput);
  CHECK(run({"shrink", in, "--eb", "--fixed", "1"}).code == fpc::cli::kInput);
}

TEST_CASE("generate, shrink and plot the planted design") {
  const auto raw = (scratch() / "fig2.csv").string();
  REQUIRE(run({"generate", "fig2", "-o", raw}).code == 0);
  const auto shrunk = (scratch() / "fig2_shrunk.csv").string();
  REQUIRE(run({"shrink", raw, "--spike-slab", "-o", shrunk}).code == 0);
  const auto side = slurp(shrunk + ".summary");
  const auto pos = side.find("pi0=");
  REQUIRE(pos != std::string::npos);
  const double pi0 = std::stod(side.substr(pos + 4));
  CHECK(pi0 > 0.9);
  CHECK(pi0 < 1.0);

  const auto svg = (scratch() / "fig2.svg").string();
  REQUIRE(run({"plot-fig2", "--raw", raw, "--shrunk", shrunk, "-o", svg}).code == 0);
  const auto text = slurp(svg);
  std::size_t markers = 0;
  for (auto p = text.find("class=\"marker\""); p != std::string::npos; p = text.find("class=\"marker\"", p + 1)) ++markers;
  CHECK(markers == 200);

  const auto shorter = write("short.csv", "estimate,se\n1,1\n");
  CHECK(run({"plot-fig2", "--raw", shorter, "--shrunk", shrunk, "-o", svg}).code == fpc::cli::kInput);
  const auto none = write("none.csv", "estimate,se\n");
  CHECK(run({"plot-fig2", "--raw", none, "--shrunk", none, "-o", svg}).code == fpc::cli::kInput);
}

TEST_CASE("shrink: raw-data input runs the two-step pipeline") {
  const auto raw = (scratch() / "fig2_raw.csv").string();
  REQUIRE(run({"generate", "fig2", "--raw", "-o", raw}).code == 0);
  const auto summaries = (scratch() / "fig2_sum.csv").string();
  REQUIRE(run({"generate", "fig2", "-o", summaries}).code == 0);
  const auto a = run({"shrink", raw, "--raw", "--spike-slab"});
  const auto b = run({"shrink", summaries, "--spike-slab"});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  // Same estimates either way, so the same fitted prior.
  CHECK(a.err == b.err);
}

TEST_CASE("simulate: seeded runs are byte-identical") {
  const auto a = run({"--seed", "11", "--replicates", "300", "simulate", "paper-fwer15", "-p", "none"});
  const auto b = run({"--seed", "11", "--replicates", "300", "simulate", "paper-fwer15", "-p", "none"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("# seed=11\n") != std::string::npos);
  CHECK(a.err.find("seed=11") != std::string::npos);

  const auto c = run({"--replicates", "300", "simulate", "fig2", "-p", "bonferroni", "-p", "two-step"});
  const auto d = run({"--replicates", "300", "simulate", "fig2", "-p", "bonferroni", "-p", "two-step"});
  CHECK(c.out == d.out);
  CHECK(c.out.find("baseline,other,metric,difference,mc_se") != std::string::npos);

  for (const char* spec : {"looks-5", "forking-5", "partition-10x10", "lsd-k6"}) {
    const std::string proc = std::string(spec) == "lsd-k6" ? "lsd" : "bonferroni";
    const auto x = run({"--replicates", "100", "simulate", spec, "-p", proc});
    const auto y = run({"--replicates", "100", "simulate", spec, "-p", proc});
    INFO(spec << ": " << x.err);
    CHECK(x.code == 0);
    CHECK(x.out == y.out);
  }
}

TEST_CASE("simulate: unseeded runs draw and print a seed") {
  const auto spec = write("unseeded.txt", "m = 3\nreplicates = 50\n");
  const auto r = run({"simulate", spec});
  REQUIRE(r.code == 0);
  CHECK(r.err.find("drawn from system entropy") != std::string::npos);
}

TEST_CASE("simulate: scenario errors quote the key") {
  const auto spec = write("broken.txt", "m = 3\neffect_vector = 1, 0\n");
  const auto r = run({"simulate", spec});
  CHECK(r.code == fpc::cli::kInput);
  CHECK(r.err.find("'effect_vector'") != std::string::npos);
  CHECK(run({"simulate", "no-such-scenario"}).code == fpc::cli::kInput);
  CHECK(run({"--replicates", "10", "simulate", "paper-fwer15", "-p", "snk"}).code == fpc::cli::kInput);
}

TEST_CASE("calibrate") {
  const auto out = (scratch() / "calib.txt").string();
  const auto a = run({"--replicates", "400", "--seed", "3", "calibrate", "calib-null", "--target-fpr", "0.05",
                      "-o", out, "--verify-seed", "99"});
  REQUIRE(a.code == 0);
  CHECK(slurp(out) == a.out);
  CHECK(a.out.find("verify_fpr=") != std::string::npos);
  const auto b = run({"--replicates", "400", "--seed", "3", "calibrate", "calib-null", "--target-fpr", "0.05"});
  CHECK(a.out.substr(0, a.out.find('\n')) == b.out.substr(0, b.out.find('\n')));

  const auto v = run({"--verbose", "--replicates", "400", "--seed", "3", "calibrate", "calib-null"});
  CHECK(v.err.find("bisection sigma=") != std::string::npos);

  const auto far = run({"--replicates", "400", "--seed", "3", "calibrate", "calib-null", "--target-fpr", "0.99"});
  CHECK(far.code == fpc::cli::kNumerical);
  CHECK(far.err.find("reachable range") != std::string::npos);
}

TEST_CASE("scenario listing") {
  const auto r = run({"scenarios"});
  CHECK(r.code == 0);
  CHECK(r.out.find("paper-fwer15\t") != std::string::npos);
  CHECK(run({"scenarios", "fig2"}).out.find("effect_vector = -2*5, 0*95") != std::string::npos);
}
