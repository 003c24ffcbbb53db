#include <catch_amalgamated.hpp>

#include <sstream>

#include "fpcontrol/io/svg.hpp"
#include "fpcontrol/io/table.hpp"
#include "fpcontrol/stats/rng.hpp"

using namespace fpc;

TEST_CASE("delimiter detection and quoting") {
  std::istringstream tsv("label\tp\na\t0.1\nb\t0.2\n");
  const auto t = io::read_table(tsv);
  CHECK(t.delimiter == '\t');
  CHECK(t.numeric_column("p") == std::vector<double>{0.1, 0.2});

  std::istringstream csv("label,p\r\n\"x, y\",0.5\r\n\"say \"\"hi\"\"\",1\r\n");
  const auto c = io::read_table(csv);
  CHECK(c.string_column("label") == std::vector<std::string>{"x, y", "say \"hi\""});
  const auto again_text = io::to_string(c);
  std::istringstream again(again_text);
  CHECK(io::read_table(again).string_column("label") == c.string_column("label"));
}

TEST_CASE("diagnostics name row and column") {
  auto err = [](const std::string& text, const std::string& column) {
    std::istringstream in(text);
    try {
      io::read_table(in).numeric_column(column);
    } catch (const InputError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(err("p\n0.1\nabc\n", "p").find("row 3, column 'p'") != std::string::npos);
  CHECK(err("p\n0.1\n\"\"\n", "p").find("row 3") != std::string::npos);
  CHECK(err("p\nnan\n", "p").find("row 2") != std::string::npos);
  CHECK(err("p\n0.1\n", "q").find("missing required column 'q'") != std::string::npos);
  CHECK(err("a,b\n1,2,3\n", "a").find("line 2") != std::string::npos);
  CHECK(err("", "a").find("no header") != std::string::npos);
}

TEST_CASE("numeric round trip preserves values") {
  auto rng = stats::rng_stream(77, 0);
  io::Table t;
  t.columns = {"x"};
  std::vector<double> xs;
  for (int i = 0; i < 2000; ++i) {
    const double x = rng.normal() * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    xs.push_back(x);
    t.rows.push_back({io::format_double(x)});
  }
  std::istringstream in(io::to_string(t));
  const auto back = io::read_table(in).numeric_column("x");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(back[i] == xs[i]);
    CHECK(std::fabs(back[i] - xs[i]) <= 1e-12 * std::fabs(xs[i]));
  }
  CHECK(io::format_double(std::nan("")) == "NA");
}

TEST_CASE("svg structure") {
  std::vector<io::PlotPanel> panels(4);
  for (int k = 0; k < 4; ++k) {
    panels[k].title = "panel <" + std::to_string(k) + ">";
    for (int i = 0; i < 100; ++i) panels[k].points.push_back({0.01 * i - k, 0.01 * i - k - 0.3, 0.01 * i - k + 0.3});
  }
  std::ostringstream out;
  io::write_panels_svg(out, panels);
  const auto svg = out.str();
  auto count = [&](const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = svg.find(needle); pos != std::string::npos; pos = svg.find(needle, pos + 1)) ++n;
    return n;
  };
  CHECK(count("class=\"marker\"") == 400);
  CHECK(count("class=\"errbar\"") == 400);
  CHECK(count("<g class=\"panel\"") == 4);
  CHECK(svg.find("panel &lt;2&gt;") != std::string::npos);
  CHECK(svg.find("id=\"panel-D\"") != std::string::npos);

  std::vector<io::PlotPanel> empty{{"e", {}}};
  std::ostringstream sink;
  CHECK_THROWS_AS(io::write_panels_svg(sink, empty), InputError);
}
