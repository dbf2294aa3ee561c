#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "tvpdr/format.hpp"
#include "tvpdr/persist.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kData = std::string(TVPDR_TEST_DATA_DIR) + "/macro.csv";
const std::string kSchema = std::string(TVPDR_TEST_DATA_DIR) + "/schema.txt";

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = tvpdr::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tvpdr_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<std::string> estimate_args(const fs::path& out, const std::string& seed = "3") {
  return {"estimate", "--data", kData, "--schema", kSchema, "--target", "infl", "--price", "cpi",
          "--derive", "ugap=urate-ustar", "--covariates", "ugap,gdp", "--grid-step", "0.5",
          "--iters", "120", "--burnin", "40", "--seed", seed, "--out", out.string()};
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

// Shared estimate directory for the consumer commands.
const fs::path& estimate_dir() {
  static const fs::path dir = [] {
    const fs::path d = scratch("shared");
    const Run r = run(estimate_args(d));
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run({"estimate", "--target", "infl", "--covariates", "u", "--out", "x"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"estimate", "--data", kData, "--target", "infl", "--covariates", "u", "--out", "x",
             "--monotone", "maybe"})
            .code == 2);
  const Run help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("estimate") != std::string::npos);
}

TEST_CASE("estimate defaults are recorded in the manifest") {
  const Run r = run({"estimate", "--data", kData, "--target", "infl", "--price", "cpi",
                     "--covariates", "urate", "--out", scratch("dry").string(), "--dry-run"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\niterations=10000\n") != std::string::npos);
  CHECK(("\n" + r.out).find("\nburnin=5000\n") != std::string::npos);
  CHECK(r.out.find("config.monotone=on") != std::string::npos);
  CHECK(r.out.find("config.slope_step=conditional") != std::string::npos);
  CHECK(r.out.find("config_sha256=") != std::string::npos);
  CHECK(r.out.find("data_sha256=") != std::string::npos);
  CHECK(r.out.find("code_version=") != std::string::npos);
}

TEST_CASE("module errors give a diagnostic and a nonzero exit") {
  auto args = estimate_args(scratch("bad"));
  args[12] = "nosuch";  // covariates
  const Run r = run(args);
  CHECK(r.code == 1);
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("same seed gives byte-identical draw files") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  REQUIRE(run(estimate_args(a)).code == 0);
  REQUIRE(run(estimate_args(b)).code == 0);
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto name = entry.path().filename();
    CHECK(tvpdr::read_text(entry.path()) == tvpdr::read_text(b / name));
    ++files;
  }
  CHECK(files > 4);
  const fs::path c = scratch("det_c");
  REQUIRE(run(estimate_args(c, "4")).code == 0);
  CHECK(tvpdr::read_text(a / "beta_1.f64") != tvpdr::read_text(c / "beta_1.f64"));
  CHECK(run(estimate_args(a)).code == 1);  // write-once
}

TEST_CASE("risk output columns") {
  const Run r = run({"risk", "--estimate", estimate_dir().string(), "--lower", "1", "--upper", "3"});
  REQUIRE(r.code == 0);
  CHECK(first_line(r.out) == "date\tDR\t|DR|\tEIR");
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto cells = tvpdr::split(line, '\t');
    REQUIRE(cells.size() == 4);
    const double dr = tvpdr::parse_number(cells[1]), eir = tvpdr::parse_number(cells[3]);
    CHECK(dr <= 0.0);
    CHECK(tvpdr::parse_number(cells[2]) == -dr);
    CHECK(-dr + eir <= 1.0 + 1e-12);
  }
}

TEST_CASE("forecast output") {
  const Run r = run({"forecast", "--estimate", estimate_dir().string()});
  REQUIRE(r.code == 0);
  CHECK(first_line(r.out) == "date\tquantity\targ\tvalue\tcensored");
  CHECK(r.out.find("\tq\t0.95\t") != std::string::npos);
  CHECK(run({"forecast", "--estimate", estimate_dir().string()}).out == r.out);
  const Run at = run({"forecast", "--estimate", estimate_dir().string(), "--at", "2000Q1"});
  CHECK(at.code == 0);
  CHECK(at.out.find("2000Q2\tF\t") != std::string::npos);
}

TEST_CASE("counterfactual rows") {
  const Run r = run({"counterfactual", "--estimate", estimate_dir().string(), "--var", "ugap",
                     "--delta", "5", "--quarters", "2010Q1:2010Q4"});
  REQUIRE(r.code == 0);
  CHECK(first_line(r.out) == "date\ttarget_date\trow\tMean\tP(>3)\tP(>4)\tP(>5)\tP(>6)");
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 12);
  CHECK(r.out.find("2010Q1\t2010Q2\tbaseline") != std::string::npos);
  CHECK(r.out.find("\tcounterfactual\t") != std::string::npos);
  CHECK(run({"counterfactual", "--estimate", estimate_dir().string(), "--var", "ugap", "--delta",
             "5", "--quarters", "1950Q1:1950Q4"})
            .code == 1);
}

TEST_CASE("plotdata") {
  const fs::path empty = scratch("empty.tsv");
  tvpdr::write_text(empty, "");
  const Run r = run({"plotdata", "--input", empty.string()});
  CHECK(r.code == 0);
  CHECK(r.out == "series\tdate\tvalue\n");
  const fs::path risk = scratch("risk.tsv");
  REQUIRE(run({"risk", "--estimate", estimate_dir().string(), "--out", risk.string()}).code == 0);
  const Run p = run({"plotdata", "--input", risk.string()});
  REQUIRE(p.code == 0);
  CHECK(p.out.find("\nEIR\t1990Q3\t") != std::string::npos);
  tvpdr::write_text(empty, "date\tDR\n");
  CHECK(run({"plotdata", "--input", empty.string()}).out == "series\tdate\tvalue\n");
}

TEST_CASE("evaluate writes a resumable record table") {
  const fs::path table = scratch("eval.tsv");
  const std::vector<std::string> args{"evaluate",   "--estimate", estimate_dir().string(),
                                      "--initial-end", "2017Q4", "--refit-every", "4",
                                      "--iters",    "60",         "--burnin", "20",
                                      "--out",      table.string()};
  const Run first = run(args);
  REQUIRE(first.code == 0);
  const std::string text = tvpdr::read_text(table);
  CHECK(first_line(text).rfind("date\trealized\tpit\tqs_05\tqs_95\tF(", 0) == 0);
  const Run again = run(args);
  REQUIRE(again.code == 0);
  CHECK(tvpdr::read_text(table) == text);
}

TEST_CASE("tampering is refused") {
  const fs::path dir = scratch("tamper");
  REQUIRE(run(estimate_args(dir)).code == 0);
  SUBCASE("draw file") {
    {
      std::fstream f(dir / "beta_2.f64", std::ios::in | std::ios::out | std::ios::binary);
      f.seekp(16);
      f.put('\x01');
    }
    const Run r = run({"risk", "--estimate", dir.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("hash mismatch") != std::string::npos);
  }
  SUBCASE("manifest configuration") {
    std::string m = tvpdr::read_text(dir / "manifest");
    const auto at = m.find("config.horizon=1");
    REQUIRE(at != std::string::npos);
    m.replace(at, 16, "config.horizon=2");
    tvpdr::write_text(dir / "manifest", m);
    const Run r = run({"forecast", "--estimate", dir.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("hash mismatch") != std::string::npos);
  }
  SUBCASE("input data drift") {
    const fs::path copy = scratch("macro_copy.csv");
    fs::copy_file(kData, copy);
    const fs::path est = scratch("tamper_data");
    auto args = estimate_args(est);
    args[2] = copy.string();
    REQUIRE(run(args).code == 0);
    std::ofstream(copy, std::ios::app) << "2020Q1,200,5,5,1500\n";
    const Run r = run({"counterfactual", "--estimate", est.string(), "--var",
                       "ugap", "--delta", "1", "--quarters", "2010Q1:2010Q1"});
    CHECK(r.code == 1);
    CHECK(r.err.find("hash mismatch") != std::string::npos);
  }
}
