#include <doctest.h>

#include <cmath>
#include <sstream>

#include "tvpdr/data.hpp"
#include "tvpdr/error.hpp"

using namespace tvpdr;

namespace {

MacroDataset parse(const std::string& text, const Schema& schema = {}) {
  std::istringstream in(text);
  return parse_csv(in, schema);
}

}  // namespace

TEST_CASE("quarter labels") {
  const Quarter q = Quarter::parse("2021Q4");
  CHECK(q.year == 2021);
  CHECK(q.quarter == 4);
  CHECK(q.next().to_string() == "2022Q1");
  CHECK(Quarter::parse("1999Q1") < q);
  CHECK_THROWS(Quarter::parse("2021Q5"));
  CHECK_THROWS(Quarter::parse("21Q1"));
  CHECK_THROWS(Quarter::parse("2021-03"));
  const auto r = QuarterRange::parse("2021Q1:2021Q4");
  CHECK(r.contains(Quarter::parse("2021Q3")));
  CHECK_FALSE(r.contains(Quarter::parse("2022Q1")));
}

TEST_CASE("transformation codes") {
  CHECK(apply_transform(std::vector<double>{1, std::exp(1.0)}, TransformCode::logdiff)[0] ==
        doctest::Approx(1.0));
  CHECK(apply_transform(std::vector<double>{3, 5, 9}, TransformCode::diff) == std::vector<double>{2, 4});
  const auto d2 = apply_transform(std::vector<double>{1, std::exp(1.0), std::exp(3.0)}, TransformCode::logdiff2);
  REQUIRE(d2.size() == 1);
  CHECK(d2[0] == doctest::Approx(1.0));
  CHECK(apply_transform(std::vector<double>{1, 2, 4, 8}, TransformCode::diff2) == std::vector<double>{1, 2});
  CHECK(apply_transform(std::vector<double>{1, 2}, TransformCode::level) == std::vector<double>{1, 2});
  try {
    (void)apply_transform(std::vector<double>{1, 0, 2}, TransformCode::log);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("index 1") != std::string::npos);
  }
  CHECK_THROWS(transform_code_from_int(7));
  SUBCASE("property: differencing round trip") {
    const std::vector<double> x{2.5, -1.0, 3.25, 7.0, 0.125};
    const auto d = apply_transform(x, TransformCode::diff);
    double acc = x[0];
    for (std::size_t i = 0; i < d.size(); ++i) {
      acc += d[i];
      CHECK(std::abs(acc - x[i + 1]) < 1e-12);
    }
  }
}

TEST_CASE("inflation construction") {
  CHECK(inflation(std::vector<double>{2, 2}, 1)[0] == 0.0);
  const auto h4 = inflation(std::vector<double>{1, 1, 1, 1, std::exp(0.02)}, 4);
  REQUIRE(h4.size() == 1);
  CHECK(h4[0] == doctest::Approx(2.0));
  CHECK(inflation(std::vector<double>{1, std::exp(0.01)}, 1)[0] == doctest::Approx(4.0));
  CHECK_THROWS(inflation(std::vector<double>{1, -1}, 1));
  CHECK_THROWS(inflation(std::vector<double>{1}, 1));
}

TEST_CASE("schema parsing") {
  std::istringstream in("# codes\ngdp=5\n\nurate=1\n");
  const Schema s = parse_schema(in);
  REQUIRE(s.size() == 2);
  CHECK(s[0].first == "gdp");
  CHECK(s[0].second == TransformCode::logdiff);
  std::istringstream bad("gdp=9\n");
  CHECK_THROWS(parse_schema(bad));
}

TEST_CASE("csv loading") {
  SUBCASE("two rows") {
    const auto d = parse("date,u\n2000Q1,4.0\n2000Q2,4.1\n");
    CHECK(d.size() == 2);
    CHECK(d.column("u")[1] == 4.1);
  }
  SUBCASE("empty cell is missing") {
    const auto d = parse("date,u,v\n2000Q1,,1\n2000Q2,4.1,2\n");
    CHECK(std::isnan(d.column("u")[0]));
  }
  SUBCASE("out-of-order dates name the row") {
    try {
      (void)parse("date,u\n2000Q2,1\n2000Q1,2\n");
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
  }
  SUBCASE("schema referencing an absent column") {
    CHECK_THROWS_AS(parse("date,u\n2000Q1,1\n", {{"gdp", TransformCode::logdiff}}), DataError);
  }
  SUBCASE("duplicate column, bad label, non-numeric cell, gap") {
    CHECK_THROWS_AS(parse("date,u,u\n2000Q1,1,2\n"), DataError);
    CHECK_THROWS(parse("date,u\n2000X1,1\n"));
    CHECK_THROWS_AS(parse("date,u\n2000Q1,abc\n"), DataError);
    CHECK_THROWS_AS(parse("date,u\n2000Q1,1\n2000Q3,2\n"), DataError);
  }
  SUBCASE("schema codes attach and transforms realign") {
    const auto raw = parse("date,p\n2000Q1,1\n2000Q2,2\n2000Q3,4\n", {{"p", TransformCode::diff}});
    CHECK(raw.code("p") == TransformCode::diff);
    const auto t = apply_schema_transforms(raw);
    CHECK(std::isnan(t.column("p")[0]));
    CHECK(t.column("p")[2] == 2.0);
    CHECK(t.code("p") == TransformCode::level);
  }
}

TEST_CASE("derived series and counterfactuals") {
  MacroDataset d = parse("date,u,ustar\n2020Q4,6.5,4.0\n2021Q1,7.39,4.0\n2021Q2,5.73,4.0\n");
  const auto gap = with_difference(d, "ugap", "u", "ustar");
  CHECK(gap.column("ugap")[1] == doctest::Approx(3.39));
  SUBCASE("table shifts") {
    MacroDataset g;
    g.set_dates({Quarter::parse("2021Q1"), Quarter::parse("2021Q2")});
    g.set_column("ugap", {3.39, 1.73});
    const auto down = counterfactual_shift(g, "ugap", -5.0, QuarterRange::parse("2021Q1:2021Q1"));
    CHECK(down.column("ugap")[0] == doctest::Approx(-1.61).epsilon(1e-12));
    CHECK(down.column("ugap")[1] == 1.73);
    const auto up = counterfactual_shift(g, "ugap", 5.0, QuarterRange::parse("2021Q2:2021Q2"));
    CHECK(up.column("ugap")[1] == doctest::Approx(6.73).epsilon(1e-12));
    CHECK(g.column("ugap")[0] == 3.39);
  }
  SUBCASE("zero shift is the identity") {
    CHECK(counterfactual_shift(gap, "ugap", 0.0, QuarterRange::parse("2021Q1:2021Q2")) == gap);
  }
  SUBCASE("errors") {
    CHECK_THROWS(counterfactual_shift(gap, "nope", 1.0, QuarterRange::parse("2021Q1:2021Q2")));
    CHECK_THROWS(counterfactual_shift(gap, "ugap", 1.0, QuarterRange::parse("1990Q1:1990Q2")));
  }
}

TEST_CASE("design assembly") {
  std::string csv = "date,y,x\n";
  Quarter q{2000, 1};
  for (int t = 0; t < 10; ++t, q = q.next())
    csv += q.to_string() + "," + std::to_string(t) + "," + std::to_string(10 * t) + "\n";
  SUBCASE("aligned rows and intercept") {
    const auto p = assemble_design(parse(csv), "y", {"x"}, 1);
    CHECK(p.periods() == 9);
    for (std::size_t r = 0; r < p.periods(); ++r) {
      CHECK(p.row(r)[0] == 1.0);
      CHECK(p.target_dates[r] == p.dates[r].next());
      CHECK(p.outcome[r] == doctest::Approx(p.row(r)[1] / 10.0 + 1.0));
    }
    REQUIRE(p.next_date.has_value());
    CHECK(p.next_date->to_string() == "2002Q2");
  }
  SUBCASE("a gap drops the dependent rows") {
    std::string holed = csv;
    holed.replace(holed.find("2000Q4,3,30"), 11, "2000Q4,3,");
    const auto p = assemble_design(parse(holed), "y", {"x"}, 1);
    CHECK(p.periods() == 8);
  }
  SUBCASE("missing covariate") {
    CHECK_THROWS(assemble_design(parse(csv), "y", {"z"}, 1));
  }
  SUBCASE("slice") {
    const auto p = assemble_design(parse(csv), "y", {"x"}, 2);
    CHECK(p.periods() == 8);
    const auto s = p.slice(2, 4);
    CHECK(s.periods() == 3);
    CHECK(s.dates[0] == p.dates[2]);
  }
}
