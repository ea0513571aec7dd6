#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "dthazard/errors.hpp"
#include "dthazard/sample.hpp"
#include "dthazard/weighted_df.hpp"

using namespace dthazard;

TEST_SUITE("sample") {

TEST_CASE("validation names the first bad triplet") {
  const std::vector<Observation> ok{{0, 0.5, 1}, {0.2, 0.2, 0.2}};
  CHECK(validate_sample(ok).size() == 2);

  const std::vector<Observation> bad{{0, 0.5, 1}, {0.3, 0.2, 0.9}, {0, 2, 1}};
  try {
    validate_sample(bad);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.index() == 1);
    CHECK(e.kind() == ErrorKind::kData);
  }
  const std::vector<Observation> nan{{0, std::nan(""), 1}};
  CHECK_THROWS_AS(validate_sample(nan), ValidationError);
  CHECK_THROWS_AS(validate_sample(std::vector<Observation>{}), Error);
}

TEST_CASE("constant window width is detected") {
  const std::vector<Observation> fixed{{0, 0.1, 0.25}, {0.5, 0.6, 0.75}, {0.7, 0.7, 0.95}};
  const Sample s = validate_sample(fixed);
  REQUIRE(s.interval_sampling());
  CHECK(*s.tau() == doctest::Approx(0.25));

  const std::vector<Observation> varied{{0, 0.1, 0.25}, {0.5, 0.6, 0.9}};
  CHECK_FALSE(validate_sample(varied).interval_sampling());
}

TEST_CASE("csv round trip with comments") {
  std::istringstream in("# comment\nu,x,v\n0,0.5,1\n\n# another\n0.25,0.5,0.75\n");
  const Sample s = read_sample_csv(in);
  REQUIRE(s.size() == 2);
  CHECK(s[1].u == 0.25);
  std::ostringstream out;
  write_sample_csv(out, s);
  std::istringstream back(out.str());
  const Sample t = read_sample_csv(back);
  REQUIRE(t.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(t[i].u == s[i].u);
    CHECK(t[i].x == s[i].x);
    CHECK(t[i].v == s[i].v);
  }
}

TEST_CASE("csv errors carry the line number") {
  auto message = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_sample_csv(in);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kData);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("u,x,v\n0,0.5,1\n0,abc,1\n").find("line 3") != std::string::npos);
  CHECK(message("u,x,v\n0,0.5\n").find("line 2") != std::string::npos);
  CHECK(message("u,x,v\n0,0.5,1\n0.6,0.5,1\n").find("line 3") != std::string::npos);
  CHECK(message("0,0.5,1\n") != "no error");
}

TEST_CASE("affine rescale and subsets") {
  const std::vector<Observation> raw{{-49, 0, 46}, {0, 10, 46}};
  const Sample s = affine_rescale(validate_sample(raw), 49, 95);
  CHECK(s[0].u == doctest::Approx(0.0));
  CHECK(s[0].x == doctest::Approx(49.0 / 95));
  CHECK(s[1].v == doctest::Approx(1.0));

  const std::vector<std::size_t> idx{1};
  CHECK(s.subset(idx).size() == 1);
  CHECK(s.subset(idx)[0].x == s[1].x);
  CHECK(s.without(0)[0].x == s[1].x);
  CHECK_THROWS_AS(affine_rescale(s, 0, 0), Error);
}

TEST_CASE("weighted df merges ties") {
  const std::vector<double> pts{0.3, 0.1, 0.3, 0.2};
  const std::vector<double> w{1, 1, 1, 1};
  const WeightedDF df(pts, w);
  REQUIRE(df.points().size() == 3);
  CHECK(df.masses()[2] == doctest::Approx(0.5));
  CHECK(df.cdf(0.3) == doctest::Approx(1.0));
  CHECK(df.cdf_left(0.3) == doctest::Approx(0.5));
  CHECK(df.cdf(0.05) == 0.0);
  CHECK(df.quantile(0.5) == 0.2);
  CHECK(df.quantile(0.51) == 0.3);
  CHECK(df.quantile(0.25) == 0.1);

  const std::vector<double> q{0.25, 0.25, 0.25, 0.25};
  const auto s = survival_left_limits(pts, q);
  CHECK(s[0] == doctest::Approx(0.5));
  CHECK(s[2] == doctest::Approx(0.5));
  CHECK(s[1] == doctest::Approx(1.0));
  CHECK(s[3] == doctest::Approx(0.75));

  const std::vector<double> neg{-1, 2};
  const std::vector<double> two{0, 1};
  CHECK_THROWS_AS(WeightedDF(two, neg), Error);
}

}
