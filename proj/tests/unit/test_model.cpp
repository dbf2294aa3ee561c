#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dense_oracle.hpp"
#include "tvpdr/error.hpp"
#include "tvpdr/model.hpp"

using namespace tvpdr;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> random_design(std::size_t periods, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  std::vector<double> x(periods * d);
  for (std::size_t t = 0; t < periods; ++t) {
    x[t * d] = 1.0;
    for (std::size_t i = 1; i < d; ++i) x[t * d + i] = z(gen);
  }
  return x;
}

}  // namespace

TEST_CASE("probit link") {
  const ProbitLink link;
  CHECK(link.cdf(-40) >= 0.0);
  CHECK(link.cdf(40) == doctest::Approx(1.0));
  CHECK(link.density(0.3) > 0.0);
  double prev = 0.0;
  for (double z = -8; z <= 8; z += 0.01) {
    CHECK(link.cdf(z) >= prev);
    prev = link.cdf(z);
  }
}

TEST_CASE("design transforms") {
  const std::vector<double> raw{1.0, 2.0, -1.0};
  CHECK(DesignTransform::identity().apply(raw) == raw);
  const auto poly = DesignTransform::polynomial(2);
  CHECK(poly.output_columns(3) == 5);
  CHECK(poly.apply(raw) == std::vector<double>{1.0, 2.0, 4.0, -1.0, 1.0});
  CHECK(DesignTransform::parse(poly.name()) == poly);
  CHECK(DesignTransform::parse("identity") == DesignTransform::identity());
  CHECK_THROWS(DesignTransform::parse("spline"));
}

TEST_CASE("fitted value is intercept plus slopes") {
  const std::vector<double> x{1.0, 2.0, 3.0}, b{0.5, -1.0, 2.0};
  CHECK(fitted_value(x, b) == 0.5 - 2.0 + 6.0);
}

TEST_CASE("draw_latent signs and moments") {
  RngHandle rng(2, 0);
  SUBCASE("indicator on, mean 0") {
    const std::vector<double> y{0.0}, x{1.0}, beta{0.0};
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
      const double v = draw_latent(0.5, y, x, beta, rng)[0];
      REQUIRE(v >= 0.0);
      sum += v;
    }
    CHECK(std::abs(sum / n - 0.79788) < 0.003);
  }
  SUBCASE("indicator off is always negative") {
    const std::vector<double> y{1.0}, x{1.0}, beta{5.0};
    for (int i = 0; i < 10000; ++i) REQUIRE(draw_latent(0.5, y, x, beta, rng)[0] < 0.0);
  }
  SUBCASE("far from the boundary") {
    const std::vector<double> y{0.0}, x{1.0}, beta{10.0};
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += draw_latent(0.5, y, x, beta, rng)[0];
    CHECK(std::abs(sum / n - 10.0) < 0.01);
  }
  SUBCASE("property: sign matches indicator") {
    const auto x = random_design(50, 2, 4);
    std::vector<double> y(50), beta(100);
    std::mt19937_64 gen(4);
    std::normal_distribution<double> z;
    for (double& v : y) v = z(gen);
    for (double& v : beta) v = 2.0 * z(gen);
    for (int rep = 0; rep < 20; ++rep) {
      const auto lat = draw_latent(0.1, y, x, beta, rng);
      for (std::size_t t = 0; t < 50; ++t) CHECK((lat[t] >= 0.0) == (y[t] <= 0.1));
    }
  }
}

TEST_CASE("draw_beta_unconstrained") {
  RngHandle rng(6, 0);
  SUBCASE("zero data has zero mean") {
    const std::vector<double> x{1, 1}, lat{0, 0}, s2{1};
    double m0 = 0, m1 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const auto b = draw_beta_unconstrained(x, lat, s2, rng);
      m0 += b[0];
      m1 += b[1];
    }
    CHECK(std::abs(m0 / n) < 0.01);
    CHECK(std::abs(m1 / n) < 0.01);
  }
  SUBCASE("vanishing state variance gives a flat path") {
    const std::vector<double> x{1, 1, 1}, lat{1, 1, 1}, s2{1e-8};
    for (int i = 0; i < 100; ++i) {
      const auto b = draw_beta_unconstrained(x, lat, s2, rng);
      const auto [lo, hi] = std::minmax_element(b.begin(), b.end());
      CHECK(*hi - *lo < 1e-2);
    }
  }
  SUBCASE("random T = 10, d = 2 against the dense mean") {
    const auto x = random_design(10, 2, 12);
    std::vector<double> lat(10);
    std::mt19937_64 gen(13);
    std::normal_distribution<double> z;
    for (double& v : lat) v = z(gen);
    const std::vector<double> s2{0.2, 0.05};
    const oracle::MatrixXd k = oracle::dense_precision(x, 10, s2);
    oracle::VectorXd xty = oracle::VectorXd::Zero(20);
    for (std::size_t t = 0; t < 10; ++t)
      for (std::size_t i = 0; i < 2; ++i) xty(t * 2 + i) = x[t * 2 + i] * lat[t];
    const oracle::VectorXd mu = k.llt().solve(xty);
    const oracle::VectorXd sd = k.inverse().diagonal().cwiseSqrt();
    const int n = 20000;
    oracle::VectorXd mean = oracle::VectorXd::Zero(20);
    for (int i = 0; i < n; ++i) mean += oracle::to_vector(draw_beta_unconstrained(x, lat, s2, rng));
    mean /= n;
    for (int i = 0; i < 20; ++i) CHECK(std::abs(mean(i) - mu(i)) < 4.0 * sd(i) / std::sqrt(double(n)));
  }
}

TEST_CASE("sigma2 posterior shape and scale") {
  const InverseGammaPrior prior{3.0, 1.0};
  SUBCASE("constant path leaves the scale at the prior") {
    const std::vector<double> beta(5, 0.7);
    const auto [shape, scale] = sigma2_posterior(beta, 5, 0, prior);
    CHECK(shape == 5.0);
    CHECK(scale == 1.0);
  }
  SUBCASE("unit increments") {
    const std::vector<double> beta{0, 1, 2, 3, 4};
    const auto [shape, scale] = sigma2_posterior(beta, 5, 0, prior);
    CHECK(shape == 5.0);
    CHECK(scale == 3.0);
    RngHandle rng(4, 0);
    const std::vector<InverseGammaPrior> priors{prior};
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double v = draw_sigma2(beta, 5, priors, rng)[0];
      REQUIRE(v > 0.0);
      sum += v;
    }
    CHECK(std::abs(sum / n - 0.75) < 0.02);
  }
  SUBCASE("initial state variant") {
    const std::vector<double> beta{2, 2, 2, 2, 2};
    const auto [shape, scale] = sigma2_posterior(beta, 5, 0, prior, true);
    CHECK(shape == 5.5);
    CHECK(scale == 3.0);
  }
}

TEST_CASE("monotone step") {
  RngHandle rng(31, 0);
  MonotoneStepOptions options;
  SUBCASE("pinned where the neighbours touch") {
    const std::size_t periods = 4;
    const auto x = random_design(periods, 2, 3);
    const std::vector<double> lat{0.2, -0.4, 1.0, 0.1}, s2{0.1, 0.1};
    const std::vector<double> lower{-1.0, -0.5, 0.25, -kInf}, upper{1.0, 0.5, 0.25, kInf};
    std::vector<double> current(periods * 2, 0.0);
    current[4] = 0.25 - x[5] * 0.0;
    for (int rep = 0; rep < 200; ++rep) {
      current = draw_beta_monotone(x, lat, s2, lower, upper, current, options, rng);
      const auto fit = fitted_path(x, periods, current);
      for (std::size_t t = 0; t < periods; ++t) {
        CHECK(fit[t] >= lower[t]);
        CHECK(fit[t] <= upper[t]);
      }
      CHECK(fit[2] == 0.25);
    }
  }
  SUBCASE("intercept-only model stays in the box") {
    const std::vector<double> x(6, 1.0), lat{1, 0, -1, 2, -2, 0}, s2{0.3};
    const std::vector<double> lower{-0.1, -0.2, -0.3, -0.4, -0.5, -0.6}, upper(6, 0.1);
    std::vector<double> current(6, 0.0);
    for (int rep = 0; rep < 500; ++rep) {
      current = draw_beta_monotone(x, lat, s2, lower, upper, current, options, rng);
      for (std::size_t t = 0; t < 6; ++t) {
        CHECK(current[t] >= lower[t]);
        CHECK(current[t] <= upper[t]);
      }
    }
  }
  SUBCASE("lowest threshold is bounded above only") {
    const std::size_t periods = 8;
    const auto x = random_design(periods, 3, 8);
    const std::vector<double> lat(periods, 3.0), s2{0.05, 0.05, 0.05};
    const std::vector<double> lower(periods, -kInf), upper(periods, 0.0);
    std::vector<double> current(periods * 3, 0.0);
    for (std::size_t t = 0; t < periods; ++t) current[t * 3] = -1.0;
    for (int rep = 0; rep < 300; ++rep) {
      current = draw_beta_monotone(x, lat, s2, lower, upper, current, options, rng);
      for (double f : fitted_path(x, periods, current)) CHECK(f <= 0.0);
    }
  }
  SUBCASE("infinite bounds reproduce the unconstrained posterior") {
    const std::size_t periods = 5;
    const auto x = random_design(periods, 2, 21);
    const std::vector<double> lat{0.5, -1.0, 0.2, 1.3, -0.3}, s2{0.4, 0.2};
    const std::vector<double> lower(periods, -kInf), upper(periods, kInf);
    const oracle::MatrixXd k = oracle::dense_precision(x, periods, s2);
    oracle::VectorXd xty = oracle::VectorXd::Zero(10);
    for (std::size_t t = 0; t < periods; ++t)
      for (std::size_t i = 0; i < 2; ++i) xty(t * 2 + i) = x[t * 2 + i] * lat[t];
    const oracle::VectorXd mu = k.llt().solve(xty);
    const oracle::MatrixXd cov = k.inverse();
    std::vector<double> current(10, 0.0);
    const int n = 40000;
    oracle::VectorXd sum = oracle::VectorXd::Zero(10), sq = oracle::VectorXd::Zero(10);
    for (int i = 0; i < n; ++i) {
      current = draw_beta_monotone(x, lat, s2, lower, upper, current, options, rng);
      const oracle::VectorXd v = oracle::to_vector(current);
      sum += v;
      sq += v.cwiseProduct(v);
    }
    const oracle::VectorXd mean = sum / n;
    const oracle::VectorXd var = sq / n - mean.cwiseProduct(mean);
    for (int i = 0; i < 10; ++i) {
      CHECK(std::abs(mean(i) - mu(i)) < 4.0 * std::sqrt(cov(i, i) / n));
      CHECK(std::abs(var(i) / cov(i, i) - 1.0) < 0.05);
    }
  }
  SUBCASE("binding neighbours leave the ordered posterior invariant") {
    const std::size_t periods = 3, d = 2;
    const auto x = random_design(periods, d, 12);
    const std::vector<double> lat{0.8, -0.6, 0.4}, s2{0.3, 0.3};
    const oracle::MatrixXd k = oracle::dense_precision(x, periods, s2);
    oracle::VectorXd xty = oracle::VectorXd::Zero(periods * d);
    for (std::size_t t = 0; t < periods; ++t)
      for (std::size_t i = 0; i < d; ++i) xty(t * d + i) = x[t * d + i] * lat[t];
    const oracle::VectorXd mu = k.llt().solve(xty);
    const oracle::MatrixXd chol_cov = k.inverse().llt().matrixL();
    std::vector<double> lower(periods), upper(periods);
    for (std::size_t t = 0; t < periods; ++t) {
      const double f = x[t * d] * mu(t * d) + x[t * d + 1] * mu(t * d + 1);
      lower[t] = f - 0.2;
      upper[t] = f + 0.6;
    }
    std::mt19937_64 gen(13);
    std::normal_distribution<double> z;
    oracle::VectorXd ref = oracle::VectorXd::Zero(periods * d);
    int accepted = 0;
    while (accepted < 50000) {
      oracle::VectorXd e(periods * d);
      for (auto& v : e) v = z(gen);
      const oracle::VectorXd b = mu + chol_cov * e;
      bool ok = true;
      for (std::size_t t = 0; t < periods; ++t) {
        const double f = x[t * d] * b(t * d) + x[t * d + 1] * b(t * d + 1);
        ok = ok && f >= lower[t] && f <= upper[t];
      }
      if (ok) {
        ref += b;
        ++accepted;
      }
    }
    ref /= accepted;
    std::vector<double> current(periods * d);
    for (std::size_t i = 0; i < current.size(); ++i) current[i] = mu(i);
    oracle::VectorXd got = oracle::VectorXd::Zero(periods * d);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      current = draw_beta_monotone(x, lat, s2, lower, upper, current, options, rng);
      got += oracle::to_vector(current);
    }
    got /= n;
    CHECK((got - ref).cwiseAbs().maxCoeff() < 0.02);
  }
  SUBCASE("crossing neighbours are an error") {
    const std::vector<double> x{1, 1}, lat{0, 0}, s2{1}, lower{0, 1}, upper{1, 0}, current{0.5, 0.5};
    CHECK_THROWS_AS(draw_beta_monotone(x, lat, s2, lower, upper, current, options, rng), std::logic_error);
  }
}

TEST_CASE("run_gibbs") {
  const std::size_t periods = 60;
  RegressionData data;
  data.periods = periods;
  data.raw_columns = 2;
  std::mt19937_64 gen(77);
  std::normal_distribution<double> z;
  for (std::size_t t = 0; t < periods; ++t) {
    const double x = z(gen);
    data.covariates.push_back(1.0);
    data.covariates.push_back(x);
    data.outcome.push_back(0.5 * x + z(gen));
  }
  ModelSpec spec;
  spec.grid = ThresholdGrid::build(-1.0, 1.0, 0.25);
  spec.iterations = 150;
  spec.burnin = 50;
  SUBCASE("monotone draws have no ordering violations and are reproducible") {
    RngHandle a(5, 0), b(5, 0);
    const PosteriorDraws d1 = run_gibbs(spec, data, a);
    const PosteriorDraws d2 = run_gibbs(spec, data, b);
    CHECK(d1.kept == 100);
    CHECK(d1.thresholds() == spec.grid.size());
    CHECK(count_ordering_violations(d1) == 0);
    CHECK(d1.beta == d2.beta);
    CHECK(d1.sigma2 == d2.sigma2);
    for (const auto& s : d1.sigma2)
      for (double v : s) CHECK(v > 0.0);
  }
  SUBCASE("single threshold ignores the monotone flag") {
    spec.grid = ThresholdGrid::from_points({0.0});
    RngHandle a(5, 0), b(5, 0);
    spec.monotone = true;
    const auto d1 = run_gibbs(spec, data, a);
    spec.monotone = false;
    const auto d2 = run_gibbs(spec, data, b);
    CHECK(d1.kept == d2.kept);
    CHECK(count_ordering_violations(d1) == 0);
  }
  SUBCASE("argument validation") {
    RngHandle rng(1, 0);
    spec.burnin = spec.iterations;
    CHECK_THROWS_AS(run_gibbs(spec, data, rng), std::invalid_argument);
    spec.burnin = 10;
    data.covariates[0] = 2.0;
    CHECK_THROWS_AS(run_gibbs(spec, data, rng), std::invalid_argument);
    data.covariates[0] = 1.0;
    data.periods = 1;
    CHECK_THROWS_AS(run_gibbs(spec, data, rng), DimensionError);
  }
  SUBCASE("initial intercepts increase strictly") {
    const auto design = transform_design(data, spec.transform);
    const GibbsState s = initial_state(spec, data.outcome, design, periods);
    for (std::size_t j = 1; j < s.thresholds.size(); ++j)
      CHECK(s.thresholds[j].beta[0] > s.thresholds[j - 1].beta[0]);
  }
}
