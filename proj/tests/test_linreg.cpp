#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "longterm/numerics/linreg.hpp"
#include "longterm/numerics/rng.hpp"

using namespace longterm;

TEST_CASE("ols recovers an exact line") {
  Matrix x(4, 1);
  Vector y(4);
  for (int i = 0; i < 4; ++i) {
    x(i, 0) = i;
    y[i] = 2.0 * i + 1.0;
  }
  const LinearFit fit = ols_fit(x, y);
  CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.coefficients[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.residual_variance == doctest::Approx(0.0).epsilon(1e-18));
}

TEST_CASE("duplicated column raises a singularity error with the column") {
  Matrix x(10, 2);
  Vector y(10);
  RandomStream rng(1);
  for (int i = 0; i < 10; ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = x(i, 0);
    y[i] = rng.normal();
  }
  CHECK_THROWS_AS(ols_fit(x, y), SingularDesignError);
  try {
    ols_fit(x, y);
  } catch (const SingularDesignError& e) {
    REQUIRE(e.columns.size() == 1);
  }
}

TEST_CASE("ols coefficient recovery within 3 standard errors") {
  RandomStream rng(2024);
  const int n = 200, p = 5;
  Matrix x(n, p);
  Vector y(n);
  const double beta[p] = {0.5, -1.2, 0.0, 2.0, 0.3};
  for (int i = 0; i < n; ++i) {
    double mu = 0.7;
    for (int j = 0; j < p; ++j) {
      x(i, j) = rng.normal();
      mu += beta[j] * x(i, j);
    }
    y[i] = mu + 0.1 * rng.normal();
  }
  const LinearFit fit = ols_fit(x, y);
  REQUIRE(fit.coefficient_standard_errors.has_value());
  for (int j = 0; j < p; ++j) {
    const double se = (*fit.coefficient_standard_errors)[j];
    CHECK(std::fabs(fit.coefficients[j] - beta[j]) < 3.0 * se);
  }
}

TEST_CASE("ols residuals are orthogonal to the design and the constant") {
  RandomStream rng(7);
  const int n = 120, p = 4;
  Matrix x(n, p);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) x(i, j) = rng.normal(1.0, 2.0);
    y[i] = rng.normal();
  }
  const LinearFit fit = ols_fit(x, y);
  Vector resid(n);
  for (int i = 0; i < n; ++i) resid[i] = y[i] - fit.predict(x.row(i));
  CHECK(std::fabs(resid.sum()) <= 1e-8 * n);
  for (int j = 0; j < p; ++j)
    CHECK(std::fabs(resid.dot(x.col(j))) <= 1e-8 * resid.norm() * x.col(j).norm());
}

TEST_CASE("weighted ols matches replication") {
  Matrix x(3, 1);
  Vector y(3), w(3);
  x << 0, 1, 2;
  y << 1.0, 2.5, 2.9;
  w << 1, 2, 1;
  const LinearFit weighted = ols_fit(x, y, &w);
  Matrix x2(4, 1);
  Vector y2(4);
  x2 << 0, 1, 1, 2;
  y2 << 1.0, 2.5, 2.5, 2.9;
  const LinearFit replicated = ols_fit(x2, y2);
  CHECK(weighted.intercept == doctest::Approx(replicated.intercept).epsilon(1e-10));
  CHECK(weighted.coefficients[0] ==
        doctest::Approx(replicated.coefficients[0]).epsilon(1e-10));
}

TEST_CASE("ridge fallback fits collinear designs") {
  Matrix x(6, 2);
  Vector y(6);
  for (int i = 0; i < 6; ++i) {
    x(i, 0) = i;
    x(i, 1) = 2.0 * i;
    y[i] = 3.0 * i + 1.0;
  }
  const LinearFit fit = ridge_fit(x, y, 1e-8);
  // Predictions are exact on the collinear manifold.
  for (int i = 0; i < 6; ++i)
    CHECK(fit.predict(x.row(i)) == doctest::Approx(y[i]).epsilon(1e-6));
}

TEST_CASE("elastic net with zero penalty matches ols") {
  RandomStream rng(11);
  const int n = 80, p = 4;
  Matrix x(n, p);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
    y[i] = 1.0 + 0.7 * x(i, 0) - 0.4 * x(i, 2) + 0.05 * rng.normal();
  }
  const LinearFit ols = ols_fit(x, y);
  const LinearFit net = elastic_net_fit(x, y, 0.0, 0.5);
  CHECK(net.intercept == doctest::Approx(ols.intercept).epsilon(1e-5));
  for (int j = 0; j < p; ++j)
    CHECK(net.coefficients[j] == doctest::Approx(ols.coefficients[j]).epsilon(1e-5));
}

TEST_CASE("huge penalty shrinks every slope to zero") {
  RandomStream rng(12);
  const int n = 50;
  Matrix x(n, 3);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = rng.normal();
    y[i] = 2.0 + x(i, 0) + rng.normal();
  }
  const LinearFit fit = elastic_net_fit(x, y, 1e6, 1.0);
  for (int j = 0; j < 3; ++j) CHECK(fit.coefficients[j] == 0.0);
  CHECK(fit.intercept == doctest::Approx(y.mean()).epsilon(1e-10));
}

TEST_CASE("lasso recovers a sparse ground truth") {
  RandomStream rng(13);
  const int n = 300, p = 20;
  Matrix x(n, p);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
    y[i] = 3.0 * x(i, 2) - 2.0 * x(i, 11) + 0.05 * rng.normal();
  }
  const LinearFit fit = elastic_net_fit(x, y, 0.05, 1.0);
  for (int j = 0; j < p; ++j) {
    if (j == 2 || j == 11) {
      CHECK(std::fabs(fit.coefficients[j]) > 1.0);
    } else {
      CHECK(fit.coefficients[j] == 0.0);
    }
  }
}

TEST_CASE("coordinate-descent objective is non-increasing across sweeps") {
  RandomStream rng(15);
  const int n = 100, p = 8;
  Matrix x(n, p);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) x(i, j) = rng.normal(0.5, 1.5);
    y[i] = x(i, 0) - 2.0 * x(i, 5) + rng.normal();
  }
  for (double pen : {0.01, 0.3}) {
    for (double l1 : {0.0, 0.5, 1.0}) {
      std::vector<double> trace;
      elastic_net_fit(x, y, pen, l1, &trace);
      REQUIRE(trace.size() >= 2);
      for (std::size_t k = 1; k < trace.size(); ++k)
        CHECK(trace[k] <= trace[k - 1] + 1e-12);
    }
  }
}

TEST_CASE("cross-validation tuning") {
  RandomStream rng(14);
  const int n = 60, p = 5;
  Matrix x(n, p);

  SUBCASE("pure noise target stays near the target variance") {
    Vector y(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
      y[i] = rng.normal();
    }
    const auto sel = tune_elastic_net(x, y, 6, 5);
    // Out-of-fold MSE of the selected model should not beat the oracle noise
    // floor by much nor blow past it.
    double sse = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = y[i] - sel.fit.predict(x.row(i));
      sse += e * e;
    }
    double var = 0.0;
    const double mean = y.mean();
    for (int i = 0; i < n; ++i) var += (y[i] - mean) * (y[i] - mean);
    CHECK(sse / n <= 1.1 * var / n);
  }

  SUBCASE("strong noiseless signal selects a near-zero penalty") {
    Vector y(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
      y[i] = 2.0 * x(i, 0) - x(i, 3);
    }
    const auto sel = tune_elastic_net(x, y, 10, 5);
    CHECK(sel.penalty_weight <= 0.12);  // lowest decile of [0,1]
  }

  SUBCASE("leave-one-out completes") {
    Matrix xs(10, 2);
    Vector ys(10);
    for (int i = 0; i < 10; ++i) {
      xs(i, 0) = rng.normal();
      xs(i, 1) = rng.normal();
      ys[i] = xs(i, 0) + 0.1 * rng.normal();
    }
    const auto sel = tune_elastic_net(xs, ys, 4, 10);
    CHECK(sel.fit.n_observations == 10);
  }

  SUBCASE("argument errors") {
    Vector y = Vector::Zero(n);
    CHECK_THROWS(tune_elastic_net(x, y, 1, 5));
    Matrix tiny(3, 2);
    Vector ty = Vector::Zero(3);
    CHECK_THROWS(tune_elastic_net(tiny, ty, 4, 5));
  }
}
