#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "longterm/errors.hpp"
#include "longterm/inference.hpp"
#include "longterm/panel.hpp"
#include "longterm/synthgen.hpp"

using namespace longterm;
using longterm::testing::build_panel;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

ColumnSpec spec_2x3() {
  ColumnSpec spec;
  spec.d_surrogates = 2;
  spec.r_covariates = 0;
  spec.window = {2, 3, 0};
  return spec;
}

}  // namespace

TEST_CASE("minimal well-formed panel loads") {
  const std::string path = temp_path("panel_min.csv");
  write_file(path,
             "unit_id,period,arm,y,s1,s2\n"
             "a,0,1,,0.1,0.2\n"
             "a,1,1,1.0,0.3,0.4\n"
             "a,2,1,1.1,0.5,0.6\n"
             "a,3,1,,0.7,0.8\n"
             "b,0,0,,1.1,1.2\n"
             "b,1,0,2.0,1.3,1.4\n"
             "b,2,0,2.1,1.5,1.6\n"
             "b,3,0,,1.7,1.8\n");
  const PanelDataset ds = load_panel(path, spec_2x3());
  CHECK(ds.n_units() == 2);
  CHECK(ds.d_surrogates() == 2);
  CHECK(ds.window().t_total == 3);
  CHECK(ds.n_treated() == 1);
  CHECK(ds.surrogate(0, 0, 1) == doctest::Approx(0.2));
  CHECK(ds.outcome(1, 2) == doctest::Approx(2.1));
  CHECK_FALSE(ds.outcome_observed(0, 3));
  CHECK_FALSE(ds.has_future_truth());
}

TEST_CASE("arm flip mid-panel is a design violation") {
  const std::string path = temp_path("panel_flip.csv");
  write_file(path,
             "unit_id,period,arm,y,s1,s2\n"
             "a,0,0,,0.1,0.2\n"
             "a,1,0,1.0,0.3,0.4\n"
             "a,2,1,1.1,0.5,0.6\n"
             "a,3,1,,0.7,0.8\n"
             "b,0,0,,1.1,1.2\n"
             "b,1,0,2.0,1.3,1.4\n"
             "b,2,0,2.1,1.5,1.6\n"
             "b,3,0,,1.7,1.8\n");
  CHECK_THROWS_AS(load_panel(path, spec_2x3()), DesignViolationError);
}

TEST_CASE("missing column and duplicate rows are rejected") {
  const std::string path = temp_path("panel_bad.csv");
  write_file(path, "unit_id,period,arm,s1,s2\na,0,1,0.1,0.2\n");
  CHECK_THROWS_AS(load_panel(path, spec_2x3()), SchemaError);

  write_file(path,
             "unit_id,period,arm,y,s1,s2\n"
             "a,0,1,,0.1,0.2\n"
             "a,0,1,,0.1,0.2\n");
  CHECK_THROWS_AS(load_panel(path, spec_2x3()), DataError);
}

TEST_CASE("missing observed-period outcome is a hard error") {
  const std::string path = temp_path("panel_missy.csv");
  write_file(path,
             "unit_id,period,arm,y,s1,s2\n"
             "a,0,1,,0.1,0.2\n"
             "a,1,1,,0.3,0.4\n"
             "a,2,1,1.1,0.5,0.6\n"
             "a,3,1,,0.7,0.8\n"
             "b,0,0,,1.1,1.2\n"
             "b,1,0,2.0,1.3,1.4\n"
             "b,2,0,2.1,1.5,1.6\n"
             "b,3,0,,1.7,1.8\n");
  CHECK_THROWS_AS(load_panel(path, spec_2x3()), DataError);
}

TEST_CASE("save/load round trip is the identity") {
  SynthSpec spec;
  spec.kind = SynthKind::stabilized1;
  spec.n_per_arm = 50;
  spec.t_total = 6;
  spec.t_experimental = 2;
  spec.seed = 77;
  const SynthPanel sp = generate(spec);

  const std::string path = temp_path("panel_rt.csv");
  save_panel(sp.panel, path);
  ColumnSpec schema;
  schema.d_surrogates = sp.panel.d_surrogates();
  schema.r_covariates = 0;
  schema.window = sp.panel.window();
  const PanelDataset back = load_panel(path, schema);

  REQUIRE(back.n_units() == sp.panel.n_units());
  CHECK(back.has_future_truth());
  for (std::size_t i = 0; i < back.n_units(); ++i) {
    CHECK(back.unit_id(i) == sp.panel.unit_id(i));
    CHECK(back.arm(i) == sp.panel.arm(i));
    for (int p = 0; p <= 6; ++p) {
      for (int d = 0; d < back.d_surrogates(); ++d)
        CHECK(back.surrogate(i, p, d) == sp.panel.surrogate(i, p, d));
      if (sp.panel.outcome_observed(i, p))
        CHECK(back.outcome(i, p) == sp.panel.outcome(i, p));
    }
  }
}

TEST_CASE("covariate columns round-trip and must be unit-constant") {
  const std::string path = temp_path("panel_cov.csv");
  write_file(path,
             "unit_id,period,arm,y,s1,x1\n"
             "a,0,1,,0.1,7.5\n"
             "a,1,1,1.0,0.3,7.5\n"
             "a,2,1,1.1,0.5,7.5\n"
             "a,3,1,,0.7,7.5\n"
             "b,0,0,,1.1,-2.0\n"
             "b,1,0,2.0,1.3,-2.0\n"
             "b,2,0,2.1,1.5,-2.0\n"
             "b,3,0,,1.7,-2.0\n");
  ColumnSpec spec;
  spec.d_surrogates = 1;
  spec.r_covariates = 1;
  spec.window = {2, 3, 0};
  const PanelDataset ds = load_panel(path, spec);
  CHECK(ds.covariate(0, 0) == doctest::Approx(7.5));
  CHECK(ds.covariate(1, 0) == doctest::Approx(-2.0));

  const std::string out = temp_path("panel_cov_rt.csv");
  save_panel(ds, out);
  const PanelDataset back = load_panel(out, spec);
  CHECK(back.covariate(0, 0) == 7.5);

  // Varying covariate within a unit is rejected.
  write_file(path,
             "unit_id,period,arm,y,s1,x1\n"
             "a,0,1,,0.1,7.5\n"
             "a,1,1,1.0,0.3,7.6\n"
             "a,2,1,1.1,0.5,7.5\n"
             "a,3,1,,0.7,7.5\n"
             "b,0,0,,1.1,-2.0\n"
             "b,1,0,2.0,1.3,-2.0\n"
             "b,2,0,2.1,1.5,-2.0\n"
             "b,3,0,,1.7,-2.0\n");
  CHECK_THROWS_AS(load_panel(path, spec), DataError);
}

TEST_CASE("srm test matches the published chi-square checks") {
  // Equal arm counts -> statistic 0, p = 1.
  auto fill = [](PanelDataset& ds, std::size_t i, int p, int) {
    ds.set_surrogate(i, p, 0, static_cast<double>(i + p));
    if (p >= 1) ds.set_outcome(i, p, 0.0);
  };
  const PanelDataset balanced = build_panel(500, 500, {2, 3, 0}, 1, 0, fill);
  const TestResult r = srm_test(balanced, 0.5);
  CHECK(r.statistic == doctest::Approx(0.0));
  CHECK(r.p_value == doctest::Approx(1.0));
  CHECK_THROWS_AS(srm_test(balanced, 1.5), ConfigError);

  // Statistic depends on arm counts only.
  const PanelDataset other = build_panel(
      500, 500, {2, 3, 0}, 1, 0,
      [](PanelDataset& ds, std::size_t i, int p, int) {
        ds.set_surrogate(i, p, 0, -5.0 * static_cast<double>(i) + p);
        if (p >= 1) ds.set_outcome(i, p, 1.0);
      });
  CHECK(srm_test(other, 0.5).statistic == doctest::Approx(r.statistic));
}

TEST_CASE("pretreatment balance flags gross imbalance and degenerate columns") {
  RandomStream rng(5);
  auto fill = [&](PanelDataset& ds, std::size_t i, int p, int arm) {
    ds.set_surrogate(i, p, 0, arm == 1 ? rng.normal(10.0, 1.0) : rng.normal(0.0, 1.0));
    ds.set_surrogate(i, p, 1, 3.0);  // constant in both arms
    if (p >= 1) ds.set_outcome(i, p, 0.0);
  };
  const PanelDataset ds = build_panel(100, 100, {2, 3, 0}, 2, 0, fill);
  const BalanceReport report = pretreatment_balance(ds);
  REQUIRE(report.pretreatment_surrogates.size() == 2);
  CHECK(report.pretreatment_surrogates[0].result.p_value < 1e-6);
  CHECK(report.pretreatment_surrogates[1].degenerate);
}

TEST_CASE("balance test is calibrated when arms share a distribution") {
  RandomStream rng(6);
  int low_p = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto fill = [&](PanelDataset& ds, std::size_t i, int p, int) {
      ds.set_surrogate(i, p, 0, rng.normal(1.0, 2.0));
      if (p >= 1) ds.set_outcome(i, p, 0.0);
    };
    const PanelDataset ds = build_panel(5000, 5000, {2, 3, 0}, 1, 0, fill);
    const BalanceReport report = pretreatment_balance(ds);
    if (report.pretreatment_surrogates[0].result.p_value <= 0.001) ++low_p;
  }
  CHECK(low_p <= 1);
}

TEST_CASE("observed effects") {
  SUBCASE("identical arms give zeros") {
    auto fill = [](PanelDataset& ds, std::size_t i, int p, int) {
      ds.set_surrogate(i, p, 0, 1.0);
      if (p >= 1) ds.set_outcome(i, p, static_cast<double>(p + i % 3));
    };
    const PanelDataset ds = build_panel(9, 9, {2, 4, 0}, 1, 0, fill);
    for (double e : observed_effects(ds, 2)) CHECK(e == doctest::Approx(0.0));
  }

  SUBCASE("additive shift is recovered per period") {
    auto fill = [](PanelDataset& ds, std::size_t i, int p, int arm) {
      ds.set_surrogate(i, p, 0, 1.0);
      if (p >= 1)
        ds.set_outcome(i, p, static_cast<double>(p) + (arm == 1 ? 2.5 : 0.0));
    };
    const PanelDataset ds = build_panel(4, 6, {2, 4, 0}, 1, 0, fill);
    for (double e : observed_effects(ds, 2)) CHECK(e == doctest::Approx(2.5));
  }

  SUBCASE("arm swap negates the effects") {
    SynthSpec spec;
    spec.kind = SynthKind::stabilized1;
    spec.n_per_arm = 200;
    spec.t_total = 5;
    spec.t_experimental = 3;
    spec.seed = 11;
    const SynthPanel sp = generate(spec);
    const PanelDataset swapped = swap_arms(sp.panel);
    const auto orig = observed_effects(sp.panel, 3);
    const auto neg = observed_effects(swapped, 3);
    for (std::size_t k = 0; k < orig.size(); ++k)
      CHECK(orig[k] == doctest::Approx(-neg[k]).epsilon(1e-12));
  }

  SUBCASE("through beyond T_E is rejected") {
    SynthSpec spec;
    spec.kind = SynthKind::stabilized1;
    spec.n_per_arm = 10;
    spec.t_total = 4;
    spec.t_experimental = 2;
    spec.seed = 1;
    const SynthPanel sp = generate(spec);
    CHECK_THROWS_AS(observed_effects(sp.panel, 3), ConfigError);
  }
}

TEST_CASE("observed effects track the truth oracle on a synthetic panel") {
  SynthSpec spec;
  spec.kind = SynthKind::stabilized1;
  spec.n_per_arm = 100000;
  spec.t_total = 6;
  spec.t_experimental = 4;
  spec.seed = 99;
  const SynthPanel sp = generate(spec, 4);
  const auto eff = observed_effects(sp.panel, 4);
  for (int p = 1; p <= 4; ++p)
    CHECK(std::fabs(eff[p - 1] - sp.truth.tau[p - 1]) < 0.02);
}
