#include "longterm/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "longterm/errors.hpp"

namespace longterm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const char* what) {
  if (s.empty()) return kNaN;
  double v;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw DataError(std::string("malformed number in column ") + what + ": '" + s + "'");
  return v;
}

long parse_long(const std::string& s, const char* what) {
  long v;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw DataError(std::string("malformed integer in column ") + what + ": '" + s + "'");
  return v;
}

}  // namespace

void ExperimentWindow::validate() const {
  if (t_experimental < 2) throw ConfigError("window: t_experimental must be >= 2");
  if (t_total <= t_experimental)
    throw ConfigError("window: t_total must exceed t_experimental");
  if (t_observational < 0)
    throw ConfigError("window: t_observational must be >= 0");
}

PanelDataset::PanelDataset(ExperimentWindow window, int d_surrogates, int r_covariates,
                           std::size_t n_units)
    : window_(window), d_(d_surrogates), r_(r_covariates) {
  window_.validate();
  if (d_ < 1) throw ConfigError("panel: need at least one surrogate dimension");
  if (r_ < 0) throw ConfigError("panel: negative covariate count");
  ids_.resize(n_units);
  arms_.assign(n_units, 0);
  surrogates_.assign(n_units * window_.n_rows() * d_, kNaN);
  outcomes_.assign(n_units * window_.n_rows(), kNaN);
  covariates_.assign(n_units * std::max(1, r_), 0.0);
  names_.surrogates.resize(d_);
  names_.covariates.resize(r_);
  for (int d = 0; d < d_; ++d) names_.surrogates[d] = "s" + std::to_string(d + 1);
  for (int r = 0; r < r_; ++r) names_.covariates[r] = "x" + std::to_string(r + 1);
}

void PanelDataset::set_unit(std::size_t i, std::string id, int arm) {
  if (arm != 0 && arm != 1) throw DataError("arm must be 0 or 1");
  ids_[i] = std::move(id);
  arms_[i] = static_cast<std::uint8_t>(arm);
}

void PanelDataset::finalize() {
  treated_units_.clear();
  control_units_.clear();
  n_treated_ = 0;
  std::unordered_map<std::string, int> seen;
  seen.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!seen.emplace(ids_[i], 1).second)
      throw DataError("duplicate unit_id '" + ids_[i] + "'");
    if (arms_[i] == 1) {
      treated_units_.push_back(static_cast<std::uint32_t>(i));
      ++n_treated_;
    } else {
      control_units_.push_back(static_cast<std::uint32_t>(i));
    }
  }
  if (treated_units_.empty() || control_units_.empty())
    throw DataError("panel must contain at least one unit per arm");

  const int first = window_.first_period();
  has_future_truth_ = false;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    for (int p = first; p <= window_.t_total; ++p) {
      for (int d = 0; d < d_; ++d) {
        if (std::isnan(surrogate(i, p, d)))
          throw DataError("missing surrogate value for unit '" + ids_[i] +
                          "' at period " + std::to_string(p));
      }
      const bool has_y = outcome_observed(i, p);
      if (p == first) {
        if (has_y)
          throw DataError("outcome must be empty at the first panel period");
      } else if (p <= window_.t_experimental) {
        if (!has_y)
          throw DataError("missing observed-period outcome for unit '" + ids_[i] +
                          "' at period " + std::to_string(p));
      } else if (has_y) {
        has_future_truth_ = true;
      }
    }
  }
}

PanelDataset load_panel(const std::string& path, const ColumnSpec& spec) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open panel file: " + path);
  spec.window.validate();

  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty panel file: " + path);
  const auto header = split_csv_line(line);

  auto find_col = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw SchemaError("missing required column '" + name + "' in " + path);
    return static_cast<int>(it - header.begin());
  };

  const int c_unit = find_col("unit_id");
  const int c_period = find_col("period");
  const int c_arm = find_col("arm");
  const int c_y = find_col("y");
  std::vector<int> c_s(spec.d_surrogates), c_x(spec.r_covariates);
  for (int d = 0; d < spec.d_surrogates; ++d)
    c_s[d] = find_col("s" + std::to_string(d + 1));
  for (int r = 0; r < spec.r_covariates; ++r)
    c_x[r] = find_col("x" + std::to_string(r + 1));

  struct Row {
    std::string unit;
    int period;
    int arm;
    double y;
    std::vector<double> s;
    std::vector<double> x;
  };
  std::vector<Row> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size())
      throw DataError("line " + std::to_string(lineno) + ": field count mismatch");
    Row r;
    r.unit = f[c_unit];
    // CSV periods are 0-based from the first panel row; shift so the
    // experiment starts at internal period 1.
    r.period = static_cast<int>(parse_long(f[c_period], "period")) -
               spec.window.t_observational;
    const long a = parse_long(f[c_arm], "arm");
    if (a != 0 && a != 1)
      throw DataError("line " + std::to_string(lineno) + ": arm must be 0 or 1");
    r.arm = static_cast<int>(a);
    r.y = parse_double(f[c_y], "y");
    r.s.resize(spec.d_surrogates);
    for (int d = 0; d < spec.d_surrogates; ++d)
      r.s[d] = parse_double(f[c_s[d]], "s");
    r.x.resize(spec.r_covariates);
    for (int rr = 0; rr < spec.r_covariates; ++rr)
      r.x[rr] = parse_double(f[c_x[rr]], "x");
    rows.push_back(std::move(r));
  }

  // Group rows by unit in order of first appearance.
  std::unordered_map<std::string, std::size_t> unit_index;
  std::vector<std::string> unit_order;
  for (const auto& r : rows) {
    if (unit_index.emplace(r.unit, unit_order.size()).second)
      unit_order.push_back(r.unit);
  }

  PanelDataset ds(spec.window, spec.d_surrogates, spec.r_covariates,
                  unit_order.size());
  std::vector<std::vector<bool>> filled(
      unit_order.size(), std::vector<bool>(spec.window.n_rows(), false));
  std::vector<int> unit_arm(unit_order.size(), -1);

  for (const auto& r : rows) {
    const std::size_t i = unit_index[r.unit];
    if (r.period < spec.window.first_period() || r.period > spec.window.t_total)
      throw DataError("unit '" + r.unit + "': period out of window");
    const int row = spec.window.row(r.period);
    if (filled[i][row])
      throw DataError("duplicate (unit, period) record: ('" + r.unit + "', " +
                      std::to_string(r.period) + ")");
    filled[i][row] = true;
    if (unit_arm[i] == -1) {
      unit_arm[i] = r.arm;
      ds.set_unit(i, r.unit, r.arm);
      for (int rr = 0; rr < spec.r_covariates; ++rr) ds.set_covariate(i, rr, r.x[rr]);
    } else if (unit_arm[i] != r.arm) {
      throw DesignViolationError("unit '" + r.unit +
                                 "' changes arm mid-panel; assignments are constant "
                                 "for the whole horizon");
    } else {
      for (int rr = 0; rr < spec.r_covariates; ++rr) {
        if (ds.covariate(i, rr) != r.x[rr])
          throw DataError("unit '" + r.unit + "': covariate x" +
                          std::to_string(rr + 1) + " varies across periods");
      }
    }
    for (int d = 0; d < spec.d_surrogates; ++d) {
      if (std::isnan(r.s[d]))
        throw DataError("unit '" + r.unit + "': missing surrogate s" +
                        std::to_string(d + 1) + " at period " +
                        std::to_string(r.period));
      ds.set_surrogate(i, r.period, d, r.s[d]);
    }
    if (!std::isnan(r.y)) ds.set_outcome(i, r.period, r.y);
  }

  for (std::size_t i = 0; i < unit_order.size(); ++i) {
    for (int row = 0; row < spec.window.n_rows(); ++row) {
      if (!filled[i][row])
        throw DataError("unit '" + unit_order[i] + "' is missing period " +
                        std::to_string(row - spec.window.t_observational));
    }
  }

  ds.finalize();
  return ds;
}

void save_panel(const PanelDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write panel file: " + path);
  out << "unit_id,period,arm,y";
  for (int d = 0; d < ds.d_surrogates(); ++d) out << ",s" << (d + 1);
  for (int r = 0; r < ds.r_covariates(); ++r) out << ",x" << (r + 1);
  out << "\n";
  char buf[32];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  const auto& w = ds.window();
  for (std::size_t i = 0; i < ds.n_units(); ++i) {
    for (int p = w.first_period(); p <= w.t_total; ++p) {
      out << ds.unit_id(i) << ',' << (p + w.t_observational) << ','
          << ds.arm(i) << ',';
      if (ds.outcome_observed(i, p)) out << fmt(ds.outcome(i, p));
      for (int d = 0; d < ds.d_surrogates(); ++d)
        out << ',' << fmt(ds.surrogate(i, p, d));
      for (int r = 0; r < ds.r_covariates(); ++r) out << ',' << fmt(ds.covariate(i, r));
      out << "\n";
    }
  }
  if (!out) throw DataError("write failed: " + path);
}

TestResult srm_test(const PanelDataset& ds, double expected_treated_fraction) {
  if (expected_treated_fraction <= 0.0 || expected_treated_fraction >= 1.0)
    throw ConfigError("srm_test: expected fraction must be inside (0,1)");
  const double n = static_cast<double>(ds.n_units());
  const double observed[2] = {static_cast<double>(ds.n_treated()),
                              static_cast<double>(ds.n_control())};
  const double expected[2] = {n * expected_treated_fraction,
                              n * (1.0 - expected_treated_fraction)};
  return chi_square_gof(observed, expected);
}

BalanceReport pretreatment_balance(const PanelDataset& ds,
                                   double expected_treated_fraction) {
  BalanceReport report;
  const TestResult srm = srm_test(ds, expected_treated_fraction);
  report.srm_statistic = srm.statistic;
  report.srm_p = srm.p_value;

  const auto& treated = ds.arm_units(1);
  const auto& control = ds.arm_units(0);
  std::vector<double> a(treated.size()), b(control.size());

  auto run = [&](const std::string& name, auto&& getter) {
    for (std::size_t k = 0; k < treated.size(); ++k) a[k] = getter(treated[k]);
    for (std::size_t k = 0; k < control.size(); ++k) b[k] = getter(control[k]);
    VariableTest t;
    t.name = name;
    t.result = welch_t_test(a, b);
    t.degenerate = t.result.degenerate;
    return t;
  };

  for (int d = 0; d < ds.d_surrogates(); ++d) {
    report.pretreatment_surrogates.push_back(run(
        ds.column_names().surrogates[d],
        [&](std::uint32_t i) { return ds.surrogate(i, 0, d); }));
  }
  for (int r = 0; r < ds.r_covariates(); ++r) {
    report.covariates.push_back(run(ds.column_names().covariates[r],
                                    [&](std::uint32_t i) { return ds.covariate(i, r); }));
  }
  return report;
}

std::vector<double> observed_effects(const PanelDataset& ds, int through) {
  if (through < 1 || through > ds.window().t_experimental)
    throw ConfigError("observed_effects: `through` must lie in [1, T_E]");
  std::vector<double> out(through);
  for (int p = 1; p <= through; ++p) {
    double s1 = 0.0, s0 = 0.0;
    for (std::uint32_t i : ds.arm_units(1)) s1 += ds.outcome(i, p);
    for (std::uint32_t i : ds.arm_units(0)) s0 += ds.outcome(i, p);
    out[p - 1] = s1 / static_cast<double>(ds.n_treated()) -
                 s0 / static_cast<double>(ds.n_control());
  }
  return out;
}

}  // namespace longterm
