#include "lipfree/lp.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "lipfree/kernels.hpp"
#include "lipfree/matrix.hpp"

namespace lipfree::lp {

std::string to_string(Status s) {
  switch (s) {
    case Status::optimal:
      return "optimal";
    case Status::infeasible:
      return "infeasible";
    case Status::unbounded:
      return "unbounded";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// How an original variable maps onto nonnegative tableau columns.
struct ColumnMap {
  enum Kind { shifted, mirrored, split } kind = shifted;
  std::size_t column = 0;
  double offset = 0.0;  // lower bound (shifted) or upper bound (mirrored)
};

void check_well_formed(const LinearProgram& lp) {
  const std::size_t n = lp.variable_count();
  if (!lp.bounds.empty() && lp.bounds.size() != n) {
    throw Error("linear program: " + std::to_string(lp.bounds.size()) + " bounds for " +
                std::to_string(n) + " variables");
  }
  for (double c : lp.objective) {
    if (!std::isfinite(c)) throw Error("linear program: non-finite objective coefficient");
  }
  for (std::size_t r = 0; r < lp.constraints.size(); ++r) {
    const auto& row = lp.constraints[r];
    if (row.coefficients.size() != n) {
      throw Error("linear program: constraint " + std::to_string(r) + " has " +
                  std::to_string(row.coefficients.size()) + " coefficients, expected " +
                  std::to_string(n));
    }
    for (double a : row.coefficients) {
      if (!std::isfinite(a)) throw Error("linear program: non-finite coefficient in constraint " + std::to_string(r));
    }
    if (!std::isfinite(row.rhs)) throw Error("linear program: non-finite rhs in constraint " + std::to_string(r));
  }
  for (const auto& b : lp.bounds) {
    if (std::isnan(b.lower) || std::isnan(b.upper) || b.lower == kInf || b.upper == -kInf) {
      throw Error("linear program: invalid variable bounds");
    }
  }
}

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), stride_(cols + 1), cells_((rows + 1) * (cols + 1), 0.0), basis_(rows) {}

  double& at(std::size_t r, std::size_t c) { return cells_[r * stride_ + c]; }
  double at(std::size_t r, std::size_t c) const { return cells_[r * stride_ + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double rhs(std::size_t r) const { return at(r, cols_); }
  std::span<double> row(std::size_t r) { return {cells_.data() + r * stride_, stride_}; }
  std::size_t objective_row() const { return rows_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t q) {
    auto pr = row(r);
    kernels::divide(pr, at(r, q));
    at(r, q) = 1.0;
    for (std::size_t i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      const double factor = at(i, q);
      if (factor == 0.0) continue;
      kernels::axpy_neg(row(i), pr, factor);
      at(i, q) = 0.0;
    }
    basis_[r] = q;
  }

  // Removes row r (its basic variable leaves the problem).
  void drop_row(std::size_t r) {
    const std::size_t last = rows_ - 1;
    if (r != last) {
      std::copy_n(cells_.begin() + last * stride_, stride_, cells_.begin() + r * stride_);
      basis_[r] = basis_[last];
    }
    // Move the objective row up.
    std::copy_n(cells_.begin() + rows_ * stride_, stride_, cells_.begin() + last * stride_);
    cells_.resize(rows_ * stride_);
    basis_.pop_back();
    --rows_;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::size_t stride_;
  std::vector<double> cells_;
  std::vector<std::size_t> basis_;
};

enum class PhaseResult { optimal, unbounded, pivot_limit };

// Maximizes the objective encoded in the tableau's objective row (stored as
// -c, reduced to the current basis). Columns with eligible[c] == false never enter.
PhaseResult run_phase(Tableau& t, const std::vector<bool>& eligible, const SolverOptions& opts,
                      std::size_t& pivots) {
  const std::size_t obj = t.objective_row();
  bool use_bland = opts.rule == PivotRule::bland;
  std::size_t degenerate_run = 0;
  while (true) {
    if (pivots >= opts.max_pivots) return PhaseResult::pivot_limit;
    std::size_t enter = t.cols();
    double best = -opts.pivot_tolerance;
    for (std::size_t c = 0; c < t.cols(); ++c) {
      if (!eligible[c]) continue;
      const double rc = t.at(obj, c);
      if (use_bland) {
        if (rc < -opts.pivot_tolerance) {
          enter = c;
          break;
        }
      } else if (rc < best) {
        best = rc;
        enter = c;
      }
    }
    if (enter == t.cols()) return PhaseResult::optimal;

    std::size_t leave = t.rows();
    double best_ratio = kInf;
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (!(a > opts.pivot_tolerance)) continue;
      const double ratio = std::max(t.rhs(r), 0.0) / a;
      const double slack = 1e-12 * (1.0 + std::abs(best_ratio == kInf ? ratio : best_ratio));
      if (leave == t.rows() || ratio < best_ratio - slack) {
        leave = r;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + slack && t.basis()[r] < t.basis()[leave]) {
        leave = r;
        best_ratio = std::min(best_ratio, ratio);
      }
    }
    if (leave == t.rows()) return PhaseResult::unbounded;

    if (best_ratio <= opts.pivot_tolerance) {
      if (++degenerate_run > opts.stall_limit) use_bland = true;
    } else {
      degenerate_run = 0;
      use_bland = opts.rule == PivotRule::bland;
    }
    t.pivot(leave, enter);
    ++pivots;
  }
}

}  // namespace

double max_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (const auto& row : lp.constraints) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) lhs += row.coefficients[j] * x[j];
    const double gap = lhs - row.rhs;
    switch (row.relation) {
      case Relation::less_equal:
        worst = std::max(worst, gap);
        break;
      case Relation::greater_equal:
        worst = std::max(worst, -gap);
        break;
      case Relation::equal:
        worst = std::max(worst, std::abs(gap));
        break;
    }
  }
  for (std::size_t j = 0; j < lp.bounds.size() && j < x.size(); ++j) {
    worst = std::max(worst, lp.bounds[j].lower - x[j]);
    worst = std::max(worst, x[j] - lp.bounds[j].upper);
  }
  if (lp.bounds.empty()) {
    for (double v : x) worst = std::max(worst, -v);
  }
  return worst;
}

Solution solve(const LinearProgram& lp, const SolverOptions& opts) {
  check_well_formed(lp);
  const std::size_t n = lp.variable_count();
  Solution out;

  // Map variables onto nonnegative columns.
  std::vector<ColumnMap> vars(n);
  std::size_t structural = 0;
  struct UpperRow {
    std::size_t column;
    double width;
  };
  std::vector<UpperRow> upper_rows;
  for (std::size_t j = 0; j < n; ++j) {
    const VariableBounds b = lp.bounds.empty() ? VariableBounds{} : lp.bounds[j];
    if (b.lower > b.upper) {
      out.status = Status::infeasible;
      return out;
    }
    if (std::isfinite(b.lower)) {
      vars[j] = {ColumnMap::shifted, structural++, b.lower};
      if (std::isfinite(b.upper)) upper_rows.push_back({vars[j].column, b.upper - b.lower});
    } else if (std::isfinite(b.upper)) {
      vars[j] = {ColumnMap::mirrored, structural++, b.upper};
    } else {
      vars[j] = {ColumnMap::split, structural, 0.0};
      structural += 2;
    }
  }

  // Rows over structural columns with rhs >= 0.
  struct Row {
    std::vector<double> a;
    Relation rel;
    double b;
  };
  std::vector<Row> rows;
  rows.reserve(lp.constraints.size() + upper_rows.size());
  for (const auto& c : lp.constraints) {
    Row r{std::vector<double>(structural, 0.0), c.relation, c.rhs};
    for (std::size_t j = 0; j < n; ++j) {
      const double a = c.coefficients[j];
      if (a == 0.0) continue;
      const auto& m = vars[j];
      switch (m.kind) {
        case ColumnMap::shifted:
          r.a[m.column] += a;
          r.b -= a * m.offset;
          break;
        case ColumnMap::mirrored:
          r.a[m.column] -= a;
          r.b -= a * m.offset;
          break;
        case ColumnMap::split:
          r.a[m.column] += a;
          r.a[m.column + 1] -= a;
          break;
      }
    }
    rows.push_back(std::move(r));
  }
  for (const auto& u : upper_rows) {
    Row r{std::vector<double>(structural, 0.0), Relation::less_equal, u.width};
    r.a[u.column] = 1.0;
    rows.push_back(std::move(r));
  }
  for (auto& r : rows) {
    if (r.b < 0.0) {
      for (double& a : r.a) a = -a;
      r.b = -r.b;
      if (r.rel == Relation::less_equal) {
        r.rel = Relation::greater_equal;
      } else if (r.rel == Relation::greater_equal) {
        r.rel = Relation::less_equal;
      }
    }
  }

  // Column layout: structural | slack/surplus | artificial.
  const std::size_t m = rows.size();
  std::size_t slack_count = 0;
  std::size_t artificial_count = 0;
  for (const auto& r : rows) {
    if (r.rel != Relation::equal) ++slack_count;
    if (r.rel != Relation::less_equal) ++artificial_count;
  }
  const std::size_t first_slack = structural;
  const std::size_t first_artificial = structural + slack_count;
  const std::size_t cols = first_artificial + artificial_count;

  Tableau t(m, cols);
  std::size_t next_slack = first_slack;
  std::size_t next_artificial = first_artificial;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& r = rows[i];
    std::copy(r.a.begin(), r.a.end(), t.row(i).begin());
    t.rhs(i) = r.b;
    switch (r.rel) {
      case Relation::less_equal:
        t.at(i, next_slack) = 1.0;
        t.basis()[i] = next_slack++;
        break;
      case Relation::greater_equal:
        t.at(i, next_slack++) = -1.0;
        t.at(i, next_artificial) = 1.0;
        t.basis()[i] = next_artificial++;
        break;
      case Relation::equal:
        t.at(i, next_artificial) = 1.0;
        t.basis()[i] = next_artificial++;
        break;
    }
  }

  std::vector<bool> eligible(cols, true);
  const std::size_t obj = t.objective_row();
  double scale = 1.0;
  for (const auto& r : rows) scale = std::max(scale, std::abs(r.b));

  if (artificial_count > 0) {
    // Phase 1: maximize -(sum of artificials).
    for (std::size_t c = first_artificial; c < cols; ++c) t.at(obj, c) = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis()[i] >= first_artificial) kernels::axpy_neg(t.row(obj), t.row(i), 1.0);
    }
    const auto res = run_phase(t, eligible, opts, out.pivots);
    if (res == PhaseResult::pivot_limit) throw Error("linear program: pivot limit reached in phase 1");
    if (-t.rhs(obj) > opts.tolerance * scale) {
      out.status = Status::infeasible;
      return out;
    }
    // Drive remaining artificials out of the basis; drop redundant rows.
    for (std::size_t i = t.rows(); i-- > 0;) {
      if (t.basis()[i] < first_artificial) continue;
      std::size_t q = cols;
      double best = 1e-9;
      for (std::size_t c = 0; c < first_artificial; ++c) {
        if (std::abs(t.at(i, c)) > best) {
          best = std::abs(t.at(i, c));
          q = c;
        }
      }
      if (q == cols) {
        t.drop_row(i);
      } else {
        t.pivot(i, q);
        ++out.pivots;
      }
    }
    for (std::size_t c = first_artificial; c < cols; ++c) eligible[c] = false;
  }

  // Phase 2 objective: maximize c'x over the structural columns.
  const double sign = lp.sense == Sense::maximize ? 1.0 : -1.0;
  auto objrow = t.row(t.objective_row());
  std::fill(objrow.begin(), objrow.end(), 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double c = sign * lp.objective[j];
    const auto& map = vars[j];
    switch (map.kind) {
      case ColumnMap::shifted:
        objrow[map.column] = -c;
        break;
      case ColumnMap::mirrored:
        objrow[map.column] = c;
        break;
      case ColumnMap::split:
        objrow[map.column] = -c;
        objrow[map.column + 1] = c;
        break;
    }
  }
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const double f = objrow[t.basis()[i]];
    if (f != 0.0) kernels::axpy_neg(objrow, t.row(i), f);
  }
  const auto res = run_phase(t, eligible, opts, out.pivots);
  if (res == PhaseResult::pivot_limit) throw Error("linear program: pivot limit reached in phase 2");
  if (res == PhaseResult::unbounded) {
    out.status = Status::unbounded;
    return out;
  }

  std::vector<double> column_value(cols, 0.0);
  for (std::size_t i = 0; i < t.rows(); ++i) column_value[t.basis()[i]] = std::max(t.rhs(i), 0.0);
  out.assignment.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& map = vars[j];
    switch (map.kind) {
      case ColumnMap::shifted:
        out.assignment[j] = map.offset + column_value[map.column];
        break;
      case ColumnMap::mirrored:
        out.assignment[j] = map.offset - column_value[map.column];
        break;
      case ColumnMap::split:
        out.assignment[j] = column_value[map.column] - column_value[map.column + 1];
        break;
    }
  }
  double value = 0.0;
  for (std::size_t j = 0; j < n; ++j) value += lp.objective[j] * out.assignment[j];
  out.value = value;
  out.max_violation = max_violation(lp, out.assignment);
  out.status = Status::optimal;
  return out;
}

std::string to_debug_json(const LinearProgram& lp) {
  nlohmann::json j;
  j["sense"] = lp.sense == Sense::maximize ? "max" : "min";
  j["objective"] = lp.objective;
  auto& cs = j["constraints"] = nlohmann::json::array();
  for (const auto& c : lp.constraints) {
    const char* rel = c.relation == Relation::less_equal ? "<=" : c.relation == Relation::equal ? "=" : ">=";
    cs.push_back({{"coefficients", c.coefficients}, {"relation", rel}, {"rhs", c.rhs}});
  }
  auto& bs = j["bounds"] = nlohmann::json::array();
  for (const auto& b : lp.bounds) {
    auto enc = [](double v) -> nlohmann::json {
      if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
      return v;
    };
    bs.push_back({enc(b.lower), enc(b.upper)});
  }
  return j.dump();
}

}  // namespace lipfree::lp
