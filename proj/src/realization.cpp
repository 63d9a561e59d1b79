#include "linconj/realization.hpp"

#include <algorithm>
#include <sstream>

namespace linconj {

void ConstraintOptions::validate(const CrnModel& model) const {
  if (!(upper_bound > 0) || !std::isfinite(upper_bound)) throw std::invalid_argument("upper bound must be positive");
  if (!(support_tol > 0) || !(support_tol < upper_bound)) {
    throw std::invalid_argument("support tolerance must lie in (0, upper bound)");
  }
  for (Edge e : excluded) {
    if (e.source < 0 || e.target < 0 || e.source >= model.m() || e.target >= model.m() || e.source == e.target) {
      throw std::invalid_argument("excluded edge outside the complex set");
    }
  }
  if (mass_vector) {
    if (mass_vector->size() != model.n()) throw std::invalid_argument("mass vector dimension mismatch");
    if ((mass_vector->array() <= 0).any()) throw std::invalid_argument("mass vector must be strictly positive");
  }
  const VariableMap vars(model.n(), model.m());
  for (const auto& c : extra_linear) {
    if (c.coeffs.size() != vars.num_vars()) throw std::invalid_argument("extra constraint has the wrong length");
  }
}

bool ConstraintOptions::homogeneous() const {
  return std::all_of(extra_linear.begin(), extra_linear.end(), [](const auto& c) { return c.rhs == 0.0; });
}

GraphStructure complete_structure(int num_complexes) {
  std::vector<Edge> edges;
  for (int s = 0; s < num_complexes; ++s) {
    for (int t = 0; t < num_complexes; ++t) {
      if (s != t) edges.push_back({s, t});
    }
  }
  return GraphStructure(num_complexes, std::move(edges));
}

AssembledProgram assemble(const CrnModel& model, const GraphStructure& allowed, const ConstraintOptions& opts) {
  opts.validate(model);
  const Index n = model.n();
  const Index m = model.m();
  const VariableMap vars(n, m);
  const auto& y = model.Y();
  const auto& coef = model.M();

  Index slacks = 0;
  for (const auto& c : opts.extra_linear) {
    if (c.relation != Relation::Equal) ++slacks;
  }
  const Index mass_rows = opts.mass_vector ? m : 0;
  const Index rows = n * m + mass_rows + static_cast<Index>(opts.extra_linear.size());
  const Index cols = vars.num_vars() + slacks;

  LinearProgram lp;
  lp.eq_matrix = Eigen::MatrixXd::Zero(rows, cols);
  lp.eq_rhs = Eigen::VectorXd::Zero(rows);
  lp.objective = Eigen::VectorXd::Zero(cols);
  lp.lower = Eigen::VectorXd::Zero(cols);
  lp.upper = Eigen::VectorXd::Zero(cols);

  // Row (j, i): sum_{l != j} a_{lj} (Y_il - Y_ij) - M_ij t_i = 0.
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < n; ++i) {
      const Index row = j * n + i;
      for (Index l = 0; l < m; ++l) {
        if (l == j) continue;
        lp.eq_matrix(row, vars.rate({static_cast<int>(j), static_cast<int>(l)})) = y(i, l) - y(i, j);
      }
      lp.eq_matrix(row, vars.scaling(i)) = -coef(i, j);
    }
  }
  if (opts.mass_vector) {
    const Eigen::RowVectorXd weight = opts.mass_vector->transpose() * y.cast<double>();
    for (Index j = 0; j < m; ++j) {
      const Index row = n * m + j;
      for (Index l = 0; l < m; ++l) {
        if (l == j) continue;
        lp.eq_matrix(row, vars.rate({static_cast<int>(j), static_cast<int>(l)})) = weight(l) - weight(j);
      }
    }
  }

  const double u = opts.upper_bound;
  for (Edge e : allowed.edges()) {
    if (!opts.excluded.contains(e)) lp.upper(vars.rate(e)) = u;
  }
  for (Index i = 0; i < n; ++i) lp.upper(vars.scaling(i)) = u;

  Index row = n * m + mass_rows;
  Index slack = vars.num_vars();
  for (const auto& c : opts.extra_linear) {
    lp.eq_matrix.row(row).head(vars.num_vars()) = c.coeffs.transpose();
    lp.eq_rhs(row) = c.rhs;
    if (c.relation != Relation::Equal) {
      // coeffs.v + s = rhs (<=) or coeffs.v - s = rhs (>=), s bounded by the box range.
      const double sgn = c.relation == Relation::LessEqual ? 1.0 : -1.0;
      double lo = 0.0;
      double hi = 0.0;
      for (Index k = 0; k < vars.num_vars(); ++k) {
        const double a = c.coeffs(k) * lp.upper(k);
        lo += std::min(a, 0.0);
        hi += std::max(a, 0.0);
      }
      lp.eq_matrix(row, slack) = sgn;
      lp.upper(slack) = std::max(0.0, c.relation == Relation::LessEqual ? c.rhs - lo : hi - c.rhs);
      ++slack;
    }
    ++row;
  }
  return {std::move(lp), vars};
}

std::optional<SupportPoint> maximize_support(LpSolver& solver, LinearProgram lp, std::span<const Index> positive,
                                             std::span<const Index> candidates, const std::vector<bool>& known,
                                             double tol) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(lp.num_vars());
  int count = 0;
  auto maximize = [&](Index var) -> std::optional<double> {
    lp.objective.setZero();
    lp.objective(var) = 1.0;
    const auto out = solver.solve(lp);
    if (!out.optimal()) return std::nullopt;
    if (out.value > tol) {
      sum += out.point;
      ++count;
    }
    return out.value;
  };

  for (Index p : positive) {
    const auto v = maximize(p);
    if (!v || *v <= tol) return std::nullopt;
  }
  if (count == 0) {
    lp.objective.setZero();
    const auto out = solver.solve(lp);
    if (!out.optimal()) return std::nullopt;
    sum += out.point;
    ++count;
  }

  SupportPoint result;
  result.present.assign(candidates.size(), false);
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const Index var = candidates[k];
    if (k < known.size() && known[k]) {
      result.present[k] = true;
      continue;
    }
    if (sum(var) / count > tol) {
      result.present[k] = true;
      continue;
    }
    const auto v = maximize(var);
    if (!v) return std::nullopt;
    result.present[k] = *v > tol;
  }
  result.point = sum / count;
  return result;
}

namespace {

Realization witness_from_point(const VariableMap& vars, Eigen::VectorXd point, const ConstraintOptions& opts) {
  auto head = point.head(vars.num_vars());
  head = head.cwiseMax(0.0);
  if (opts.homogeneous()) {
    // The feasible set is a cone cut by the box; scale the witness up to the box.
    const double peak = head.maxCoeff();
    if (peak > 0) head *= opts.upper_bound / peak;
  }
  Realization real;
  const Index m = vars.m();
  real.t_inv = head.tail(vars.n());
  real.a_k = Eigen::MatrixXd::Zero(m, m);
  for (Index v = 0; v < vars.num_rates(); ++v) {
    const Edge e = vars.edge_at(v);
    real.a_k(e.target, e.source) = head(v);
  }
  for (Index j = 0; j < m; ++j) real.a_k(j, j) = -(real.a_k.col(j).sum() - real.a_k(j, j));
  return real;
}

}  // namespace

std::optional<MaxSupportResult> max_support(const CrnModel& model, const GraphStructure& allowed,
                                            const ConstraintOptions& opts, LpSolver& solver,
                                            const GraphStructure* known_present) {
  auto [lp, vars] = assemble(model, allowed, opts);
  std::vector<Index> positive;
  for (Index i = 0; i < model.n(); ++i) positive.push_back(vars.scaling(i));
  std::vector<Index> candidates;
  std::vector<Edge> candidate_edges;
  std::vector<bool> known;
  for (Edge e : allowed.edges()) {
    if (opts.excluded.contains(e)) continue;
    candidates.push_back(vars.rate(e));
    candidate_edges.push_back(e);
    known.push_back(known_present && known_present->contains(e));
  }
  auto support = maximize_support(solver, std::move(lp), positive, candidates, known, opts.support_tol);
  if (!support) return std::nullopt;

  std::vector<Edge> edges;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (support->present[k]) edges.push_back(candidate_edges[k]);
  }
  MaxSupportResult result{GraphStructure(static_cast<int>(model.m()), std::move(edges)),
                          witness_from_point(vars, std::move(support->point), opts)};
  return result;
}

std::optional<MaxSupportResult> max_support(const CrnModel& model, const GraphStructure& allowed,
                                            const ConstraintOptions& opts) {
  SimplexSolver solver;
  return max_support(model, allowed, opts, solver);
}

bool realizable(const CrnModel& model, const GraphStructure& allowed, const ConstraintOptions& opts,
                LpSolver& solver) {
  auto [lp, vars] = assemble(model, allowed, opts);
  for (Index i = 0; i < model.n(); ++i) {
    lp.objective.setZero();
    lp.objective(vars.scaling(i)) = 1.0;
    const auto out = solver.solve(lp);
    if (!out.optimal() || out.value <= opts.support_tol) return false;
  }
  if (model.n() == 0) return solver.feasible(lp);
  return true;
}

MaxSupportResult dense_realization(const CrnModel& model, const ConstraintOptions& opts, LpSolver& solver) {
  auto result = max_support(model, complete_structure(static_cast<int>(model.m())), opts, solver);
  if (!result) {
    throw NotRealizable("the kinetic system has no linearly conjugate realization on the given complexes");
  }
  return std::move(*result);
}

GraphStructure core_edges(const CrnModel& model, const GraphStructure& dense, const ConstraintOptions& opts,
                          LpSolver& solver) {
  GraphStructure core(dense.num_complexes());
  for (Edge e : dense.edges()) {
    GraphStructure without = dense;
    without.erase(e);
    if (!realizable(model, without, opts, solver)) core.insert(e);
  }
  return core;
}

std::optional<BitSeq> find_linconj_without_edge(const CrnModel& model, const BitSeq& r, std::size_t i,
                                                const EdgeOrdering& ord, const ConstraintOptions& opts,
                                                LpSolver& solver, Realization* witness) {
  if (i >= r.size() || !r.test(i)) throw std::invalid_argument("find_linconj_without_edge: bit i must be set");
  GraphStructure allowed = decode(r, ord);
  allowed.erase(ord.edges()[i]);
  auto result = max_support(model, allowed, opts, solver, &ord.core());
  if (!result) return std::nullopt;
  if (witness) *witness = std::move(result->witness);
  return encode(result->structure, ord);
}

// ---------------------------------------------------------------------------
// Column subproblems

namespace {

struct ColumnProgram {
  LinearProgram lp;
  Index scale_var = 0;
};

Index column_var(int j, int target) { return target < j ? target : target - 1; }

ColumnProgram assemble_column(const CrnModel& model, int j, const GraphStructure& allowed,
                              const ConstraintOptions& opts) {
  opts.validate(model);
  if (!opts.extra_linear.empty()) {
    throw std::invalid_argument("extra linear constraints are not supported for dynamical equivalence");
  }
  const Index n = model.n();
  const Index m = model.m();
  const auto& y = model.Y();
  const Index rows = n + (opts.mass_vector ? 1 : 0);
  const Index cols = m;  // m-1 rates + scale
  ColumnProgram cp;
  cp.scale_var = m - 1;
  auto& lp = cp.lp;
  lp.eq_matrix = Eigen::MatrixXd::Zero(rows, cols);
  lp.eq_rhs = Eigen::VectorXd::Zero(rows);
  lp.objective = Eigen::VectorXd::Zero(cols);
  lp.lower = Eigen::VectorXd::Zero(cols);
  lp.upper = Eigen::VectorXd::Zero(cols);
  for (int l = 0; l < m; ++l) {
    if (l == j) continue;
    for (Index i = 0; i < n; ++i) lp.eq_matrix(i, column_var(j, l)) = y(i, l) - y(i, j);
  }
  // Rates scaled by 1/s reproduce M exactly; s stands in for an unbounded box.
  for (Index i = 0; i < n; ++i) lp.eq_matrix(i, cp.scale_var) = -model.M()(i, j);
  if (opts.mass_vector) {
    const Eigen::RowVectorXd weight = opts.mass_vector->transpose() * y.cast<double>();
    for (int l = 0; l < m; ++l) {
      if (l != j) lp.eq_matrix(n, column_var(j, l)) = weight(l) - weight(j);
    }
  }
  for (Edge e : allowed.edges()) {
    if (e.source == j && !opts.excluded.contains(e)) lp.upper(column_var(j, e.target)) = opts.upper_bound;
  }
  lp.upper(cp.scale_var) = opts.upper_bound;
  return cp;
}

GraphStructure column_edges(int m, int j) {
  std::vector<Edge> edges;
  for (int t = 0; t < m; ++t) {
    if (t != j) edges.push_back({j, t});
  }
  return GraphStructure(m, std::move(edges));
}

bool column_realizable(const CrnModel& model, int j, const GraphStructure& allowed, const ConstraintOptions& opts,
                       LpSolver& solver) {
  auto cp = assemble_column(model, j, allowed, opts);
  cp.lp.objective(cp.scale_var) = 1.0;
  const auto out = solver.solve(cp.lp);
  return out.optimal() && out.value > opts.support_tol;
}

}  // namespace

std::optional<ColumnSupport> column_max_support(const CrnModel& model, int j, const GraphStructure& allowed,
                                                const ConstraintOptions& opts, LpSolver& solver,
                                                const GraphStructure* known_present) {
  if (j < 0 || j >= model.m()) throw std::out_of_range("column index outside the complex set");
  auto cp = assemble_column(model, j, allowed, opts);
  const Index positive[] = {cp.scale_var};
  std::vector<Index> candidates;
  std::vector<Edge> candidate_edges;
  std::vector<bool> known;
  for (Edge e : allowed.edges()) {
    if (e.source != j || opts.excluded.contains(e)) continue;
    known.push_back(known_present && known_present->contains(e));
    candidates.push_back(column_var(j, e.target));
    candidate_edges.push_back(e);
  }
  auto support = maximize_support(solver, std::move(cp.lp), positive, candidates, known, opts.support_tol);
  if (!support) return std::nullopt;
  ColumnSupport out;
  out.structure = GraphStructure(static_cast<int>(model.m()));
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (support->present[k]) out.structure.insert(candidate_edges[k]);
  }
  const double s = support->point(cp.scale_var);
  out.rates = Eigen::VectorXd::Zero(model.m());
  for (int l = 0; l < model.m(); ++l) {
    if (l == j) continue;
    out.rates(l) = std::max(0.0, support->point(column_var(j, l))) / s;
  }
  out.rates(j) = -out.rates.sum();
  return out;
}

std::optional<ColumnSupport> column_dense(const CrnModel& model, int j, const ConstraintOptions& opts,
                                          LpSolver& solver) {
  return column_max_support(model, j, column_edges(static_cast<int>(model.m()), j), opts, solver);
}

GraphStructure column_core_edges(const CrnModel& model, int j, const GraphStructure& column_dense,
                                 const ConstraintOptions& opts, LpSolver& solver) {
  GraphStructure core(column_dense.num_complexes());
  for (Edge e : column_dense.edges()) {
    GraphStructure without = column_dense;
    without.erase(e);
    if (!column_realizable(model, j, without, opts, solver)) core.insert(e);
  }
  return core;
}

std::optional<BitSeq> dyneq_column_without_edge(const CrnModel& model, int j, const BitSeq& r_j, std::size_t i,
                                                const EdgeOrdering& column_ord, const ConstraintOptions& opts,
                                                LpSolver& solver) {
  if (i >= r_j.size() || !r_j.test(i)) throw std::invalid_argument("dyneq_column_without_edge: bit i must be set");
  GraphStructure allowed = decode(r_j, column_ord);
  allowed.erase(column_ord.edges()[i]);
  auto result = column_max_support(model, j, allowed, opts, solver, &column_ord.core());
  if (!result) return std::nullopt;
  return encode(result->structure, column_ord);
}

// ---------------------------------------------------------------------------

double column_conservation_error(const Eigen::MatrixXd& a_k) {
  const double scale = a_k.cwiseAbs().maxCoeff();
  if (scale == 0) return 0;
  return a_k.colwise().sum().cwiseAbs().maxCoeff() / scale;
}

double residual(const CrnModel& model, const Realization& real) {
  const Eigen::MatrixXd diff = real.t_inv.asDiagonal() * model.M() - model.Y().cast<double>() * real.a_k;
  const double mnorm = model.M().size() ? model.M().cwiseAbs().maxCoeff() : 0.0;
  return (diff.size() ? diff.cwiseAbs().maxCoeff() : 0.0) / (1.0 + mnorm);
}

}  // namespace linconj
