#pragma once

#include "linconj/lp.hpp"
#include "linconj/model.hpp"

#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

namespace linconj {

/// The model admits no realization (with strictly positive scaling) under the
/// active constraints.
class NotRealizable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Column positions of the realization unknowns inside an assembled program.
/// Off-diagonal Kirchhoff entries come first in column-major order (edge
/// source, then target), followed by the diagonal of T^-1.
class VariableMap {
 public:
  VariableMap() = default;
  VariableMap(Index num_species, Index num_complexes) : n_(num_species), m_(num_complexes) {}

  Index n() const { return n_; }
  Index m() const { return m_; }
  Index num_rates() const { return m_ * (m_ - 1); }
  Index num_vars() const { return num_rates() + n_; }

  Index rate(Edge e) const {
    return static_cast<Index>(e.source) * (m_ - 1) + (e.target < e.source ? e.target : e.target - 1);
  }
  Index scaling(Index species) const { return num_rates() + species; }
  Edge edge_at(Index var) const {
    const auto src = static_cast<int>(var / (m_ - 1));
    auto dst = static_cast<int>(var % (m_ - 1));
    if (dst >= src) ++dst;
    return {src, dst};
  }

 private:
  Index n_ = 0;
  Index m_ = 0;
};

enum class Relation { Equal, LessEqual, GreaterEqual };

/// coeffs . v (rel) rhs, with v laid out as in VariableMap.
struct LinearConstraint {
  Eigen::VectorXd coeffs;
  Relation relation = Relation::Equal;
  double rhs = 0.0;
};

struct ConstraintOptions {
  /// Box bound on every unknown.
  double upper_bound = 1.0;
  /// Absolute presence threshold for an edge.
  double support_tol = 1e-6;
  /// Reactions that must not occur.
  std::set<Edge> excluded;
  /// Strictly positive species weights k, adds k^T Y A_k = 0.
  std::optional<Eigen::VectorXd> mass_vector;
  std::vector<LinearConstraint> extra_linear;

  void validate(const CrnModel& model) const;
  bool homogeneous() const;
};

struct AssembledProgram {
  LinearProgram lp;
  VariableMap vars;
};

/// All edges that are not loops.
GraphStructure complete_structure(int num_complexes);

/// Builds the constraint system Y A_k = diag(t_inv) M over the off-diagonal
/// rates and t_inv, with Kirchhoff diagonals eliminated. Rates outside
/// `allowed` (or listed in opts.excluded) are fixed to zero. Inequality rows
/// get slack columns appended after the VariableMap range. Objective is zero.
AssembledProgram assemble(const CrnModel& model, const GraphStructure& allowed, const ConstraintOptions& opts);

/// Result of maximizing the support of a polytope over chosen coordinates.
struct SupportPoint {
  std::vector<bool> present;  // per candidate coordinate
  Eigen::VectorXd point;      // average of the maximizers, support = union
};

/// Polytope support maximization by averaging maximizers.
///
/// Every coordinate in `positive` must be strictly positive for a point to
/// count; if any of them has maximum <= tol the result is empty. Candidates
/// already above tol in the running average are not maximized again, and
/// candidates flagged in `known` are taken as present without an LP solve.
/// Issues at most |positive| + |candidates| solves.
std::optional<SupportPoint> maximize_support(LpSolver& solver, LinearProgram lp, std::span<const Index> positive,
                                             std::span<const Index> candidates, const std::vector<bool>& known,
                                             double tol);

struct MaxSupportResult {
  GraphStructure structure;
  Realization witness;
};

/// Largest realizable structure with support inside `allowed`, plus a witness
/// whose support is exactly that structure. Empty when no realization with
/// strictly positive t_inv exists. Edges in `known_present` are assumed to be
/// present (core edges) and are not individually maximized.
std::optional<MaxSupportResult> max_support(const CrnModel& model, const GraphStructure& allowed,
                                            const ConstraintOptions& opts, LpSolver& solver,
                                            const GraphStructure* known_present = nullptr);
std::optional<MaxSupportResult> max_support(const CrnModel& model, const GraphStructure& allowed,
                                            const ConstraintOptions& opts);

/// True iff some realization with strictly positive t_inv has support inside `allowed`.
bool realizable(const CrnModel& model, const GraphStructure& allowed, const ConstraintOptions& opts,
                LpSolver& solver);

/// The unconstrained dense realization. Throws NotRealizable.
MaxSupportResult dense_realization(const CrnModel& model, const ConstraintOptions& opts, LpSolver& solver);

/// Edges whose removal from `dense` leaves no realization.
GraphStructure core_edges(const CrnModel& model, const GraphStructure& dense, const ConstraintOptions& opts,
                          LpSolver& solver);

/// Constrained dense realization inside (core + edges set in r) minus the i-th
/// non-core edge, re-encoded; empty when no realization exists.
std::optional<BitSeq> find_linconj_without_edge(const CrnModel& model, const BitSeq& r, std::size_t i,
                                                const EdgeOrdering& ord, const ConstraintOptions& opts,
                                                LpSolver& solver, Realization* witness = nullptr);

// ---------------------------------------------------------------------------
// Dynamical equivalence: T fixed to identity, columns of A_k decouple.

/// Support of one Kirchhoff column (edges leaving complex j) with its rates.
struct ColumnSupport {
  GraphStructure structure;  // only edges with source j
  Eigen::VectorXd rates;     // column j of A_k, diagonal included
};

/// Maximal support of column j among dynamically equivalent realizations,
/// restricted to edges in `allowed` with source j.
std::optional<ColumnSupport> column_max_support(const CrnModel& model, int j, const GraphStructure& allowed,
                                                const ConstraintOptions& opts, LpSolver& solver,
                                                const GraphStructure* known_present = nullptr);
std::optional<ColumnSupport> column_dense(const CrnModel& model, int j, const ConstraintOptions& opts,
                                          LpSolver& solver);
/// Edges of column j that every dynamically equivalent realization uses.
GraphStructure column_core_edges(const CrnModel& model, int j, const GraphStructure& column_dense,
                                 const ConstraintOptions& opts, LpSolver& solver);
std::optional<BitSeq> dyneq_column_without_edge(const CrnModel& model, int j, const BitSeq& r_j, std::size_t i,
                                                const EdgeOrdering& column_ord, const ConstraintOptions& opts,
                                                LpSolver& solver);

// ---------------------------------------------------------------------------
// Checks shared by tests and the CLI.

/// max_j |sum_i a_k(i,j)| relative to max|a_k|.
double column_conservation_error(const Eigen::MatrixXd& a_k);
/// ||diag(t_inv) M - Y a_k||_inf / (1 + ||M||_inf).
double residual(const CrnModel& model, const Realization& real);

}  // namespace linconj
