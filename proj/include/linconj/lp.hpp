#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace linconj {

class LpNumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// maximize c.v  subject to  A v = b,  lower <= v <= upper.
template <typename Scalar>
struct BasicLinearProgram {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Vector objective;
  Matrix eq_matrix;
  Vector eq_rhs;
  Vector lower;
  Vector upper;

  Eigen::Index num_vars() const { return eq_matrix.cols(); }
  Eigen::Index num_rows() const { return eq_matrix.rows(); }

  void validate() const {
    const auto v = num_vars();
    if (objective.size() != v || lower.size() != v || upper.size() != v || eq_rhs.size() != num_rows()) {
      throw std::invalid_argument("linear program: inconsistent dimensions");
    }
    for (Eigen::Index j = 0; j < v; ++j) {
      if (!std::isfinite(static_cast<double>(lower(j))) || !std::isfinite(static_cast<double>(upper(j)))) {
        throw std::invalid_argument("linear program: bounds must be finite");
      }
      if (lower(j) > upper(j)) throw std::invalid_argument("linear program: lower bound exceeds upper bound");
    }
  }
};

enum class LpStatus { Optimal, Infeasible };

template <typename Scalar>
struct BasicLpOutcome {
  LpStatus status = LpStatus::Infeasible;
  typename BasicLinearProgram<Scalar>::Vector point;
  Scalar value = 0;

  bool optimal() const { return status == LpStatus::Optimal; }
};

struct SimplexOptions {
  double pivot_tol = 1e-9;
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-9;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  int degenerate_limit = 50;
  /// 0 selects 50 * (rows + columns).
  int max_iterations = 0;
};

/// Bounded-variable primal simplex (two phases, artificial basis). The basis
/// is refactorized from scratch every iteration; problems here have tens of
/// rows, so the dense LU is cheap and keeps round-off from accumulating.
///
/// Pricing is Dantzig's rule until `degenerate_limit` consecutive degenerate
/// pivots occur, then Bland's rule until the next improving pivot.
template <typename Scalar>
class BoundedSimplex {
 public:
  using Program = BasicLinearProgram<Scalar>;
  using Outcome = BasicLpOutcome<Scalar>;
  using Vector = typename Program::Vector;
  using Matrix = typename Program::Matrix;

  explicit BoundedSimplex(SimplexOptions opts = {}) : opts_(opts) {}

  const SimplexOptions& options() const { return opts_; }

  Outcome solve(const Program& lp) {
    lp.validate();
    setup(lp);

    Outcome out;
    const Scalar rhs_scale = 1 + (lp.eq_rhs.size() ? lp.eq_rhs.cwiseAbs().maxCoeff() : Scalar(0));
    bool need_phase1 = false;
    for (Eigen::Index r = 0; r < rows_; ++r) {
      if (x_(vars_ + r) > Scalar(opts_.feasibility_tol) * rhs_scale) need_phase1 = true;
    }
    if (need_phase1) {
      cost_.setZero();
      cost_.tail(rows_).setConstant(-1);
      iterate();
      Scalar infeas = 0;
      for (Eigen::Index r = 0; r < rows_; ++r) infeas += x_(vars_ + r);
      if (infeas > Scalar(opts_.feasibility_tol) * rhs_scale) {
        out.status = LpStatus::Infeasible;
        return out;
      }
    }
    // Artificials are pinned at zero from here on.
    for (Eigen::Index r = 0; r < rows_; ++r) {
      upper_(vars_ + r) = 0;
      if (state_[static_cast<std::size_t>(vars_ + r)] != kBasic) {
        state_[static_cast<std::size_t>(vars_ + r)] = kAtLower;
        x_(vars_ + r) = 0;
      }
    }
    cost_.setZero();
    cost_.head(vars_) = lp.objective;
    iterate();

    out.status = LpStatus::Optimal;
    out.point = x_.head(vars_);
    for (Eigen::Index j = 0; j < vars_; ++j) {
      out.point(j) = std::min(std::max(out.point(j), lp.lower(j)), lp.upper(j));
    }
    out.value = lp.objective.dot(out.point);
    return out;
  }

 private:
  enum State : std::uint8_t { kBasic, kAtLower, kAtUpper };

  void setup(const Program& lp) {
    a_ = &lp.eq_matrix;
    b_ = &lp.eq_rhs;
    rows_ = lp.num_rows();
    vars_ = lp.num_vars();
    const auto total = vars_ + rows_;
    lower_.resize(total);
    upper_.resize(total);
    x_.resize(total);
    cost_.resize(total);
    state_.assign(static_cast<std::size_t>(total), kAtLower);
    basis_.resize(static_cast<std::size_t>(rows_));
    sign_.resize(rows_);
    lower_.head(vars_) = lp.lower;
    upper_.head(vars_) = lp.upper;
    x_.head(vars_) = lp.lower;
    const Vector residual = lp.eq_rhs - lp.eq_matrix * lp.lower;
    for (Eigen::Index r = 0; r < rows_; ++r) {
      sign_(r) = residual(r) >= 0 ? Scalar(1) : Scalar(-1);
      lower_(vars_ + r) = 0;
      upper_(vars_ + r) = std::numeric_limits<Scalar>::infinity();
      x_(vars_ + r) = std::abs(residual(r));
      basis_[static_cast<std::size_t>(r)] = vars_ + r;
      state_[static_cast<std::size_t>(vars_ + r)] = kBasic;
    }
    basis_matrix_.resize(rows_, rows_);
  }

  // Column j of [A | diag(sign)] times a scalar, accumulated into `out`.
  void add_column(Eigen::Index j, Scalar factor, Vector& out) const {
    if (j < vars_) {
      out.noalias() += factor * a_->col(j);
    } else {
      out(j - vars_) += factor * sign_(j - vars_);
    }
  }

  Scalar column_dot(Eigen::Index j, const Vector& y) const {
    if (j < vars_) return a_->col(j).dot(y);
    return sign_(j - vars_) * y(j - vars_);
  }

  void factorize() {
    if (rows_ == 0) return;
    basis_matrix_.setZero();
    for (Eigen::Index r = 0; r < rows_; ++r) {
      const Eigen::Index j = basis_[static_cast<std::size_t>(r)];
      if (j < vars_) {
        basis_matrix_.col(r) = a_->col(j);
      } else {
        basis_matrix_(j - vars_, r) = sign_(j - vars_);
      }
    }
    lu_.compute(basis_matrix_);
    const Scalar scale = std::max(Scalar(1), basis_matrix_.cwiseAbs().maxCoeff());
    if (lu_.matrixLU().diagonal().cwiseAbs().minCoeff() < Scalar(opts_.pivot_tol) * scale) {
      throw LpNumericalFailure("simplex: basis matrix is numerically singular");
    }
  }

  void recompute_basic_values() {
    if (rows_ == 0) return;
    Vector rhs = *b_;
    const auto total = vars_ + rows_;
    for (Eigen::Index j = 0; j < total; ++j) {
      if (state_[static_cast<std::size_t>(j)] != kBasic && x_(j) != 0) add_column(j, -x_(j), rhs);
    }
    const Vector xb = lu_.solve(rhs);
    for (Eigen::Index r = 0; r < rows_; ++r) x_(basis_[static_cast<std::size_t>(r)]) = xb(r);
  }

  void iterate() {
    const auto total = vars_ + rows_;
    const int limit = opts_.max_iterations > 0 ? opts_.max_iterations : static_cast<int>(50 * (total + 1));
    int degenerate_run = 0;
    Vector cb(rows_);
    Vector w(rows_);
    Vector col(rows_);
    for (int iter = 0;; ++iter) {
      if (iter > limit) throw LpNumericalFailure("simplex: iteration limit exceeded");
      factorize();
      recompute_basic_values();
      for (Eigen::Index r = 0; r < rows_; ++r) cb(r) = cost_(basis_[static_cast<std::size_t>(r)]);
      const Vector y = rows_ ? Vector(lu_.transpose().solve(cb)) : Vector(0);

      const bool bland = degenerate_run >= opts_.degenerate_limit;
      Eigen::Index entering = -1;
      Scalar best = 0;
      for (Eigen::Index j = 0; j < total; ++j) {
        const State s = state_[static_cast<std::size_t>(j)];
        if (s == kBasic || !(upper_(j) > lower_(j))) continue;
        const Scalar d = cost_(j) - column_dot(j, y);
        const bool improving = (s == kAtLower && d > Scalar(opts_.optimality_tol)) ||
                               (s == kAtUpper && d < -Scalar(opts_.optimality_tol));
        if (!improving) continue;
        if (bland) {
          entering = j;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          entering = j;
        }
      }
      if (entering < 0) return;

      col.setZero();
      add_column(entering, 1, col);
      if (rows_) w = lu_.solve(col);
      const Scalar dir = state_[static_cast<std::size_t>(entering)] == kAtLower ? Scalar(1) : Scalar(-1);

      // Basic variable r moves by -dir * theta * w(r).
      Scalar theta = upper_(entering) - lower_(entering);
      Eigen::Index leave = -1;
      bool leave_to_upper = false;
      Scalar leave_pivot = 0;
      const Scalar tie = Scalar(1e-12);
      for (Eigen::Index r = 0; r < rows_; ++r) {
        const Scalar delta = dir * w(r);
        if (std::abs(delta) <= Scalar(opts_.pivot_tol)) continue;
        const Eigen::Index bv = basis_[static_cast<std::size_t>(r)];
        Scalar limit_r;
        bool to_upper;
        if (delta > 0) {
          limit_r = std::max(Scalar(0), x_(bv) - lower_(bv)) / delta;
          to_upper = false;
        } else {
          if (!std::isfinite(static_cast<double>(upper_(bv)))) continue;
          limit_r = std::max(Scalar(0), upper_(bv) - x_(bv)) / -delta;
          to_upper = true;
        }
        bool take = false;
        if (limit_r < theta - tie) {
          take = true;
        } else if (limit_r <= theta + tie && leave >= 0) {
          // Tie: Bland prefers the smallest variable index, otherwise the largest pivot.
          take = bland ? bv < basis_[static_cast<std::size_t>(leave)] : std::abs(delta) > leave_pivot;
        } else if (limit_r <= theta + tie && leave < 0) {
          // Tie with the bound flip: prefer the flip, it keeps the basis.
          take = false;
        }
        if (take) {
          theta = std::min(theta, limit_r);
          leave = r;
          leave_to_upper = to_upper;
          leave_pivot = std::abs(delta);
        }
      }

      if (theta <= Scalar(1e-12)) {
        ++degenerate_run;
      } else {
        degenerate_run = 0;
      }

      if (leave < 0) {
        // Bound flip, basis unchanged.
        auto& s = state_[static_cast<std::size_t>(entering)];
        s = s == kAtLower ? kAtUpper : kAtLower;
        x_(entering) = s == kAtLower ? lower_(entering) : upper_(entering);
        continue;
      }
      const Eigen::Index bv = basis_[static_cast<std::size_t>(leave)];
      state_[static_cast<std::size_t>(bv)] = leave_to_upper ? kAtUpper : kAtLower;
      x_(bv) = leave_to_upper ? upper_(bv) : lower_(bv);
      x_(entering) += dir * theta;
      state_[static_cast<std::size_t>(entering)] = kBasic;
      basis_[static_cast<std::size_t>(leave)] = entering;
    }
  }

  SimplexOptions opts_;
  const Matrix* a_ = nullptr;
  const Vector* b_ = nullptr;
  Eigen::Index rows_ = 0;
  Eigen::Index vars_ = 0;
  Vector lower_, upper_, x_, cost_, sign_;
  std::vector<State> state_;
  std::vector<Eigen::Index> basis_;
  Matrix basis_matrix_;
  Eigen::PartialPivLU<Matrix> lu_;
};

using LinearProgram = BasicLinearProgram<double>;
using LpOutcome = BasicLpOutcome<double>;

/// Backend interface. Instances hold mutable working state: use one per worker.
class LpSolver {
 public:
  virtual ~LpSolver() = default;

  LpOutcome solve(const LinearProgram& lp) {
    ++solves_;
    return do_solve(lp);
  }
  bool feasible(const LinearProgram& lp) {
    LinearProgram zero = lp;
    zero.objective.setZero();
    return solve(zero).optimal();
  }
  /// Number of solve() calls made on this instance.
  std::uint64_t solves() const { return solves_; }

 protected:
  virtual LpOutcome do_solve(const LinearProgram& lp) = 0;

 private:
  std::uint64_t solves_ = 0;
};

class SimplexSolver final : public LpSolver {
 public:
  explicit SimplexSolver(SimplexOptions opts = {}) : simplex_(opts) {}

 protected:
  LpOutcome do_solve(const LinearProgram& lp) override { return simplex_.solve(lp); }

 private:
  BoundedSimplex<double> simplex_;
};

inline std::unique_ptr<LpSolver> make_default_solver(SimplexOptions opts = {}) {
  return std::make_unique<SimplexSolver>(opts);
}

inline LpOutcome solve(const LinearProgram& lp, SimplexOptions opts = {}) { return SimplexSolver(opts).solve(lp); }
inline bool feasible(const LinearProgram& lp, SimplexOptions opts = {}) { return SimplexSolver(opts).feasible(lp); }

}  // namespace linconj
