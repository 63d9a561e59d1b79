#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace linconj {

using Index = Eigen::Index;

class InvalidModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A reaction C_source -> C_target. Complex indices are 0-based in the API;
/// the CLI and file formats use 1-based labels.
struct Edge {
  int source = 0;
  int target = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// One exponent vector per complex.
using ComplexList = std::vector<std::vector<double>>;

/// A kinetic polynomial system x' = M psi(x) fixed on a complex set.
///
/// Column j of `Y` holds the stoichiometric coefficients of complex C_j, and
/// column j of `M` the coefficients of the monomial psi_j in the right-hand
/// side. Instances are immutable and validated by `build_network`.
class CrnModel {
 public:
  const std::vector<std::string>& species() const { return species_; }
  const Eigen::MatrixXi& Y() const { return y_; }
  const Eigen::MatrixXd& M() const { return m_; }
  Index n() const { return y_.rows(); }
  Index m() const { return y_.cols(); }

 private:
  friend CrnModel build_network(std::vector<std::string>, const ComplexList&,
                                const Eigen::MatrixXd&);
  friend CrnModel build_network(std::vector<std::string>, const Eigen::MatrixXi&, const Eigen::MatrixXd&);

  CrnModel(std::vector<std::string> species, Eigen::MatrixXi y, Eigen::MatrixXd m)
      : species_(std::move(species)), y_(std::move(y)), m_(std::move(m)) {}

  std::vector<std::string> species_;
  Eigen::MatrixXi y_;
  Eigen::MatrixXd m_;
};

/// Validates and assembles a model; one exponent vector per complex.
/// Throws InvalidModel on dimension mismatch, negative or fractional exponents,
/// non-finite coefficients or duplicate complexes.
CrnModel build_network(std::vector<std::string> species, const ComplexList& complexes,
                       const Eigen::MatrixXd& coefficients);
CrnModel build_network(std::vector<std::string> species, const Eigen::MatrixXi& y,
                       const Eigen::MatrixXd& coefficients);

/// One linearly conjugate realization in reduced form: Y a_k = diag(t_inv) M.
struct Realization {
  Eigen::VectorXd t_inv;
  Eigen::MatrixXd a_k;
};

/// Unweighted reaction graph on complexes 0..m-1. Edges are kept sorted by
/// (source, target), which is the column-major order over the Kirchhoff matrix.
class GraphStructure {
 public:
  GraphStructure() = default;
  explicit GraphStructure(int num_complexes) : m_(num_complexes) {}
  GraphStructure(int num_complexes, std::vector<Edge> edges);

  int num_complexes() const { return m_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }

  bool contains(Edge e) const;
  /// Returns false if the edge was already present.
  bool insert(Edge e);
  bool erase(Edge e);
  bool is_subset_of(const GraphStructure& other) const;

  friend bool operator==(const GraphStructure&, const GraphStructure&) = default;

 private:
  void check(Edge e) const;

  int m_ = 0;
  std::vector<Edge> edges_;
};

/// Fixed-length bit word; bit i stands for the presence of the i-th non-core edge.
class BitSeq {
 public:
  BitSeq() = default;
  explicit BitSeq(std::size_t size, bool value = false);

  std::size_t size() const { return size_; }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool value = true);
  void reset(std::size_t i) { set(i, false); }
  std::size_t count() const;
  bool is_subset_of(const BitSeq& other) const;

  /// '1'/'0' characters, bit 0 first.
  std::string to_string() const;
  static BitSeq from_string(const std::string& bits);

  std::size_t hash() const;

  friend bool operator==(const BitSeq&, const BitSeq&) = default;
  friend auto operator<=>(const BitSeq& a, const BitSeq& b) { return a.to_string() <=> b.to_string(); }

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct BitSeqHash {
  std::size_t operator()(const BitSeq& s) const { return s.hash(); }
};

/// Bit positions of the non-core edges of a dense structure.
class EdgeOrdering {
 public:
  EdgeOrdering() = default;
  /// `core` must be a subset of `dense`.
  EdgeOrdering(const GraphStructure& dense, const GraphStructure& core);

  const std::vector<Edge>& edges() const { return edges_; }
  const GraphStructure& core() const { return core_; }
  const GraphStructure& dense() const { return dense_; }
  std::size_t N() const { return edges_.size(); }
  /// Bit index of a non-core edge, or -1.
  int index_of(Edge e) const;

 private:
  GraphStructure dense_;
  GraphStructure core_;
  std::vector<Edge> edges_;
  std::vector<int> lookup_;
};

BitSeq encode(const GraphStructure& structure, const EdgeOrdering& ord);
GraphStructure decode(const BitSeq& bits, const EdgeOrdering& ord);

/// Edge i->j is present iff [a_k]_{ji} > tol.
GraphStructure structure_of(const Eigen::MatrixXd& a_k, double tol);

/// Weakly connected components over the complexes that touch at least one
/// edge; isolated complexes are not classes. Each class is sorted, and classes
/// are ordered by their smallest member.
std::vector<std::vector<int>> linkage_classes(const GraphStructure& structure);
bool weakly_connected(const GraphStructure& structure);

/// psi_j(x) = prod_i x_i^{Y_ij}, with 0^0 = 1.
template <typename Derived>
Eigen::VectorXd psi(const Eigen::MatrixXi& y, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != y.rows()) throw std::invalid_argument("psi: state dimension mismatch");
  Eigen::VectorXd out(y.cols());
  for (Index j = 0; j < y.cols(); ++j) {
    double v = 1.0;
    for (Index i = 0; i < y.rows(); ++i) {
      for (int p = 0; p < y(i, j); ++p) v *= static_cast<double>(x(i));
    }
    out(j) = v;
  }
  return out;
}

template <typename Derived>
Eigen::VectorXd psi_eval(const CrnModel& model, const Eigen::MatrixBase<Derived>& x) {
  return psi(model.Y(), x);
}

/// Actual rate coefficients A'_k = A_k diag(psi(T 1)), where T = diag(1 / t_inv).
Eigen::MatrixXd recover_rate_coefficients(const CrnModel& model, const Realization& real);

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
};

/// Fixed-step RK4 on x' = f(x), sampled at every step.
Trajectory integrate_rk4(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& rhs,
                         const Eigen::VectorXd& x0, double dt, double t_end);

/// x' = M psi(x).
Trajectory simulate(const CrnModel& model, const Eigen::VectorXd& x0, double dt, double t_end);
/// x' = Y K psi(x) for a matrix of actual rate coefficients K.
Trajectory simulate(const Eigen::MatrixXi& y, const Eigen::MatrixXd& rates, const Eigen::VectorXd& x0, double dt,
                    double t_end);

}  // namespace linconj

template <>
struct std::hash<linconj::BitSeq> {
  std::size_t operator()(const linconj::BitSeq& s) const { return s.hash(); }
};
