#include "linconj/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

namespace linconj {

namespace {

void validate(const std::vector<std::string>& species, const Eigen::MatrixXi& y, const Eigen::MatrixXd& m) {
  if (species.size() != static_cast<std::size_t>(y.rows())) {
    throw InvalidModel("species count does not match the number of rows of Y");
  }
  if (m.rows() != y.rows() || m.cols() != y.cols()) {
    std::ostringstream msg;
    msg << "coefficient matrix is " << m.rows() << "x" << m.cols() << ", expected " << y.rows() << "x" << y.cols();
    throw InvalidModel(msg.str());
  }
  if ((y.array() < 0).any()) throw InvalidModel("negative stoichiometric coefficient");
  if (!m.allFinite()) throw InvalidModel("non-finite coefficient in M");
  for (Index a = 0; a < y.cols(); ++a) {
    for (Index b = a + 1; b < y.cols(); ++b) {
      if (y.col(a) == y.col(b)) {
        std::ostringstream msg;
        msg << "complexes C" << a + 1 << " and C" << b + 1 << " are identical";
        throw InvalidModel(msg.str());
      }
    }
  }
}

}  // namespace

CrnModel build_network(std::vector<std::string> species, const Eigen::MatrixXi& y,
                       const Eigen::MatrixXd& coefficients) {
  validate(species, y, coefficients);
  return CrnModel(std::move(species), y, coefficients);
}

CrnModel build_network(std::vector<std::string> species, const ComplexList& complexes,
                       const Eigen::MatrixXd& coefficients) {
  const auto n = static_cast<Index>(species.size());
  Eigen::MatrixXi y(n, static_cast<Index>(complexes.size()));
  for (std::size_t j = 0; j < complexes.size(); ++j) {
    const auto& c = complexes[j];
    if (static_cast<Index>(c.size()) != n) {
      std::ostringstream msg;
      msg << "complex C" << j + 1 << " has " << c.size() << " exponents, expected " << n;
      throw InvalidModel(msg.str());
    }
    for (Index i = 0; i < n; ++i) {
      const double v = c[static_cast<std::size_t>(i)];
      if (!std::isfinite(v) || v < 0 || v != std::floor(v) || v > 1e6) {
        std::ostringstream msg;
        msg << "complex C" << j + 1 << " has an invalid exponent " << v;
        throw InvalidModel(msg.str());
      }
      y(i, static_cast<Index>(j)) = static_cast<int>(v);
    }
  }
  validate(species, y, coefficients);
  return CrnModel(std::move(species), std::move(y), coefficients);
}

// ---------------------------------------------------------------------------
// GraphStructure

GraphStructure::GraphStructure(int num_complexes, std::vector<Edge> edges) : m_(num_complexes) {
  for (Edge e : edges) check(e);
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw std::invalid_argument("duplicate edge in graph structure");
  }
  edges_ = std::move(edges);
}

void GraphStructure::check(Edge e) const {
  if (e.source < 0 || e.target < 0 || e.source >= m_ || e.target >= m_) {
    throw std::out_of_range("edge endpoint outside the complex set");
  }
  if (e.source == e.target) throw std::invalid_argument("loops are not reactions");
}

bool GraphStructure::contains(Edge e) const { return std::binary_search(edges_.begin(), edges_.end(), e); }

bool GraphStructure::insert(Edge e) {
  check(e);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it != edges_.end() && *it == e) return false;
  edges_.insert(it, e);
  return true;
}

bool GraphStructure::erase(Edge e) {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it == edges_.end() || *it != e) return false;
  edges_.erase(it);
  return true;
}

bool GraphStructure::is_subset_of(const GraphStructure& other) const {
  return std::includes(other.edges_.begin(), other.edges_.end(), edges_.begin(), edges_.end());
}

// ---------------------------------------------------------------------------
// BitSeq

BitSeq::BitSeq(std::size_t size, bool value) : size_(size), words_((size + 63) / 64, 0) {
  if (value) {
    for (std::size_t i = 0; i < size; ++i) set(i);
  }
}

void BitSeq::set(std::size_t i, bool value) {
  const std::uint64_t mask = std::uint64_t{1} << (i & 63);
  if (value) {
    words_[i >> 6] |= mask;
  } else {
    words_[i >> 6] &= ~mask;
  }
}

std::size_t BitSeq::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

bool BitSeq::is_subset_of(const BitSeq& other) const {
  if (size_ != other.size_) return false;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if (words_[w] & ~other.words_[w]) return false;
  }
  return true;
}

std::string BitSeq::to_string() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i) {
    if (test(i)) s[i] = '1';
  }
  return s;
}

BitSeq BitSeq::from_string(const std::string& bits) {
  BitSeq out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      out.set(i);
    } else if (bits[i] != '0') {
      throw std::invalid_argument("bit string may only contain '0' and '1'");
    }
  }
  return out;
}

std::size_t BitSeq::hash() const {
  std::uint64_t h = 0x9e3779b97f4a7c15ull ^ size_;
  for (auto w : words_) {
    h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdull;
  }
  return static_cast<std::size_t>(h ^ (h >> 33));
}

// ---------------------------------------------------------------------------
// EdgeOrdering, encode/decode

EdgeOrdering::EdgeOrdering(const GraphStructure& dense, const GraphStructure& core)
    : dense_(dense), core_(core) {
  if (!core.is_subset_of(dense) || core.num_complexes() != dense.num_complexes()) {
    throw std::invalid_argument("core edges must be a subset of the dense structure");
  }
  const int m = dense.num_complexes();
  lookup_.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), -1);
  for (Edge e : dense.edges()) {
    if (core.contains(e)) continue;
    lookup_[static_cast<std::size_t>(e.source * m + e.target)] = static_cast<int>(edges_.size());
    edges_.push_back(e);
  }
}

int EdgeOrdering::index_of(Edge e) const {
  const int m = dense_.num_complexes();
  if (e.source < 0 || e.target < 0 || e.source >= m || e.target >= m) return -1;
  return lookup_[static_cast<std::size_t>(e.source * m + e.target)];
}

BitSeq encode(const GraphStructure& structure, const EdgeOrdering& ord) {
  BitSeq bits(ord.N());
  for (Edge e : structure.edges()) {
    if (ord.core().contains(e)) continue;
    const int idx = ord.index_of(e);
    if (idx < 0) {
      std::ostringstream msg;
      msg << "edge C" << e.source + 1 << "->C" << e.target + 1 << " is not part of the dense structure";
      throw std::invalid_argument(msg.str());
    }
    bits.set(static_cast<std::size_t>(idx));
  }
  for (Edge e : ord.core().edges()) {
    if (!structure.contains(e)) throw std::invalid_argument("structure omits a core edge");
  }
  return bits;
}

GraphStructure decode(const BitSeq& bits, const EdgeOrdering& ord) {
  if (bits.size() != ord.N()) throw std::invalid_argument("bit sequence length does not match the edge ordering");
  std::vector<Edge> edges = ord.core().edges();
  for (std::size_t i = 0; i < ord.N(); ++i) {
    if (bits.test(i)) edges.push_back(ord.edges()[i]);
  }
  return GraphStructure(ord.dense().num_complexes(), std::move(edges));
}

GraphStructure structure_of(const Eigen::MatrixXd& a_k, double tol) {
  if (a_k.rows() != a_k.cols()) throw std::invalid_argument("Kirchhoff matrix must be square");
  const int m = static_cast<int>(a_k.cols());
  std::vector<Edge> edges;
  for (int src = 0; src < m; ++src) {
    for (int dst = 0; dst < m; ++dst) {
      if (src != dst && a_k(dst, src) > tol) edges.push_back({src, dst});
    }
  }
  return GraphStructure(m, std::move(edges));
}

// ---------------------------------------------------------------------------
// Linkage classes

std::vector<std::vector<int>> linkage_classes(const GraphStructure& structure) {
  const int m = structure.num_complexes();
  std::vector<int> parent(static_cast<std::size_t>(m));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };
  std::vector<bool> touched(static_cast<std::size_t>(m), false);
  for (Edge e : structure.edges()) {
    touched[static_cast<std::size_t>(e.source)] = touched[static_cast<std::size_t>(e.target)] = true;
    const int a = find(e.source);
    const int b = find(e.target);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
  std::vector<std::vector<int>> classes;
  std::vector<int> class_of_root(static_cast<std::size_t>(m), -1);
  for (int v = 0; v < m; ++v) {
    if (!touched[static_cast<std::size_t>(v)]) continue;
    const int r = find(v);
    auto& slot = class_of_root[static_cast<std::size_t>(r)];
    if (slot < 0) {
      slot = static_cast<int>(classes.size());
      classes.emplace_back();
    }
    classes[static_cast<std::size_t>(slot)].push_back(v);
  }
  return classes;
}

bool weakly_connected(const GraphStructure& structure) { return linkage_classes(structure).size() == 1; }

// ---------------------------------------------------------------------------
// Rate coefficients and simulation

Eigen::MatrixXd recover_rate_coefficients(const CrnModel& model, const Realization& real) {
  if (real.t_inv.size() != model.n() || real.a_k.rows() != model.m() || real.a_k.cols() != model.m()) {
    throw std::invalid_argument("realization dimensions do not match the model");
  }
  const Eigen::VectorXd t = real.t_inv.cwiseInverse();
  const Eigen::VectorXd phi = psi(model.Y(), t);
  return real.a_k * phi.asDiagonal();
}

Trajectory integrate_rk4(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& rhs,
                         const Eigen::VectorXd& x0, double dt, double t_end) {
  if (!(dt > 0) || !(t_end >= 0)) throw std::invalid_argument("simulate: need dt > 0 and t_end >= 0");
  const auto steps = static_cast<std::size_t>(std::llround(std::floor(t_end / dt + 1e-9)));
  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(x0);
  Eigen::VectorXd x = x0;
  for (std::size_t s = 1; s <= steps; ++s) {
    const Eigen::VectorXd k1 = rhs(x);
    const Eigen::VectorXd k2 = rhs(x + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = rhs(x + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = rhs(x + dt * k3);
    x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite()) {
      std::ostringstream msg;
      msg << "non-finite state at t=" << static_cast<double>(s) * dt << " (step too large?)";
      throw SimulationError(msg.str());
    }
    traj.times.push_back(static_cast<double>(s) * dt);
    traj.states.push_back(x);
  }
  return traj;
}

Trajectory simulate(const CrnModel& model, const Eigen::VectorXd& x0, double dt, double t_end) {
  if (x0.size() != model.n()) throw std::invalid_argument("simulate: initial state dimension mismatch");
  if ((x0.array() <= 0).any()) throw std::invalid_argument("simulate: initial state must be positive");
  return integrate_rk4([&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return model.M() * psi(model.Y(), x); },
                       x0, dt, t_end);
}

Trajectory simulate(const Eigen::MatrixXi& y, const Eigen::MatrixXd& rates, const Eigen::VectorXd& x0, double dt,
                    double t_end) {
  if (x0.size() != y.rows() || rates.rows() != y.cols() || rates.cols() != y.cols()) {
    throw std::invalid_argument("simulate: dimension mismatch");
  }
  if ((x0.array() <= 0).any()) throw std::invalid_argument("simulate: initial state must be positive");
  const Eigen::MatrixXd yk = y.cast<double>() * rates;
  return integrate_rk4([&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return yk * psi(y, x); }, x0, dt, t_end);
}

}  // namespace linconj
