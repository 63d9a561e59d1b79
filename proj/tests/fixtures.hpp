#pragma once

#include "linconj/enumerate.hpp"

#include <random>
#include <set>
#include <vector>

namespace linconj::testing {

// x1' = 3 k1 x2^3 - k2 x1^3, x2' = -x1', complexes 3X2, 3X1, 2X1+X2; k1 = 1, k2 = 2.
inline CrnModel example1() {
  Eigen::MatrixXd m(2, 3);
  m << 3, -2, 0, -3, 2, 0;
  return build_network({"X1", "X2"}, ComplexList{{0, 3}, {3, 0}, {2, 1}}, m);
}

// Oscillator on complexes 0, X1, X2, 2X1, 2X1+X2, 3X1 with k = (1, 1, 0.05, 0.1, 0.1).
inline Eigen::MatrixXd example2_original_ak() {
  const double k1 = 1, k2 = 1, k3 = 0.05, k4 = 0.1, k5 = 0.1;
  Eigen::MatrixXd a(6, 6);
  a << -k1, k2, 0, 0, 0, 0,  //
      0, -k2, k3, 0, 0, 0,   //
      k1, 0, -k3, k4, 0, 0,  //
      0, 0, 0, -k4, 0, 0,    //
      0, 0, 0, 0, -k5, 0,    //
      0, 0, 0, 0, k5, 0;
  return a;
}

inline CrnModel example2() {
  Eigen::MatrixXd m(2, 6);
  m << 0, -1, 0.05, -0.2, 0.1, 0,  //
      1, 0, -0.05, 0.1, -0.1, 0;
  return build_network({"X1", "X2"}, ComplexList{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {2, 1}, {3, 0}}, m);
}

inline GraphStructure edges1(int m, std::initializer_list<std::pair<int, int>> one_based) {
  GraphStructure g(m);
  for (auto [s, t] : one_based) g.insert({s - 1, t - 1});
  return g;
}

inline GraphStructure example2_dense_structure() {
  return edges1(6, {{1, 3}, {2, 1}, {2, 4}, {2, 6}, {3, 1}, {3, 2}, {3, 4}, {3, 5}, {3, 6}, {4, 1},
                    {4, 2}, {4, 3}, {4, 5}, {4, 6}, {5, 1}, {5, 2}, {5, 3}, {5, 4}, {5, 6}});
}

inline GraphStructure example2_two_class_structure() {
  return edges1(6, {{1, 3}, {2, 1}, {2, 4}, {3, 1}, {3, 2}, {3, 4}, {4, 3}, {5, 6}});
}

inline GraphStructure example2_sparse_structure() { return edges1(6, {{1, 3}, {2, 1}, {3, 2}, {4, 3}, {5, 6}}); }

/// Realizable random model: random complexes, a random Kirchhoff matrix and a
/// random diagonal scaling, M = T Y A_k.
inline CrnModel random_model(std::mt19937& rng, int max_species = 3, int max_complexes = 4,
                             bool unit_scaling = false) {
  std::uniform_int_distribution<int> n_dist(1, max_species);
  std::uniform_int_distribution<int> m_dist(2, max_complexes);
  std::uniform_int_distribution<int> coef(0, 2);
  std::uniform_int_distribution<int> rate(1, 10);
  std::uniform_int_distribution<int> scale(0, 2);
  std::bernoulli_distribution edge(0.45);
  while (true) {
    const int n = n_dist(rng);
    const int m = m_dist(rng);
    Eigen::MatrixXi y(n, m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) y(i, j) = coef(rng);
    bool distinct = true;
    for (int a = 0; a < m && distinct; ++a)
      for (int b = a + 1; b < m && distinct; ++b) distinct = y.col(a) != y.col(b);
    if (!distinct) continue;
    Eigen::MatrixXd ak = Eigen::MatrixXd::Zero(m, m);
    for (int s = 0; s < m; ++s)
      for (int t = 0; t < m; ++t)
        if (s != t && edge(rng)) ak(t, s) = 0.1 * rate(rng);
    for (int j = 0; j < m; ++j) ak(j, j) = -(ak.col(j).sum());
    Eigen::VectorXd t_diag(n);
    for (int i = 0; i < n; ++i) t_diag(i) = unit_scaling ? 1.0 : std::pow(2.0, scale(rng) - 1);
    const Eigen::MatrixXd mm = t_diag.asDiagonal() * (y.cast<double>() * ak);
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("X" + std::to_string(i + 1));
    return build_network(names, y, mm);
  }
}

struct Collected {
  std::vector<BitSeq> seqs;
  std::vector<GraphStructure> structures;
  std::vector<Realization> witnesses;
  EnumerationSummary summary;

  std::set<BitSeq> set() const { return {seqs.begin(), seqs.end()}; }
};

inline Collected collect_linconj(const CrnModel& model, const ConstraintOptions& opts = {},
                                 EnumerateOptions eopts = {}) {
  Collected c;
  c.summary = enumerate_linconj(
      model, opts,
      [&](const Emission& e) {
        c.seqs.push_back(e.seq);
        c.structures.push_back(e.structure);
        if (e.witness) c.witnesses.push_back(*e.witness);
      },
      eopts);
  return c;
}

inline Collected collect_dyneq(const CrnModel& model, const ConstraintOptions& opts = {},
                               EnumerateOptions eopts = {}) {
  Collected c;
  c.summary = enumerate_dyneq(
      model, opts,
      [&](const Emission& e) {
        c.seqs.push_back(e.seq);
        c.structures.push_back(e.structure);
      },
      eopts);
  return c;
}

}  // namespace linconj::testing
