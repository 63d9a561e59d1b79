// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "fixtures.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace linconj;
using namespace linconj::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::set<std::vector<Edge>> edge_sets(const std::vector<GraphStructure>& gs) {
  std::set<std::vector<Edge>> out;
  for (const auto& g : gs) out.insert(g.edges());
  return out;
}

std::set<std::vector<Edge>> oracle(const CrnModel& model) {
  const int m = static_cast<int>(model.m());
  const EdgeOrdering ord(complete_structure(m), GraphStructure(m));
  std::set<std::vector<Edge>> out;
  for (const auto& s : brute_force_enumerate(model, {}, ord, 12)) out.insert(decode(s, ord).edges());
  return out;
}

// Example 2 single-threaded run, shared by criteria 3, 7 and 8.
struct Example2Run {
  Collected result;
  double seconds = 0;
  double worst_residual = 0;
  double worst_conservation = 0;
  std::size_t inexact_witnesses = 0;
};

Example2Run run_example2() {
  Example2Run run;
  const auto model = example2();
  EnumerateOptions eo;
  eo.with_witness = true;
  const auto t0 = Clock::now();
  run.result.summary = enumerate_linconj(
      model, {},
      [&](const Emission& e) {
        run.result.seqs.push_back(e.seq);
        run.result.structures.push_back(e.structure);
        run.worst_residual = std::max(run.worst_residual, residual(model, *e.witness));
        run.worst_conservation = std::max(run.worst_conservation, column_conservation_error(e.witness->a_k));
        if (structure_of(e.witness->a_k, 1e-6) != e.structure) ++run.inexact_witnesses;
      },
      eo);
  run.seconds = seconds_since(t0);
  return run;
}

bool report(int id, const std::string& title, Check& c) {
  std::cout << (c.ok ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " |" << c.detail.str() << "\n"
            << std::flush;
  return c.ok;
}

Check criterion1() {
  Check c;
  const auto t0 = Clock::now();
  const auto got = collect_linconj(example1());
  const double secs = seconds_since(t0);
  c.detail << " structures=" << got.summary.total << " dense_edges=" << got.summary.dense.size()
           << " seconds=" << secs;
  c.expect(got.summary.total == 18 && got.seqs.size() == 18 && got.set().size() == 18, "18 structures");
  c.expect(got.summary.dense == complete_structure(3), "dense is the complete 6-edge digraph");
  c.expect(secs < 10.0, "runtime < 10 s");
  return c;
}

Check criterion2() {
  Check c;
  const auto lin = collect_linconj(example1());
  const auto dyn = collect_dyneq(example1());
  c.detail << " linconj=" << lin.set().size() << " dyneq=" << dyn.set().size();
  c.expect(lin.set() == dyn.set(), "bit sequence sets equal");
  c.expect(edge_sets(lin.structures) == edge_sets(dyn.structures), "edge sets equal");
  return c;
}

Check criterion3(const Example2Run& run) {
  Check c;
  const auto& r = run.result;
  std::size_t connected = 0, two_class = 0, minimum = r.structures.empty() ? 0 : r.structures[0].size();
  std::vector<GraphStructure> minimal;
  const std::vector<std::vector<int>> expected_classes{{0, 1, 2, 3}, {4, 5}};
  for (const auto& g : r.structures) {
    const auto classes = linkage_classes(g);
    if (classes.size() == 1) ++connected;
    if (classes == expected_classes) ++two_class;
    minimum = std::min(minimum, g.size());
  }
  for (const auto& g : r.structures)
    if (g.size() == minimum) minimal.push_back(g);
  c.detail << " structures=" << r.summary.total << " weakly_connected=" << connected << " two_class=" << two_class
           << " min_edges=" << minimum << " minimal_count=" << minimal.size()
           << " dense_edges=" << r.summary.dense.size() << " seconds=" << run.seconds;
  c.expect(r.summary.total == 17160 && r.set().size() == 17160, "17160 structures");
  c.expect(connected == 17154, "17154 weakly connected");
  c.expect(two_class == 6, "6 with linkage classes {1,2,3,4},{5,6}");
  c.expect(minimum == 5 && minimal.size() == 1 && minimal[0] == example2_sparse_structure(),
           "unique 5-edge minimum is the original graph");
  c.expect(r.summary.dense == example2_dense_structure(), "dense is the 19-edge reference structure");
  c.expect(run.seconds < 7200, "runtime < 2 h");
  return c;
}

Check criterion4() {
  Check c;
  const auto model = example2();
  ConstraintOptions opts;
  for (int s = 0; s < 4; ++s)
    for (int t = 4; t < 6; ++t) {
      opts.excluded.insert({s, t});
      opts.excluded.insert({t, s});
    }
  SimplexSolver solver;
  const auto dense = dense_realization(model, opts, solver);
  c.detail << " dense_edges=" << dense.structure.size() << " residual=" << residual(model, dense.witness);
  c.expect(dense.structure == example2_two_class_structure(), "8-edge two-class structure");
  c.expect(residual(model, dense.witness) <= 1e-6, "witness residual");
  return c;
}

Check criterion5() {
  Check c;
  std::mt19937 rng(20240101);
  std::vector<CrnModel> models{example1()};
  while (models.size() < 25) models.push_back(random_model(rng, 3, 4));
  std::size_t matched = 0, max_n = 0, total = 0;
  for (std::size_t k = 0; k < models.size(); ++k) {
    const auto& model = models[k];
    const auto got = collect_linconj(model);
    max_n = std::max(max_n, got.summary.N);
    total += got.summary.total;
    const bool same = edge_sets(got.structures) == oracle(model) && got.set().size() == got.seqs.size();
    if (same) ++matched;
    c.expect(same, "model " + std::to_string(k));
  }
  c.detail << " models=" << models.size() << " matched=" << matched << " max_N=" << max_n
           << " structures=" << total;
  c.expect(max_n <= 12, "N <= 12");
  return c;
}

Check criterion6() {
  Check c;
  const auto model = example2();
  // Dense realization with t_inv(2) = 2 t_inv(1), rescaled to t_inv = (40, 80).
  ConstraintOptions opts;
  const VariableMap vars(model.n(), model.m());
  LinearConstraint ratio;
  ratio.coeffs = Eigen::VectorXd::Zero(vars.num_vars());
  ratio.coeffs(vars.scaling(0)) = 2;
  ratio.coeffs(vars.scaling(1)) = -1;
  opts.extra_linear.push_back(ratio);
  SimplexSolver solver;
  auto dense = dense_realization(model, opts, solver);
  const double scale = 40.0 / dense.witness.t_inv(0);
  Realization real{dense.witness.t_inv * scale, dense.witness.a_k * scale};
  const Eigen::MatrixXd rates = recover_rate_coefficients(model, real);

  const auto orig = simulate(model.Y(), example2_original_ak(), Eigen::Vector2d(1, 2), 1e-3, 50.0);
  const auto conj = simulate(model.Y(), rates, Eigen::Vector2d(40, 160), 1e-3, 50.0);
  double num = 0, den = 0;
  const Eigen::Vector2d t_inv(40, 80);
  for (std::size_t k = 0; k < orig.states.size(); ++k) {
    num = std::max(num, (conj.states[k] - t_inv.cwiseProduct(orig.states[k])).lpNorm<Eigen::Infinity>());
    den = std::max(den, conj.states[k].lpNorm<Eigen::Infinity>());
  }
  const double rel = num / den;
  c.detail << " dense_edges=" << dense.structure.size() << " t_inv=(" << real.t_inv(0) << "," << real.t_inv(1)
           << ") steps=" << orig.states.size() - 1 << " rel_error=" << rel;
  c.expect(dense.structure == example2_dense_structure(), "19-edge dense realization");
  c.expect(std::abs(real.t_inv(1) - 80.0) <= 1e-6, "t_inv = (40, 80)");
  c.expect(orig.states.size() == conj.states.size() && orig.states.size() == 50001, "50000 RK4 steps");
  c.expect(rel <= 1e-4, "relative deviation <= 1e-4");
  return c;
}

Check criterion7(const Example2Run& ex2) {
  Check c;
  std::mt19937 rng(777);
  std::vector<CrnModel> models{example1()};
  while (models.size() < 13) models.push_back(random_model(rng, 3, 4));

  // Residual, column conservation and witness exactness.
  double worst_res = ex2.worst_residual, worst_cons = ex2.worst_conservation;
  std::size_t inexact = ex2.inexact_witnesses, witnesses = ex2.result.structures.size();
  // Scale invariance and sandwich.
  std::size_t scale_fail = 0, sandwich_fail = 0, roundtrip_fail = 0, thread_fail = 0, dup_fail = 0;
  for (const auto& model : models) {
    EnumerateOptions eo;
    eo.with_witness = true;
    const auto got = collect_linconj(model, {}, eo);
    const EdgeOrdering ord(got.summary.dense, got.summary.core);
    for (std::size_t k = 0; k < got.structures.size(); ++k) {
      const auto& w = got.witnesses[k];
      const auto& g = got.structures[k];
      ++witnesses;
      worst_res = std::max(worst_res, residual(model, w));
      worst_cons = std::max(worst_cons, column_conservation_error(w.a_k));
      if (structure_of(w.a_k, 1e-6) != g) ++inexact;
      for (double s : {0.5, 2.0, 10.0}) {
        const Realization scaled{s * w.t_inv, s * w.a_k};
        if (residual(model, scaled) > s * 1e-6 || structure_of(scaled.a_k, 1e-6 * std::min(s, 1.0)) != g)
          ++scale_fail;
      }
      if (!got.summary.core.is_subset_of(g) || !g.is_subset_of(got.summary.dense)) ++sandwich_fail;
      if (encode(g, ord) != got.seqs[k] || decode(got.seqs[k], ord) != g) ++roundtrip_fail;
    }
    if (got.set().size() != got.seqs.size()) ++dup_fail;
    for (unsigned threads : {1u, 2u, 4u, 8u}) {
      EnumerateOptions teo;
      teo.threads = threads;
      const auto t = collect_linconj(model, {}, teo);
      if (t.set() != got.set() || t.seqs.size() != got.seqs.size()) ++thread_fail;
    }
  }
  // Sandwich and round trip on Example 2.
  const EdgeOrdering ord2(ex2.result.summary.dense, ex2.result.summary.core);
  for (std::size_t k = 0; k < ex2.result.structures.size(); ++k) {
    const auto& g = ex2.result.structures[k];
    if (!ex2.result.summary.core.is_subset_of(g) || !g.is_subset_of(ex2.result.summary.dense)) ++sandwich_fail;
    if (encode(g, ord2) != ex2.result.seqs[k] || decode(ex2.result.seqs[k], ord2) != g) ++roundtrip_fail;
  }
  // Thread-count equality on Example 2.
  const auto base = ex2.result.set();
  for (unsigned threads : {2u, 4u, 8u}) {
    EnumerateOptions teo;
    teo.threads = threads;
    const auto t = collect_linconj(example2(), {}, teo);
    if (t.set() != base || t.seqs.size() != base.size()) ++thread_fail;
  }
  // Stack discipline.
  const bool stacks_ok = ex2.result.summary.stack_violations == 0;

  c.detail << " witnesses=" << witnesses << " max_residual=" << worst_res << " max_conservation=" << worst_cons
           << " inexact=" << inexact << " scale_fail=" << scale_fail << " sandwich_fail=" << sandwich_fail
           << " roundtrip_fail=" << roundtrip_fail << " thread_fail=" << thread_fail << " dup_fail=" << dup_fail;
  c.expect(worst_res <= 1e-6, "residual <= 1e-6 (1 + |M|)");
  c.expect(worst_cons <= 1e-12, "column sums vanish");
  c.expect(inexact == 0, "witness support equals structure");
  c.expect(scale_fail == 0, "scale invariance");
  c.expect(sandwich_fail == 0, "core <= structure <= dense");
  c.expect(roundtrip_fail == 0, "encode/decode round trip");
  c.expect(thread_fail == 0, "thread-count set equality for L in {1,2,4,8}");
  c.expect(dup_fail == 0 && stacks_ok, "no duplicates, stack discipline");
  return c;
}

Check criterion8(const Example2Run& ex2) {
  Check c;
  const std::size_t n = 2;
  const auto& s = ex2.result.summary;
  const std::uint64_t bound = s.N * (s.N + n);
  // Same run with every probe forced through the LP.
  EnumerateOptions eo;
  eo.shortcut_known = false;
  const auto full = collect_linconj(example2(), {}, eo).summary;
  c.detail << " N=" << s.N << " bound=" << bound << " max_lp_between_emissions=" << s.max_lp_solves_between_emissions
           << " without_shortcut=" << full.max_lp_solves_between_emissions << " lp_solves=" << s.lp_solves << "/"
           << full.lp_solves;
  c.expect(s.max_lp_solves_between_emissions <= bound, "bound with shortcut");
  c.expect(full.max_lp_solves_between_emissions <= bound, "bound without shortcut");
  c.expect(full.total == 17160, "no-shortcut run count");
  return c;
}

}  // namespace

int main() {
  bool all = true;
  auto guarded = [&](int id, const std::string& title, const std::function<Check()>& fn) {
    Check c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail << " [exception: " << e.what() << "]";
    }
    all = report(id, title, c) && all;
  };

  guarded(1, "Example 1 yields 18 structures, dense is complete", criterion1);
  guarded(2, "Example 1 dyneq set equals linconj set", criterion2);
  Example2Run ex2;
  try {
    ex2 = run_example2();
  } catch (const std::exception& e) {
    std::cerr << "Example 2 enumeration failed: " << e.what() << "\n";
  }
  guarded(3, "Example 2 counts", [&] { return criterion3(ex2); });
  guarded(4, "Example 2 confined dense realization", criterion4);
  guarded(5, "enumeration equals brute-force oracle", criterion5);
  guarded(6, "conjugate trajectories agree", criterion6);
  guarded(7, "invariant suite", [&] { return criterion7(ex2); });
  guarded(8, "inter-emission LP bound on Example 2", [&] { return criterion8(ex2); });
  return all ? 0 : 1;
}
