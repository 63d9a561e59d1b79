#pragma once

#include "linconj/realization.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_set>
#include <vector>

namespace linconj {

/// Set of discovered bit sequences with atomic insert-if-absent. Sharded to
/// keep lock hold times short under many workers.
class ExistStore {
 public:
  explicit ExistStore(std::size_t shards = 64);

  /// True iff `s` was not present before.
  bool insert(const BitSeq& s);
  bool contains(const BitSeq& s) const;
  std::size_t size() const;
  std::vector<BitSeq> snapshot() const;

 private:
  struct Shard {
    mutable std::shared_mutex mu;
    std::unordered_set<BitSeq, BitSeqHash> items;
  };
  Shard& shard_for(const BitSeq& s) const;

  std::unique_ptr<Shard[]> shards_;
  std::size_t num_shards_;
};

/// Worklists S(0..N); a sequence with k set bits lives in S(k). Not
/// synchronized: the engine guards it.
template <typename Entry>
class LevelStacks {
 public:
  explicit LevelStacks(std::size_t n) : levels_(n + 1) {}

  void push(std::size_t level, Entry e) {
    levels_.at(level).push_back(std::move(e));
    ++size_;
  }
  /// Pops from the highest non-empty level.
  std::optional<std::pair<std::size_t, Entry>> pop_highest() {
    for (std::size_t k = levels_.size(); k-- > 0;) {
      if (!levels_[k].empty()) {
        Entry e = std::move(levels_[k].back());
        levels_[k].pop_back();
        --size_;
        return std::make_pair(k, std::move(e));
      }
    }
    return std::nullopt;
  }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  std::size_t size(std::size_t level) const { return levels_.at(level).size(); }

 private:
  std::vector<std::vector<Entry>> levels_;
  std::size_t size_ = 0;
};

struct Progress {
  std::uint64_t structures = 0;
  std::uint64_t lp_solves = 0;
  double elapsed_seconds = 0;
};

struct EnumerateOptions {
  /// Worker threads; 0 means hardware concurrency.
  unsigned threads = 1;
  /// Compute core edges first (shorter sequences); the structure set is the same either way.
  bool compute_core = true;
  /// Skip the LP probe when R minus e_i is already known: the probe would return exactly it.
  bool shortcut_known = true;
  /// Pass a witness realization with every emitted structure.
  bool with_witness = false;
  /// Called at most once per second.
  std::function<void(const Progress&)> progress;
  SimplexOptions simplex;
};

struct Emission {
  const BitSeq& seq;
  const GraphStructure& structure;
  const Realization* witness;  // null unless requested (linconj only)
};

using Sink = std::function<void(const Emission&)>;

struct EnumerationSummary {
  std::uint64_t total = 0;
  /// Total edge count (core included) -> number of structures.
  std::map<std::size_t, std::uint64_t> histogram;
  GraphStructure dense;
  GraphStructure core;
  std::size_t N = 0;
  std::uint64_t lp_solves = 0;
  std::uint64_t probes = 0;
  std::uint64_t shortcut_probes = 0;
  /// Largest number of probes / LP solves observed between two consecutive
  /// emissions (exact in single-worker mode).
  std::uint64_t max_probes_between_emissions = 0;
  std::uint64_t max_lp_solves_between_emissions = 0;
  /// Popped sequences whose popcount did not match their stack (always 0).
  std::uint64_t stack_violations = 0;
  /// dyneq only: number of distinct supports per column.
  std::vector<std::uint64_t> column_counts;
  double wall_seconds = 0;
  bool aborted = false;
  std::string error;
};

/// Every structure of a linearly conjugate realization, each passed to `sink`
/// exactly once. Throws NotRealizable when no realization exists at all; an LP
/// failure mid-run returns a summary flagged `aborted`.
EnumerationSummary enumerate_linconj(const CrnModel& model, const ConstraintOptions& opts, const Sink& sink,
                                     const EnumerateOptions& eopts = {});

/// Every structure of a dynamically equivalent realization (T = identity),
/// built as the product of independently enumerated Kirchhoff columns.
EnumerationSummary enumerate_dyneq(const CrnModel& model, const ConstraintOptions& opts, const Sink& sink,
                                   const EnumerateOptions& eopts = {});

/// Per-column discovered supports; each entry holds only edges leaving complex j.
using ColumnExistStore = std::vector<std::vector<GraphStructure>>;

/// Calls `fn` for every combination of one support per column. Throws
/// NotRealizable if a column has no support.
void for_each_product(const ColumnExistStore& columns, const std::function<void(const GraphStructure&)>& fn);
std::vector<GraphStructure> build_ak(const ColumnExistStore& columns);

/// Oracle: tests every subset of the non-core edges for an exact realization.
/// Throws std::length_error if N exceeds `cap`.
std::vector<BitSeq> brute_force_enumerate(const CrnModel& model, const ConstraintOptions& opts,
                                          const EdgeOrdering& ord, std::size_t cap = 16);
std::vector<BitSeq> brute_force_enumerate(const CrnModel& model, const ConstraintOptions& opts,
                                          std::size_t cap = 16);

/// Dense structure and core edges under `opts`, as used by enumerate_linconj.
EdgeOrdering linconj_ordering(const CrnModel& model, const ConstraintOptions& opts, LpSolver& solver,
                              bool compute_core = true, Realization* dense_witness = nullptr);

// ---------------------------------------------------------------------------
// Generic engine, exposed for testing.

struct Discovery {
  BitSeq seq;
  std::optional<Realization> witness;
};

/// (R, i) -> constrained dense structure inside R without bit i, or nothing.
using Probe = std::function<std::optional<Discovery>(LpSolver&, const BitSeq&, std::size_t)>;
using EngineEmit = std::function<void(const BitSeq&, const std::optional<Realization>&)>;

struct EngineOptions {
  unsigned threads = 1;
  bool shortcut_known = true;
  std::function<void(const Progress&)> progress;
  SimplexOptions simplex;
};

/// Level-stack worklist over sequences of length N, seeded with `seed`.
/// A sequence is emitted after all of its probes finish.
EnumerationSummary run_worklist(std::size_t n, Discovery seed, const Probe& probe, const EngineEmit& emit,
                                const EngineOptions& opts);

}  // namespace linconj
