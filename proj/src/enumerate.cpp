#include "linconj/enumerate.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <exception>
#include <sstream>
#include <thread>

namespace linconj {

// ---------------------------------------------------------------------------
// ExistStore

ExistStore::ExistStore(std::size_t shards)
    : shards_(std::make_unique<Shard[]>(std::max<std::size_t>(shards, 1))), num_shards_(std::max<std::size_t>(shards, 1)) {}

ExistStore::Shard& ExistStore::shard_for(const BitSeq& s) const { return shards_[(s.hash() >> 7) % num_shards_]; }

bool ExistStore::insert(const BitSeq& s) {
  auto& shard = shard_for(s);
  std::unique_lock lock(shard.mu);
  return shard.items.insert(s).second;
}

bool ExistStore::contains(const BitSeq& s) const {
  auto& shard = shard_for(s);
  std::shared_lock lock(shard.mu);
  return shard.items.contains(s);
}

std::size_t ExistStore::size() const {
  std::size_t total = 0;
  for (std::size_t i = 0; i < num_shards_; ++i) {
    std::shared_lock lock(shards_[i].mu);
    total += shards_[i].items.size();
  }
  return total;
}

std::vector<BitSeq> ExistStore::snapshot() const {
  std::vector<BitSeq> out;
  for (std::size_t i = 0; i < num_shards_; ++i) {
    std::shared_lock lock(shards_[i].mu);
    out.insert(out.end(), shards_[i].items.begin(), shards_[i].items.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Worklist engine

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Pending {
  BitSeq seq;
  std::optional<Realization> witness;
  std::size_t remaining = 0;
};

struct Task {
  std::shared_ptr<Pending> owner;
  std::size_t bit = 0;
};

}  // namespace

EnumerationSummary run_worklist(std::size_t n, Discovery seed, const Probe& probe, const EngineEmit& emit,
                                const EngineOptions& opts) {
  if (seed.seq.size() != n) throw std::invalid_argument("seed length does not match N");
  const auto t0 = Clock::now();
  unsigned threads = opts.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.threads;

  EnumerationSummary summary;
  summary.N = n;

  std::mutex mu;
  std::condition_variable cv;
  ExistStore exist;
  LevelStacks<Discovery> stacks(n);
  std::deque<Task> tasks;
  std::size_t in_flight = 0;
  bool stop = false;
  std::exception_ptr failure;

  std::atomic<std::uint64_t> lp_total{0};
  std::atomic<std::uint64_t> probe_total{0};
  std::atomic<std::uint64_t> shortcut_total{0};

  std::mutex emit_mu;
  std::uint64_t lp_at_last_emit = 0;
  std::uint64_t probes_at_last_emit = 0;
  auto last_progress = t0;

  auto emit_pending = [&](const Pending& p) {
    std::lock_guard lock(emit_mu);
    const std::uint64_t lp_now = lp_total.load();
    const std::uint64_t probes_now = probe_total.load();
    summary.max_lp_solves_between_emissions =
        std::max(summary.max_lp_solves_between_emissions, lp_now - lp_at_last_emit);
    summary.max_probes_between_emissions =
        std::max(summary.max_probes_between_emissions, probes_now - probes_at_last_emit);
    lp_at_last_emit = lp_now;
    probes_at_last_emit = probes_now;
    ++summary.total;
    emit(p.seq, p.witness);
    if (opts.progress && Clock::now() - last_progress >= std::chrono::seconds(1)) {
      last_progress = Clock::now();
      opts.progress(Progress{summary.total, lp_now, seconds_since(t0)});
    }
  };

  exist.insert(seed.seq);
  const std::size_t seed_level = seed.seq.count();
  stacks.push(seed_level, std::move(seed));

  auto worker = [&] {
    SimplexSolver solver(opts.simplex);
    std::unique_lock lk(mu);
    while (!stop) {
      Task task;
      if (!tasks.empty()) {
        task = std::move(tasks.front());
        tasks.pop_front();
      } else if (auto top = stacks.pop_highest()) {
        auto& [level, found] = *top;
        if (found.seq.count() != level) ++summary.stack_violations;
        auto pending = std::make_shared<Pending>(Pending{std::move(found.seq), std::move(found.witness), level});
        if (pending->remaining == 0) {
          lk.unlock();
          emit_pending(*pending);
          lk.lock();
          continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
          if (pending->seq.test(i)) tasks.push_back({pending, i});
        }
        if (tasks.size() > 1) cv.notify_all();
        continue;
      } else if (in_flight == 0) {
        stop = true;
        cv.notify_all();
        break;
      } else {
        cv.wait(lk);
        continue;
      }

      ++in_flight;
      lk.unlock();

      std::optional<Discovery> found;
      bool fresh = false;
      try {
        bool skip = false;
        if (opts.shortcut_known) {
          BitSeq sub = task.owner->seq;
          sub.reset(task.bit);
          skip = exist.contains(sub);
        }
        if (skip) {
          ++shortcut_total;
        } else {
          const auto before = solver.solves();
          found = probe(solver, task.owner->seq, task.bit);
          lp_total += solver.solves() - before;
        }
        ++probe_total;
        fresh = found && exist.insert(found->seq);
      } catch (...) {
        lk.lock();
        if (!failure) failure = std::current_exception();
        stop = true;
        --in_flight;
        cv.notify_all();
        break;
      }

      lk.lock();
      if (fresh) {
        const std::size_t level = found->seq.count();
        stacks.push(level, std::move(*found));
      }
      const bool owner_done = --task.owner->remaining == 0;
      --in_flight;
      if (fresh || in_flight == 0) cv.notify_all();
      if (owner_done) {
        lk.unlock();
        emit_pending(*task.owner);
        lk.lock();
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  summary.lp_solves = lp_total.load();
  summary.probes = probe_total.load();
  summary.shortcut_probes = shortcut_total.load();
  summary.wall_seconds = seconds_since(t0);
  if (failure) {
    summary.aborted = true;
    try {
      std::rethrow_exception(failure);
    } catch (const std::exception& e) {
      summary.error = e.what();
    } catch (...) {
      summary.error = "unknown error";
    }
  }
  return summary;
}

// ---------------------------------------------------------------------------
// Linear conjugacy

EdgeOrdering linconj_ordering(const CrnModel& model, const ConstraintOptions& opts, LpSolver& solver,
                              bool compute_core, Realization* dense_witness) {
  auto dense = dense_realization(model, opts, solver);
  GraphStructure core = compute_core ? core_edges(model, dense.structure, opts, solver)
                                     : GraphStructure(static_cast<int>(model.m()));
  if (dense_witness) *dense_witness = std::move(dense.witness);
  return EdgeOrdering(dense.structure, core);
}

namespace {

EngineOptions engine_options(const EnumerateOptions& eopts) {
  EngineOptions e;
  e.threads = eopts.threads;
  e.shortcut_known = eopts.shortcut_known;
  e.progress = eopts.progress;
  e.simplex = eopts.simplex;
  return e;
}

}  // namespace

EnumerationSummary enumerate_linconj(const CrnModel& model, const ConstraintOptions& opts, const Sink& sink,
                                     const EnumerateOptions& eopts) {
  const auto t0 = Clock::now();
  SimplexSolver solver(eopts.simplex);
  Realization dense_witness;
  const EdgeOrdering ord = linconj_ordering(model, opts, solver, eopts.compute_core, &dense_witness);
  const bool with_witness = eopts.with_witness;

  Discovery seed{BitSeq(ord.N(), true), std::nullopt};
  if (with_witness) seed.witness = dense_witness;

  const Probe probe = [&](LpSolver& s, const BitSeq& r, std::size_t i) -> std::optional<Discovery> {
    Realization w;
    auto u = find_linconj_without_edge(model, r, i, ord, opts, s, with_witness ? &w : nullptr);
    if (!u) return std::nullopt;
    Discovery d{std::move(*u), std::nullopt};
    if (with_witness) d.witness = std::move(w);
    return d;
  };

  std::map<std::size_t, std::uint64_t> histogram;
  const EngineEmit emit = [&](const BitSeq& seq, const std::optional<Realization>& w) {
    const GraphStructure g = decode(seq, ord);
    ++histogram[g.size()];
    sink(Emission{seq, g, w ? &*w : nullptr});
  };

  auto summary = run_worklist(ord.N(), std::move(seed), probe, emit, engine_options(eopts));
  summary.histogram = std::move(histogram);
  summary.dense = ord.dense();
  summary.core = ord.core();
  summary.lp_solves += solver.solves();
  summary.wall_seconds = seconds_since(t0);
  return summary;
}

// ---------------------------------------------------------------------------
// Dynamical equivalence: product of per-column supports

void for_each_product(const ColumnExistStore& columns, const std::function<void(const GraphStructure&)>& fn) {
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].empty()) {
      std::ostringstream msg;
      msg << "column " << j + 1 << " has no dynamically equivalent support";
      throw NotRealizable(msg.str());
    }
  }
  if (columns.empty()) return;
  const int m = columns.front().front().num_complexes();
  std::vector<std::size_t> pick(columns.size(), 0);
  while (true) {
    std::vector<Edge> edges;
    for (std::size_t j = 0; j < columns.size(); ++j) {
      const auto& part = columns[j][pick[j]].edges();
      edges.insert(edges.end(), part.begin(), part.end());
    }
    fn(GraphStructure(m, std::move(edges)));
    std::size_t j = 0;
    while (j < columns.size() && ++pick[j] == columns[j].size()) {
      pick[j] = 0;
      ++j;
    }
    if (j == columns.size()) return;
  }
}

std::vector<GraphStructure> build_ak(const ColumnExistStore& columns) {
  std::vector<GraphStructure> out;
  for_each_product(columns, [&](const GraphStructure& g) { out.push_back(g); });
  return out;
}

EnumerationSummary enumerate_dyneq(const CrnModel& model, const ConstraintOptions& opts, const Sink& sink,
                                   const EnumerateOptions& eopts) {
  const auto t0 = Clock::now();
  SimplexSolver solver(eopts.simplex);
  const int m = static_cast<int>(model.m());
  ColumnExistStore columns(static_cast<std::size_t>(m));
  EnumerationSummary summary;

  for (int j = 0; j < m; ++j) {
    auto dense_j = column_dense(model, j, opts, solver);
    if (!dense_j) {
      std::ostringstream msg;
      msg << "no dynamically equivalent realization: column " << j + 1 << " is infeasible";
      throw NotRealizable(msg.str());
    }
    const GraphStructure core_j = eopts.compute_core
                                      ? column_core_edges(model, j, dense_j->structure, opts, solver)
                                      : GraphStructure(m);
    const EdgeOrdering col_ord(dense_j->structure, core_j);
    const Probe probe = [&](LpSolver& s, const BitSeq& r, std::size_t i) -> std::optional<Discovery> {
      auto u = dyneq_column_without_edge(model, j, r, i, col_ord, opts, s);
      if (!u) return std::nullopt;
      return Discovery{std::move(*u), std::nullopt};
    };
    auto& bucket = columns[static_cast<std::size_t>(j)];
    const EngineEmit emit = [&](const BitSeq& seq, const std::optional<Realization>&) {
      bucket.push_back(decode(seq, col_ord));
    };
    const auto part = run_worklist(col_ord.N(), Discovery{BitSeq(col_ord.N(), true), std::nullopt}, probe, emit,
                                   engine_options(eopts));
    summary.lp_solves += part.lp_solves;
    summary.probes += part.probes;
    summary.shortcut_probes += part.shortcut_probes;
    summary.stack_violations += part.stack_violations;
    summary.column_counts.push_back(part.total);
    if (part.aborted) {
      summary.aborted = true;
      summary.error = part.error;
      summary.wall_seconds = seconds_since(t0);
      return summary;
    }
    // Deterministic product order regardless of worker scheduling.
    std::sort(bucket.begin(), bucket.end(),
              [](const GraphStructure& a, const GraphStructure& b) { return a.edges() < b.edges(); });
  }

  // Bit positions follow the linearly conjugate ordering so records match enumerate_linconj.
  const EdgeOrdering ord = linconj_ordering(model, opts, solver, eopts.compute_core);
  for_each_product(columns, [&](const GraphStructure& g) {
    const BitSeq seq = encode(g, ord);
    ++summary.total;
    ++summary.histogram[g.size()];
    sink(Emission{seq, g, nullptr});
  });
  summary.dense = ord.dense();
  summary.core = ord.core();
  summary.N = ord.N();
  summary.lp_solves += solver.solves();
  summary.wall_seconds = seconds_since(t0);
  return summary;
}

// ---------------------------------------------------------------------------
// Oracle

std::vector<BitSeq> brute_force_enumerate(const CrnModel& model, const ConstraintOptions& opts,
                                          const EdgeOrdering& ord, std::size_t cap) {
  const std::size_t n = ord.N();
  if (n > cap) {
    std::ostringstream msg;
    msg << "brute force over " << n << " edges exceeds the cap of " << cap;
    throw std::length_error(msg.str());
  }
  SimplexSolver solver;
  std::vector<BitSeq> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    BitSeq bits(n);
    for (std::size_t i = 0; i < n; ++i) {
      if ((mask >> i) & 1u) bits.set(i);
    }
    const GraphStructure allowed = decode(bits, ord);
    auto r = max_support(model, allowed, opts, solver);
    if (r && r->structure == allowed) out.push_back(bits);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<BitSeq> brute_force_enumerate(const CrnModel& model, const ConstraintOptions& opts, std::size_t cap) {
  SimplexSolver solver;
  return brute_force_enumerate(model, opts, linconj_ordering(model, opts, solver), cap);
}

}  // namespace linconj
