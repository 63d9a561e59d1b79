// linconj: dense realizations and exhaustive enumeration of reaction graph
// structures for kinetic polynomial systems on a fixed complex set.
//
// Exit codes: 0 success, 1 usage or parse error, 2 model not realizable.

#include "linconj/problem_io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace linconj;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kInfeasible = 2;

struct CommonArgs {
  std::string file;
  std::vector<std::string> exclude;
  std::string confine;
  std::string mass;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("file", args.file, "JSON problem file")->required();
  cmd->add_option("--exclude", args.exclude, "Exclude a reaction, e.g. \"2->6\" (repeatable)");
  cmd->add_option("--confine", args.confine, "Confine reactions to complex groups, e.g. \"1,2,3,4|5,6\"");
  cmd->add_option("--mass", args.mass, "Species weights k for mass conservation, e.g. \"1,1\"");
}

std::optional<double> env_number(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  try {
    return std::stod(v);
  } catch (const std::exception&) {
    throw ParseError(std::string("invalid value for ") + name);
  }
}

struct Problem {
  ProblemFile file;
  CrnModel model;
  ConstraintOptions opts;
  SimplexOptions simplex;
};

Problem load(const CommonArgs& args) {
  ProblemFile file = load_problem(args.file);
  CrnModel model = file.model();
  const int m = static_cast<int>(model.m());
  if (auto u = env_number("LINCONJ_UPPER_BOUND")) file.upper_bound = *u;
  if (auto t = env_number("LINCONJ_SUPPORT_TOL")) file.support_tol = *t;
  ConstraintOptions opts = file.options();
  for (const auto& e : args.exclude) opts.excluded.insert(parse_edge(e, m));
  if (!args.confine.empty()) {
    const auto extra = confinement_exclusions(args.confine, m);
    opts.excluded.insert(extra.begin(), extra.end());
  }
  if (!args.mass.empty()) opts.mass_vector = parse_vector(args.mass);
  try {
    opts.validate(model);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  SimplexOptions simplex;
  if (auto p = env_number("LINCONJ_PIVOT_TOL")) simplex.pivot_tol = *p;
  if (auto f = env_number("LINCONJ_FEASIBILITY_TOL")) simplex.feasibility_tol = *f;
  return {std::move(file), std::move(model), std::move(opts), simplex};
}

int cmd_check(const CommonArgs& args) {
  const Problem p = load(args);
  SimplexSolver solver(p.simplex);
  const auto dense = dense_realization(p.model, p.opts, solver);
  std::cout << "dense: " << dense.structure.size() << " edges\n";
  return kOk;
}

int cmd_dense(const CommonArgs& args, bool with_params) {
  const Problem p = load(args);
  SimplexSolver solver(p.simplex);
  const auto dense = dense_realization(p.model, p.opts, solver);
  json out;
  out["edges"] = edges_json(dense.structure);
  out["edge_count"] = dense.structure.size();
  if (with_params) out.update(realization_json(p.model, dense.witness));
  std::cout << out.dump() << "\n";
  return kOk;
}

int cmd_core(const CommonArgs& args) {
  const Problem p = load(args);
  SimplexSolver solver(p.simplex);
  const auto dense = dense_realization(p.model, p.opts, solver);
  const auto core = core_edges(p.model, dense.structure, p.opts, solver);
  json out;
  out["core"] = edges_json(core);
  out["dense"] = edges_json(dense.structure);
  std::cout << out.dump() << "\n";
  return kOk;
}

struct EnumerateArgs {
  unsigned threads = 1;
  bool dyneq = false;
  std::string jsonl;
  std::string dot_dir;
  bool histogram = false;
  bool with_params = false;
  bool no_core = false;
  bool no_shortcut = false;
  bool progress = false;
};

int cmd_enumerate(const CommonArgs& args, const EnumerateArgs& ea) {
  const Problem p = load(args);
  std::ofstream file_out;
  if (!ea.jsonl.empty()) {
    file_out.open(ea.jsonl);
    if (!file_out) throw ParseError("cannot write " + ea.jsonl);
  }
  std::ostream& out = ea.jsonl.empty() ? std::cout : file_out;
  if (!ea.dot_dir.empty()) std::filesystem::create_directories(ea.dot_dir);

  EnumerateOptions eopts;
  eopts.threads = ea.threads;
  eopts.compute_core = !ea.no_core;
  eopts.shortcut_known = !ea.no_shortcut;
  eopts.with_witness = ea.with_params && !ea.dyneq;
  eopts.simplex = p.simplex;
  if (ea.progress) {
    eopts.progress = [](const Progress& pr) {
      std::cerr << "[linconj] " << pr.structures << " structures, " << pr.lp_solves << " LP solves, "
                << format12(pr.elapsed_seconds) << " s\n";
    };
  }

  std::uint64_t connected = 0;
  const Sink sink = [&](const Emission& e) {
    const auto rec = structure_record(e.seq, e.structure, e.witness, &p.model);
    if (rec["weakly_connected"].get<bool>()) ++connected;
    out << rec.dump() << "\n";
    if (!ea.dot_dir.empty()) {
      const std::string name = e.seq.size() ? e.seq.to_string() : std::string("empty");
      std::ofstream dot(std::filesystem::path(ea.dot_dir) / (name + ".dot"));
      dot << to_dot(p.model, e.structure, name);
    }
  };

  const auto summary = ea.dyneq ? enumerate_dyneq(p.model, p.opts, sink, eopts)
                                : enumerate_linconj(p.model, p.opts, sink, eopts);
  out << summary_record(summary, connected, ea.dyneq ? "dyneq" : "linconj").dump() << "\n";
  out.flush();
  if (ea.histogram) std::cout << histogram_csv(summary);
  if (summary.aborted) {
    std::cerr << "linconj: enumeration aborted, output is partial: " << summary.error << "\n";
    return kUsage;
  }
  return kOk;
}

struct SimulateArgs {
  std::string x0;
  double dt = 1e-3;
  double t_end = 10.0;
  std::string realization = "original";
  std::string csv;
};

int cmd_simulate(const CommonArgs& args, const SimulateArgs& sa) {
  const Problem p = load(args);
  const Eigen::VectorXd x0 = parse_vector(sa.x0);
  if (x0.size() != p.model.n()) throw ParseError("--x0 must have one entry per species");
  if ((x0.array() <= 0).any()) throw ParseError("--x0 must be strictly positive");
  if (!(sa.dt > 0) || !(sa.t_end >= 0)) throw ParseError("need --dt > 0 and --t-end >= 0");

  Trajectory traj;
  if (sa.realization == "original") {
    traj = simulate(p.model, x0, sa.dt, sa.t_end);
  } else {
    SimplexSolver solver(p.simplex);
    const auto dense = dense_realization(p.model, p.opts, solver);
    const Eigen::MatrixXd rates = recover_rate_coefficients(p.model, dense.witness);
    const Eigen::VectorXd xbar0 = dense.witness.t_inv.cwiseProduct(x0);
    std::cerr << "# t_inv:";
    for (Index i = 0; i < dense.witness.t_inv.size(); ++i) std::cerr << " " << format12(dense.witness.t_inv(i));
    std::cerr << "\n";
    traj = simulate(p.model.Y(), rates, xbar0, sa.dt, sa.t_end);
  }
  if (sa.csv.empty()) {
    write_trajectory_csv(std::cout, p.model.species(), traj);
  } else {
    std::ofstream f(sa.csv);
    if (!f) throw ParseError("cannot write " + sa.csv);
    write_trajectory_csv(f, p.model.species(), traj);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linearly conjugate realizations of kinetic polynomial systems"};
  app.require_subcommand(1);

  CommonArgs common;
  bool with_params = false;
  EnumerateArgs ea;
  SimulateArgs sa;

  auto* check = app.add_subcommand("check", "Check realizability and print the dense edge count");
  add_common(check, common);

  auto* dense = app.add_subcommand("dense", "Print the (constrained) dense realization");
  add_common(dense, common);
  dense->add_flag("--with-params", with_params, "Include t_inv, a_k and the actual rate coefficients");

  auto* core = app.add_subcommand("core", "Print the core edges");
  add_common(core, common);

  auto* enumerate = app.add_subcommand("enumerate", "Enumerate every realizable reaction graph as JSONL");
  add_common(enumerate, common);
  enumerate->add_option("--threads", ea.threads, "Worker threads (0 = all cores)")->capture_default_str();
  enumerate->add_flag("--dyneq", ea.dyneq, "Dynamically equivalent realizations only (T = identity)");
  enumerate->add_option("--jsonl", ea.jsonl, "Write records to this file instead of stdout");
  enumerate->add_option("--dot-dir", ea.dot_dir, "Write one DOT file per structure into this directory");
  enumerate->add_flag("--histogram", ea.histogram, "Print edge_count,count lines after the run");
  enumerate->add_flag("--with-params", ea.with_params, "Attach a witness realization to every record");
  enumerate->add_flag("--no-core", ea.no_core, "Do not compute core edges up front");
  enumerate->add_flag("--no-shortcut", ea.no_shortcut, "Always run the LP probe, even for known subsets");
  enumerate->add_flag("--progress", ea.progress, "Report progress on stderr");

  auto* sim = app.add_subcommand("simulate", "Integrate the original or the dense conjugate system (RK4)");
  add_common(sim, common);
  sim->add_option("--x0", sa.x0, "Initial state of the original system, e.g. \"1,2\"")->required();
  sim->add_option("--dt", sa.dt, "Step size")->capture_default_str();
  sim->add_option("--t-end", sa.t_end, "Final time")->capture_default_str();
  sim->add_option("--realization", sa.realization, "original | dense")
      ->check(CLI::IsMember({"original", "dense"}))
      ->capture_default_str();
  sim->add_option("--csv", sa.csv, "Write the trajectory to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*check) return cmd_check(common);
    if (*dense) return cmd_dense(common, with_params);
    if (*core) return cmd_core(common);
    if (*enumerate) return cmd_enumerate(common, ea);
    if (*sim) return cmd_simulate(common, sa);
  } catch (const NotRealizable& e) {
    std::cerr << "linconj: not realizable: " << e.what() << "\n";
    return kInfeasible;
  } catch (const ParseError& e) {
    std::cerr << "linconj: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "linconj: error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
