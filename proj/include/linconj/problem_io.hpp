#pragma once

#include "linconj/enumerate.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace linconj {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON problem document:
///
///   {
///     "species": ["X1", "X2"],
///     "complexes": [[0, 3], [3, 0], [2, 1]],
///     "coefficients": [[3, -2, 0], [-3, 2, 0]],
///     "mass_vector": [1, 1],            (optional)
///     "excluded": [[2, 6]],             (optional, 1-based complex labels)
///     "upper_bound": 1.0,               (optional)
///     "support_tol": 1e-6               (optional)
///   }
///
/// "coefficients" is M given row by row (one row per species).
struct ProblemFile {
  std::vector<std::string> species;
  std::vector<std::vector<double>> complexes;
  Eigen::MatrixXd coefficients;
  std::optional<Eigen::VectorXd> mass_vector;
  std::vector<Edge> excluded;  // 0-based
  std::optional<double> upper_bound;
  std::optional<double> support_tol;

  CrnModel model() const;
  ConstraintOptions options() const;
};

ProblemFile parse_problem(const std::string& text);
ProblemFile load_problem(const std::string& path);
nlohmann::json problem_to_json(const ProblemFile& problem);

/// "2->6" (1-based) to a 0-based edge.
Edge parse_edge(const std::string& text, int num_complexes);
/// "1,2,3,4|5,6": every complex in exactly one group; returns all edges
/// between different groups.
std::set<Edge> confinement_exclusions(const std::string& groups, int num_complexes);
/// "1,2.5,3" to a vector.
Eigen::VectorXd parse_vector(const std::string& text);

/// Rounds to 12 significant digits for output.
double round12(double v);
std::string format12(double v);

/// Stoichiometric sum such as "2X1+X2"; the zero complex is "0".
std::string complex_label(const CrnModel& model, int j);
std::string to_dot(const CrnModel& model, const GraphStructure& g, const std::string& name);

nlohmann::json edges_json(const GraphStructure& g);
GraphStructure edges_from_json(const nlohmann::json& edges, int num_complexes);
nlohmann::json matrix_json(const Eigen::MatrixXd& a);
nlohmann::json realization_json(const CrnModel& model, const Realization& real);

/// One JSONL result record.
nlohmann::json structure_record(const BitSeq& seq, const GraphStructure& g, const Realization* witness = nullptr,
                                const CrnModel* model = nullptr);
nlohmann::json summary_record(const EnumerationSummary& summary, std::uint64_t weakly_connected_count,
                              const std::string& mode);

/// "edge_count,count" lines.
std::string histogram_csv(const EnumerationSummary& summary);
void write_trajectory_csv(std::ostream& out, const std::vector<std::string>& species, const Trajectory& traj);

}  // namespace linconj
