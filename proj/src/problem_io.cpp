#include "linconj/problem_io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace linconj {

using nlohmann::json;

namespace {

const json& require(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ParseError(std::string("problem file: missing \"") + key + "\"");
  return doc.at(key);
}

double as_number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ParseError("problem file: " + what + " must be a number");
  return v.get<double>();
}

std::vector<double> as_number_list(const json& v, const std::string& what) {
  if (!v.is_array()) throw ParseError("problem file: " + what + " must be an array");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(as_number(x, what + " entry"));
  return out;
}

int parse_label(const std::string& s, int num_complexes) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw ParseError("invalid complex label \"" + s + "\"");
  }
  while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
  if (used != s.size()) throw ParseError("invalid complex label \"" + s + "\"");
  if (v < 1 || v > num_complexes) throw ParseError("complex label " + s + " outside 1.." + std::to_string(num_complexes));
  return v - 1;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace

ProblemFile parse_problem(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("problem file: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("problem file: top level must be an object");

  ProblemFile p;
  const auto& species = require(doc, "species");
  if (!species.is_array()) throw ParseError("problem file: \"species\" must be an array of names");
  for (const auto& s : species) {
    if (!s.is_string()) throw ParseError("problem file: species names must be strings");
    p.species.push_back(s.get<std::string>());
  }
  const auto& complexes = require(doc, "complexes");
  if (!complexes.is_array()) throw ParseError("problem file: \"complexes\" must be an array");
  for (const auto& c : complexes) p.complexes.push_back(as_number_list(c, "complex"));

  const auto& coef = require(doc, "coefficients");
  if (!coef.is_array()) throw ParseError("problem file: \"coefficients\" must be an array of rows");
  const auto rows = static_cast<Index>(coef.size());
  const auto cols = static_cast<Index>(p.complexes.size());
  p.coefficients.resize(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto row = as_number_list(coef[static_cast<std::size_t>(i)], "coefficient row");
    if (static_cast<Index>(row.size()) != cols) {
      throw ParseError("problem file: coefficient row " + std::to_string(i + 1) + " has " +
                       std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
    }
    for (Index j = 0; j < cols; ++j) p.coefficients(i, j) = row[static_cast<std::size_t>(j)];
  }

  if (doc.contains("mass_vector") && !doc["mass_vector"].is_null()) {
    const auto k = as_number_list(doc["mass_vector"], "mass_vector");
    p.mass_vector = Eigen::Map<const Eigen::VectorXd>(k.data(), static_cast<Index>(k.size()));
  }
  if (doc.contains("excluded")) {
    const auto& ex = doc["excluded"];
    if (!ex.is_array()) throw ParseError("problem file: \"excluded\" must be an array of [source, target] pairs");
    for (const auto& e : ex) {
      const auto pair = as_number_list(e, "excluded edge");
      if (pair.size() != 2) throw ParseError("problem file: excluded edges are [source, target] pairs");
      const auto m = static_cast<int>(cols);
      const int s = static_cast<int>(pair[0]);
      const int t = static_cast<int>(pair[1]);
      if (s != pair[0] || t != pair[1] || s < 1 || t < 1 || s > m || t > m || s == t) {
        throw ParseError("problem file: invalid excluded edge");
      }
      p.excluded.push_back({s - 1, t - 1});
    }
  }
  if (doc.contains("upper_bound")) p.upper_bound = as_number(doc["upper_bound"], "upper_bound");
  if (doc.contains("support_tol")) p.support_tol = as_number(doc["support_tol"], "support_tol");
  return p;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str());
}

json problem_to_json(const ProblemFile& p) {
  json doc;
  doc["species"] = p.species;
  doc["complexes"] = p.complexes;
  json rows = json::array();
  for (Index i = 0; i < p.coefficients.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < p.coefficients.cols(); ++j) row.push_back(p.coefficients(i, j));
    rows.push_back(row);
  }
  doc["coefficients"] = rows;
  if (p.mass_vector) doc["mass_vector"] = std::vector<double>(p.mass_vector->begin(), p.mass_vector->end());
  if (!p.excluded.empty()) {
    json ex = json::array();
    for (Edge e : p.excluded) ex.push_back({e.source + 1, e.target + 1});
    doc["excluded"] = ex;
  }
  if (p.upper_bound) doc["upper_bound"] = *p.upper_bound;
  if (p.support_tol) doc["support_tol"] = *p.support_tol;
  return doc;
}

CrnModel ProblemFile::model() const {
  try {
    return build_network(species, complexes, coefficients);
  } catch (const InvalidModel& e) {
    throw ParseError(std::string("problem file: ") + e.what());
  }
}

ConstraintOptions ProblemFile::options() const {
  ConstraintOptions opts;
  if (upper_bound) opts.upper_bound = *upper_bound;
  opts.support_tol = support_tol ? *support_tol : 1e-6 * opts.upper_bound;
  opts.excluded.insert(excluded.begin(), excluded.end());
  opts.mass_vector = mass_vector;
  return opts;
}

Edge parse_edge(const std::string& text, int num_complexes) {
  const auto arrow = text.find("->");
  if (arrow == std::string::npos) throw ParseError("edge \"" + text + "\" must look like \"2->6\"");
  const int s = parse_label(trim(text.substr(0, arrow)), num_complexes);
  const int t = parse_label(trim(text.substr(arrow + 2)), num_complexes);
  if (s == t) throw ParseError("edge \"" + text + "\" is a loop");
  return {s, t};
}

std::set<Edge> confinement_exclusions(const std::string& groups, int num_complexes) {
  std::vector<int> group_of(static_cast<std::size_t>(num_complexes), -1);
  std::stringstream gs(groups);
  std::string group;
  int g = 0;
  while (std::getline(gs, group, '|')) {
    std::stringstream ms(group);
    std::string label;
    while (std::getline(ms, label, ',')) {
      const int c = parse_label(trim(label), num_complexes);
      if (group_of[static_cast<std::size_t>(c)] >= 0) {
        throw ParseError("complex " + trim(label) + " appears in more than one group");
      }
      group_of[static_cast<std::size_t>(c)] = g;
    }
    ++g;
  }
  for (int c = 0; c < num_complexes; ++c) {
    if (group_of[static_cast<std::size_t>(c)] < 0) {
      throw ParseError("complex " + std::to_string(c + 1) + " is not assigned to a group");
    }
  }
  std::set<Edge> out;
  for (int s = 0; s < num_complexes; ++s) {
    for (int t = 0; t < num_complexes; ++t) {
      if (group_of[static_cast<std::size_t>(s)] != group_of[static_cast<std::size_t>(t)]) out.insert({s, t});
    }
  }
  return out;
}

Eigen::VectorXd parse_vector(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const std::string t = trim(item);
      values.push_back(std::stod(t, &used));
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw ParseError("invalid number \"" + item + "\"");
    }
  }
  if (values.empty()) throw ParseError("empty vector");
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
}

std::string format12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double round12(double v) { return std::stod(format12(v)); }

std::string complex_label(const CrnModel& model, int j) {
  std::string out;
  for (Index i = 0; i < model.n(); ++i) {
    const int c = model.Y()(i, j);
    if (c == 0) continue;
    if (!out.empty()) out += "+";
    if (c != 1) out += std::to_string(c);
    out += model.species()[static_cast<std::size_t>(i)];
  }
  return out.empty() ? "0" : out;
}

std::string to_dot(const CrnModel& model, const GraphStructure& g, const std::string& name) {
  std::ostringstream out;
  out << "digraph \"" << name << "\" {\n";
  for (int j = 0; j < model.m(); ++j) {
    out << "  C" << j + 1 << " [label=\"" << complex_label(model, j) << "\"];\n";
  }
  for (Edge e : g.edges()) out << "  C" << e.source + 1 << " -> C" << e.target + 1 << ";\n";
  out << "}\n";
  return out.str();
}

json edges_json(const GraphStructure& g) {
  json out = json::array();
  for (Edge e : g.edges()) out.push_back({e.source + 1, e.target + 1});
  return out;
}

GraphStructure edges_from_json(const json& edges, int num_complexes) {
  GraphStructure g(num_complexes);
  for (const auto& e : edges) g.insert({e.at(0).get<int>() - 1, e.at(1).get<int>() - 1});
  return g;
}

json matrix_json(const Eigen::MatrixXd& a) {
  json rows = json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < a.cols(); ++j) row.push_back(round12(a(i, j)));
    rows.push_back(row);
  }
  return rows;
}

json realization_json(const CrnModel& model, const Realization& real) {
  json out;
  json t = json::array();
  for (Index i = 0; i < real.t_inv.size(); ++i) t.push_back(round12(real.t_inv(i)));
  out["t_inv"] = t;
  out["a_k"] = matrix_json(real.a_k);
  out["rate_coefficients"] = matrix_json(recover_rate_coefficients(model, real));
  return out;
}

json structure_record(const BitSeq& seq, const GraphStructure& g, const Realization* witness, const CrnModel* model) {
  json rec;
  rec["seq"] = seq.to_string();
  rec["edges"] = edges_json(g);
  rec["edge_count"] = g.size();
  const auto classes = linkage_classes(g);
  rec["weakly_connected"] = classes.size() == 1;
  rec["linkage_classes"] = classes.size();
  if (witness && model) rec["witness"] = realization_json(*model, *witness);
  return rec;
}

json summary_record(const EnumerationSummary& s, std::uint64_t weakly_connected_count, const std::string& mode) {
  json body;
  body["mode"] = mode;
  body["total"] = s.total;
  body["weakly_connected"] = weakly_connected_count;
  json hist = json::array();
  for (const auto& [edges, count] : s.histogram) hist.push_back({edges, count});
  body["histogram"] = hist;
  body["dense"] = edges_json(s.dense);
  body["core"] = edges_json(s.core);
  body["N"] = s.N;
  body["lp_solves"] = s.lp_solves;
  body["probes"] = s.probes;
  body["shortcut_probes"] = s.shortcut_probes;
  body["max_lp_solves_between_emissions"] = s.max_lp_solves_between_emissions;
  if (!s.column_counts.empty()) body["column_counts"] = s.column_counts;
  body["wall_seconds"] = round12(s.wall_seconds);
  body["linkage_classes_exclude_isolated_complexes"] = true;
  body["aborted"] = s.aborted;
  if (s.aborted) body["error"] = s.error;
  return json{{"summary", body}};
}

std::string histogram_csv(const EnumerationSummary& s) {
  std::ostringstream out;
  out << "edge_count,count\n";
  for (const auto& [edges, count] : s.histogram) out << edges << "," << count << "\n";
  return out.str();
}

void write_trajectory_csv(std::ostream& out, const std::vector<std::string>& species, const Trajectory& traj) {
  out << "t";
  for (const auto& s : species) out << "," << s;
  out << "\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << format12(traj.times[k]);
    for (Index i = 0; i < traj.states[k].size(); ++i) out << "," << format12(traj.states[k](i));
    out << "\n";
  }
}

}  // namespace linconj
