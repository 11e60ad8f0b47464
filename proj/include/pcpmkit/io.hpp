#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "pcpmkit/errors.hpp"
#include "pcpmkit/problem.hpp"
#include "pcpmkit/solvers.hpp"

namespace pcpmkit {

// ---------------------------------------------------------------------------
// Matrix Market (dense "array" written; "array" and "coordinate" read)
// ---------------------------------------------------------------------------

inline Eigen::MatrixXd read_matrix_market(std::istream& in, const std::string& name = "<stream>") {
  std::string line;
  if (!std::getline(in, line)) throw IoError(name + ": empty Matrix Market stream");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || object != "matrix")
    throw IoError(name + ": not a Matrix Market matrix header: " + line);
  if (format != "array" && format != "coordinate")
    throw IoError(name + ": unsupported Matrix Market format: " + format);
  if (field != "real" && field != "integer")
    throw IoError(name + ": unsupported Matrix Market field: " + field);
  if (symmetry != "general" && symmetry != "symmetric")
    throw IoError(name + ": unsupported Matrix Market symmetry: " + symmetry);

  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream sizes(line);
  Eigen::Index rows = 0, cols = 0;
  long long nnz = 0;
  if (!(sizes >> rows >> cols)) throw IoError(name + ": bad Matrix Market size line: " + line);
  if (rows <= 0 || cols <= 0) throw IoError(name + ": nonpositive Matrix Market dimensions");
  Eigen::MatrixXd result = Eigen::MatrixXd::Zero(rows, cols);

  if (format == "array") {
    // array entries are column-major
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = (symmetry == "symmetric" ? j : 0); i < rows; ++i) {
        double v;
        if (!(in >> v)) throw IoError(name + ": truncated Matrix Market array data");
        result(i, j) = v;
        if (symmetry == "symmetric") result(j, i) = v;
      }
    }
  } else {
    if (!(sizes >> nnz)) throw IoError(name + ": coordinate header missing entry count");
    for (long long e = 0; e < nnz; ++e) {
      Eigen::Index i, j;
      double v;
      if (!(in >> i >> j >> v)) throw IoError(name + ": truncated Matrix Market coordinate data");
      if (i < 1 || i > rows || j < 1 || j > cols)
        throw IoError(name + ": Matrix Market index out of range");
      result(i - 1, j - 1) = v;
      if (symmetry == "symmetric") result(j - 1, i - 1) = v;
    }
  }
  return result;
}

inline Eigen::MatrixXd read_matrix_market_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open Matrix Market file: " + path);
  return read_matrix_market(in, path);
}

inline void write_matrix_market(std::ostream& out, const Eigen::MatrixXd& m) {
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << ' ' << m.cols() << '\n';
  out << std::setprecision(17);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) out << m(i, j) << '\n';
}

inline void write_matrix_market_file(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open file for writing: " + path);
  write_matrix_market(out, m);
}

// ---------------------------------------------------------------------------
// JSON payload helpers
// ---------------------------------------------------------------------------

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

/// Matrix payload: inline nested arrays, or {"mtx": "relative/path"}
/// resolved against `base_dir`.
inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& base_dir,
                                        const std::string& what) {
  if (j.is_object()) {
    if (!j.contains("mtx") || !j["mtx"].is_string())
      throw IoError(what + ": matrix object payload must be {\"mtx\": \"path\"}");
    std::filesystem::path p = j["mtx"].get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    return read_matrix_market_file(p.string());
  }
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw IoError(what + ": expected nested arrays or {\"mtx\": path}");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw IoError(what + ": ragged matrix rows (row " + std::to_string(i) + ")");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& j, const std::string& base_dir,
                                        const std::string& what) {
  if (j.is_object()) {  // single-column .mtx allowed for vectors
    const Eigen::MatrixXd m = matrix_from_json(j, base_dir, what);
    if (m.cols() != 1) throw IoError(what + ": vector .mtx payload must have one column");
    return m.col(0);
  }
  if (!j.is_array()) throw IoError(what + ": expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

// ---------------------------------------------------------------------------
// ProxFunction <-> JSON
// ---------------------------------------------------------------------------

inline nlohmann::json prox_to_json(const ProxFunction& f) {
  nlohmann::json j;
  switch (f.kind()) {
    case ProxKind::Zero:
      j["kind"] = "zero";
      return j;
    case ProxKind::L1:
      j["kind"] = "l1";
      j["mu"] = f.l1_weight();
      return j;
    case ProxKind::QuadAffine:
      j["kind"] = "quad_affine";
      j["C"] = matrix_to_json(f.quad_matrix());
      j["d"] = vector_to_json(f.quad_offset());
      return j;
    case ProxKind::Box:
      j["kind"] = "box";
      j["lo"] = vector_to_json(f.box_lo());
      j["hi"] = vector_to_json(f.box_hi());
      return j;
    case ProxKind::Custom:
      throw IoError("prox_to_json: custom prox functions are not serializable");
  }
  throw IoError("prox_to_json: unknown kind");
}

inline ProxFunction prox_from_json(const nlohmann::json& j, const std::string& base_dir,
                                   const std::string& what) {
  if (!j.is_object() || !j.contains("kind"))
    throw IoError(what + ": prox payload needs a \"kind\" field");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "zero") return ProxFunction::zero();
  if (kind == "l1") {
    if (!j.contains("mu")) throw IoError(what + ": l1 prox needs \"mu\"");
    return ProxFunction::l1(j["mu"].get<double>());
  }
  if (kind == "quad_affine") {
    if (!j.contains("C") || !j.contains("d")) throw IoError(what + ": quad_affine needs \"C\" and \"d\"");
    return ProxFunction::quad_affine(matrix_from_json(j["C"], base_dir, what + ".C"),
                                     vector_from_json(j["d"], base_dir, what + ".d"));
  }
  if (kind == "box") {
    if (!j.contains("lo") || !j.contains("hi")) throw IoError(what + ": box needs \"lo\" and \"hi\"");
    return ProxFunction::box(vector_from_json(j["lo"], base_dir, what + ".lo"),
                             vector_from_json(j["hi"], base_dir, what + ".hi"));
  }
  throw IoError(what + ": unknown prox kind \"" + kind + "\"");
}

// ---------------------------------------------------------------------------
// ProblemInstance <-> JSON
// ---------------------------------------------------------------------------

inline nlohmann::json problem_to_json(const ProblemInstance& p) {
  nlohmann::json j;
  j["form"] = to_string(p.form());
  j["A"] = matrix_to_json(p.A());
  if (p.form() == ProblemForm::General) {
    j["B"] = matrix_to_json(p.B());
    j["b"] = vector_to_json(p.b());
  }
  j["f"] = prox_to_json(p.f());
  j["g"] = prox_to_json(p.g());
  return j;
}

inline ProblemInstance problem_from_json(const nlohmann::json& j, const std::string& base_dir = "") {
  if (!j.is_object()) throw IoError("problem: top level must be a JSON object");
  for (const char* key : {"form", "A", "f", "g"})
    if (!j.contains(key)) throw IoError(std::string("problem: missing field \"") + key + "\"");
  const std::string form = j["form"].get<std::string>();
  ProxFunction f = prox_from_json(j["f"], base_dir, "problem.f");
  ProxFunction g = prox_from_json(j["g"], base_dir, "problem.g");
  Eigen::MatrixXd a = matrix_from_json(j["A"], base_dir, "problem.A");
  if (form == "splitting") {
    if (j.contains("B") || j.contains("b"))
      throw IoError("problem: splitting form must not carry B or b");
    return ProblemInstance(std::move(f), std::move(g), std::move(a));
  }
  if (form == "general") {
    if (!j.contains("B") || !j.contains("b"))
      throw IoError("problem: general form needs B and b");
    return ProblemInstance(std::move(f), std::move(g), std::move(a),
                           matrix_from_json(j["B"], base_dir, "problem.B"),
                           vector_from_json(j["b"], base_dir, "problem.b"));
  }
  throw IoError("problem: unknown form \"" + form + "\"");
}

inline ProblemInstance read_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open problem file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cannot parse problem file " + path + ": " + e.what());
  }
  return problem_from_json(j, std::filesystem::path(path).parent_path().string());
}

inline void write_problem_file(const std::string& path, const ProblemInstance& p) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open file for writing: " + path);
  out << problem_to_json(p).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// RunReport -> JSON
// ---------------------------------------------------------------------------

inline nlohmann::json report_to_json(const RunReport& r) {
  nlohmann::json j;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["divergence"] = r.divergence_flag;
  j["final_residuals"] = {{"primal", r.final_residuals.primal},
                          {"dual_x", r.final_residuals.dual_x},
                          {"dual_z", r.final_residuals.dual_z},
                          {"objective", r.final_residuals.objective}};
  j["solution"] = {{"x", vector_to_json(r.final_state.x)},
                   {"z", vector_to_json(r.final_state.z)},
                   {"y", vector_to_json(r.final_state.y)}};
  j["warnings"] = r.warnings;
  if (!r.objective_trace.empty()) {
    j["objective_trace"] = r.objective_trace;
    j["primal_residual_trace"] = r.primal_residual_trace;
  }
  return j;
}

}  // namespace pcpmkit
