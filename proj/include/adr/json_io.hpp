#pragma once

#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "adr/oracle.hpp"
#include "adr/problem.hpp"
#include "adr/rates.hpp"
#include "adr/splitting.hpp"

namespace adr {

using json = nlohmann::json;

// -- problem schema -----------------------------------------------------------
//
// { "dim": n,
//   "A": {"kind": "<kind>", ...payload},
//   "B": {"kind": "<kind>", ...payload},
//   "known_solution": [...],   (optional)
//   "label": "..." }           (optional)
//
// Payload fields per kind (matrices are row-major arrays of arrays):
//   scaled_identity     alpha
//   linear_matrix       matrix, alpha (optional declared override)
//   skew_plus_alpha     skew, alpha
//   prox_quadratic      q, b (optional), alpha (optional declared override)
//   prox_l1             weight (scalar) or weights (array)
//   prox_box_indicator  lower, upper (scalar or array)
//   prox_shifted        shift, base (nested operator object)

inline Eigen::VectorXd vector_from_json(const json& j, Eigen::Index expected_dim,
                                        const std::string& what) {
  require(j.is_array(), Errc::invalid_problem, what + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& e : j) {
    require(e.is_number(), Errc::invalid_problem, what + " must hold numbers");
    v(i++) = e.get<double>();
  }
  require(expected_dim < 0 || v.size() == expected_dim, Errc::invalid_problem,
          what + " has length " + std::to_string(v.size()) + ", expected " +
              std::to_string(expected_dim));
  return v;
}

inline Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index expected_dim,
                                        const std::string& what) {
  require(j.is_array() && !j.empty(), Errc::invalid_problem,
          what + " must be a non-empty array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m;
  Eigen::Index r = 0;
  for (const auto& row : j) {
    Eigen::VectorXd v = vector_from_json(row, r == 0 ? -1 : m.cols(), what + " row");
    if (r == 0) m.resize(rows, v.size());
    m.row(r++) = v.transpose();
  }
  require(expected_dim < 0 || (m.rows() == expected_dim && m.cols() == expected_dim),
          Errc::invalid_problem, what + " must be " + std::to_string(expected_dim) + "x" +
                                     std::to_string(expected_dim));
  return m;
}

inline json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

inline OperatorHandle<double> operator_from_json(const json& j, Eigen::Index dim) {
  using Handle = OperatorHandle<double>;
  require(j.is_object() && j.contains("kind") && j.at("kind").is_string(), Errc::invalid_problem,
          "operator object needs a string 'kind'");
  const auto kind = kind_from_name(j.at("kind").get<std::string>());
  require(kind.has_value(), Errc::invalid_problem,
          "unknown operator kind '" + j.at("kind").get<std::string>() + "'");
  switch (*kind) {
    case OperatorKind::scaled_identity:
      require(j.contains("alpha"), Errc::invalid_problem, "scaled_identity needs 'alpha'");
      return Handle::make_scaled_identity(dim, j.at("alpha").get<double>());
    case OperatorKind::linear_matrix: {
      auto m = matrix_from_json(j.at("matrix"), dim, "linear_matrix.matrix");
      if (j.contains("alpha"))
        return Handle::make_linear_matrix(std::move(m), j.at("alpha").get<double>());
      return Handle::make_linear_matrix(std::move(m));
    }
    case OperatorKind::skew_plus_alpha: {
      auto s = matrix_from_json(j.at("skew"), dim, "skew_plus_alpha.skew");
      return Handle::make_skew_plus_alpha(std::move(s),
                                          j.contains("alpha") ? j.at("alpha").get<double>() : 0.0);
    }
    case OperatorKind::prox_quadratic: {
      auto q = matrix_from_json(j.at("q"), dim, "prox_quadratic.q");
      Eigen::VectorXd b = j.contains("b") ? vector_from_json(j.at("b"), dim, "prox_quadratic.b")
                                          : Eigen::VectorXd::Zero(dim).eval();
      if (j.contains("alpha"))
        return Handle::make_prox_quadratic(std::move(q), std::move(b),
                                           j.at("alpha").get<double>());
      return Handle::make_prox_quadratic(std::move(q), std::move(b));
    }
    case OperatorKind::prox_l1: {
      if (j.contains("weights"))
        return Handle::make_prox_l1(vector_from_json(j.at("weights"), dim, "prox_l1.weights"));
      require(j.contains("weight"), Errc::invalid_problem,
              "prox_l1 needs 'weight' or 'weights'");
      return Handle::make_prox_l1(dim, j.at("weight").get<double>());
    }
    case OperatorKind::prox_box_indicator: {
      auto bound = [&](const char* key) -> Eigen::VectorXd {
        require(j.contains(key), Errc::invalid_problem,
                std::string("prox_box_indicator needs '") + key + "'");
        if (j.at(key).is_number())
          return Eigen::VectorXd::Constant(dim, j.at(key).get<double>());
        return vector_from_json(j.at(key), dim, std::string("prox_box_indicator.") + key);
      };
      return Handle::make_prox_box(bound("lower"), bound("upper"));
    }
    case OperatorKind::prox_shifted: {
      require(j.contains("base") && j.contains("shift"), Errc::invalid_problem,
              "prox_shifted needs 'base' and 'shift'");
      return Handle::make_prox_shifted(operator_from_json(j.at("base"), dim),
                                       j.at("shift").get<double>());
    }
  }
  raise(Errc::invalid_problem, "unknown operator kind");
}

inline json operator_to_json(const OperatorHandle<double>& op) {
  json j;
  j["kind"] = kind_name(op.kind());
  switch (op.kind()) {
    case OperatorKind::scaled_identity:
      j["alpha"] = op.alpha();
      break;
    case OperatorKind::linear_matrix:
      j["matrix"] = matrix_to_json(op.payload_matrix());
      break;
    case OperatorKind::skew_plus_alpha:
      j["skew"] = matrix_to_json(op.payload_matrix());
      j["alpha"] = op.alpha();
      break;
    case OperatorKind::prox_quadratic:
      j["q"] = matrix_to_json(op.payload_matrix());
      j["b"] = vector_to_json(op.payload_vector());
      break;
    case OperatorKind::prox_l1:
      j["weights"] = vector_to_json(op.payload_vector());
      break;
    case OperatorKind::prox_box_indicator:
      j["lower"] = vector_to_json(op.payload_vector());
      j["upper"] = vector_to_json(op.payload_vector2());
      break;
    case OperatorKind::prox_shifted:
      j["shift"] = op.shift();
      j["base"] = operator_to_json(op.base());
      break;
  }
  return j;
}

inline ProblemSpec<double> problem_from_json(const json& j) {
  require(j.is_object(), Errc::invalid_problem, "problem document must be a JSON object");
  require(j.contains("dim") && j.at("dim").is_number_integer(), Errc::invalid_problem,
          "problem needs an integer 'dim'");
  const auto dim = j.at("dim").get<Eigen::Index>();
  require(dim > 0, Errc::invalid_problem, "'dim' must be positive");
  require(j.contains("A") && j.contains("B"), Errc::invalid_problem,
          "problem needs operators 'A' and 'B'");
  auto a = operator_from_json(j.at("A"), dim);
  auto b = operator_from_json(j.at("B"), dim);
  std::optional<Eigen::VectorXd> known;
  if (j.contains("known_solution") && !j.at("known_solution").is_null())
    known = vector_from_json(j.at("known_solution"), dim, "known_solution");
  std::string label = j.contains("label") ? j.at("label").get<std::string>() : std::string();
  return ProblemSpec<double>(std::move(a), std::move(b), std::move(label), std::move(known));
}

inline json problem_to_json(const ProblemSpec<double>& p) {
  json j;
  j["dim"] = p.dim();
  j["A"] = operator_to_json(p.a());
  j["B"] = operator_to_json(p.b());
  if (p.known_solution()) j["known_solution"] = vector_to_json(*p.known_solution());
  if (!p.label().empty()) j["label"] = p.label();
  return j;
}

inline ProblemSpec<double> load_problem(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::invalid_problem, "cannot open problem file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    raise(Errc::invalid_problem, "problem file " + path + " is not valid JSON: " + e.what());
  }
  return problem_from_json(j);
}

// -- report serialization -------------------------------------------------------

inline json params_to_json(const DRParams<double>& p) {
  return json{{"gamma", p.gamma}, {"delta", p.delta},   {"lambda", p.lambda},
              {"mu", p.mu},       {"kappa", p.kappa},   {"mode", mode_name(p.mode)}};
}

inline json certificate_to_json(const Certificate<double>& c) {
  json j{{"inclusion_residual", c.inclusion_residual},
         {"tolerance", c.tolerance},
         {"passed", c.passed}};
  j["forward_residual"] = c.forward_residual ? json(*c.forward_residual) : json(nullptr);
  return j;
}

inline json rate_report_to_json(const RateReport<double>& r) {
  json feas = json::array();
  for (const auto& c : r.feasibility)
    feas.push_back(json{{"name", c.name}, {"margin", c.margin}, {"ok", c.ok}});
  json j{{"variant", variant_name(r.variant)},
         {"alpha_j", r.alpha_j},
         {"epsilon", r.epsilon},
         {"epsilon_aux", r.epsilon_aux},
         {"phi", r.phi},
         {"feasibility", feas}};
  j["rho"] = r.rho ? json(*r.rho) : json(nullptr);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline json solve_result_to_json(const ProblemSpec<double>& problem,
                                 const DRParams<double>& params, const SolveResult<double>& s,
                                 const Certificate<double>& cert) {
  json j;
  j["label"] = problem.label();
  j["dim"] = problem.dim();
  j["params"] = params_to_json(params);
  j["converged"] = s.converged;
  j["iterations"] = s.iterations;
  j["final_residual"] = s.final_residual;
  j["solution"] = vector_to_json(s.solution);
  j["fixed_point"] = vector_to_json(s.fixed_point);
  j["certificate"] = certificate_to_json(cert);
  if (problem.known_solution())
    j["solution_error"] = (s.solution - *problem.known_solution()).norm();
  return j;
}

inline json error_to_json(const Error& e) {
  return json{{"error", json{{"code", e.code_name()}, {"message", e.what()}}}};
}

}  // namespace adr
