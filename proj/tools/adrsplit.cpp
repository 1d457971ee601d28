// adrsplit: command-line front end for the adaptive Douglas-Rachford
// splitting library. Subcommands: solve, rates, validate, bench.
//
// Exit codes: 0 success/converged, 1 configuration error, 2 iteration budget
// exhausted, 3 validation failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adr/json_io.hpp"
#include "adr/oracle.hpp"
#include "adr/rates.hpp"
#include "adr/splitting.hpp"

namespace {

using adr::json;
using Handle = adr::OperatorHandle<double>;
using Params = adr::DRParams<double>;
using Problem = adr::ProblemSpec<double>;
using Eigen::VectorXd;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitBudget = 2;
constexpr int kExitValidation = 3;

struct CommonOpts {
  std::string problem_path;
  std::string out_path;
  std::optional<double> gamma, delta, lambda, mu;
  double kappa = 0.5;
  double tol = 1e-10;
  int max_iter = 100000;
  std::uint64_t seed = 0;
  bool trace = false;
};

void emit(const json& doc, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path);
  adr::require(out.good(), adr::Errc::invalid_argument, "cannot open output file " + out_path);
  out << doc.dump(2) << "\n";
}

int fail_config(const adr::Error& e) {
  std::cout << adr::error_to_json(e).dump(2) << "\n";
  return kExitConfig;
}

std::string trace_path_for(const std::string& out_path) {
  if (out_path.empty()) return "trace.csv";
  std::filesystem::path p(out_path);
  p.replace_extension();
  return p.string() + ".trace.csv";
}

/// Manual parameters when any of delta/lambda/mu is given (all three plus
/// gamma are then required); otherwise automatic selection with gamma as an
/// optional hint.
Params resolve_params(const CommonOpts& opts, const Problem& problem) {
  const bool manual = opts.delta || opts.lambda || opts.mu;
  if (!manual)
    return adr::select_params(problem.a().alpha(), problem.b().alpha(), opts.gamma, opts.kappa);
  adr::require(opts.gamma && opts.delta && opts.lambda && opts.mu,
               adr::Errc::infeasible_parameters,
               "manual mode needs --gamma, --delta, --lambda and --mu");
  Params p;
  p.gamma = *opts.gamma;
  p.delta = *opts.delta;
  p.lambda = *opts.lambda;
  p.mu = *opts.mu;
  p.kappa = opts.kappa;
  p.mode = (p.lambda == 2.0 && p.mu == 2.0 && p.gamma == p.delta) ? adr::DRMode::classical
                                                                  : adr::DRMode::adaptive;
  adr::validate_params(p);
  return p;
}

int cmd_solve(const CommonOpts& opts) {
  Problem problem = adr::load_problem(opts.problem_path);
  Params params = resolve_params(opts, problem);

  adr::IterateOptions<double> it_opts;
  it_opts.full_trace = opts.trace;
  auto result = adr::iterate(problem, params, VectorXd::Zero(problem.dim()), opts.tol,
                             opts.max_iter, it_opts);
  auto cert = adr::certify_solution(problem, result.fixed_point, params, 1e-8);
  json doc = adr::solve_result_to_json(problem, params, result, cert);
  if (auto rate = adr::theoretical_rate(problem, params))
    doc["rate"] = adr::rate_report_to_json(*rate);
  emit(doc, opts.out_path);
  if (opts.trace) adr::write_trace_csv(trace_path_for(opts.out_path), result.trace, true);
  return result.converged ? kExitOk : kExitBudget;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Rate sweep over a (beta, ell, gamma) grid. Each cell reports the general
/// and sharp classical rates, the gamma = 1 comparison value, and the
/// empirical contraction of the canonical realization (skew A with spectral
/// norm ell, B = beta*Id, classical parameters).
int cmd_rates_sweep(const CommonOpts& opts, const std::vector<double>& betas,
                    const std::vector<double>& ells, std::vector<double> gammas,
                    int samples) {
  if (gammas.empty()) gammas.push_back(1.0);
  std::ostringstream csv;
  csv << "beta,ell,gamma,rho,rho_sharp,r,empirical\n";
  for (double beta : betas) {
    for (double ell : ells) {
      for (double gamma : gammas) {
        csv << fmt17(beta) << "," << fmt17(ell) << "," << fmt17(gamma) << ","
            << fmt17(*adr::rate_classical_dr(beta, ell, gamma, false).rho) << ","
            << fmt17(*adr::rate_classical_dr(beta, ell, gamma, true).rho) << ",";
        if (gamma == 1.0) csv << fmt17(adr::rate_mv18(beta, ell));
        csv << ",";
        if (samples > 0 && ell > 0.0) {
          Eigen::MatrixXd skew(2, 2);
          skew << 0.0, ell, -ell, 0.0;
          Problem canonical(Handle::make_skew_plus_alpha(skew, 0.0),
                            Handle::make_scaled_identity(2, beta));
          csv << fmt17(adr::estimate_contraction(canonical, Params::classical(gamma), samples,
                                                 opts.seed));
        }
        csv << "\n";
      }
    }
  }
  if (opts.out_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(opts.out_path);
    adr::require(out.good(), adr::Errc::invalid_argument,
                 "cannot open output file " + opts.out_path);
    out << csv.str();
  }
  return kExitOk;
}

int cmd_rates(const CommonOpts& opts, const std::string& variant, std::optional<double> alpha,
              std::optional<double> beta, std::optional<double> ell, bool equality_class,
              bool optimize_gamma) {
  auto need = [&](const std::optional<double>& v, const char* name) {
    adr::require(v.has_value(), adr::Errc::invalid_argument,
                 std::string("--") + name + " is required for variant " + variant);
    return *v;
  };
  json doc;
  if (variant == "lipA" || variant == "lipB") {
    const double a = need(alpha, "alpha");
    const double b = need(beta, "beta");
    const double l = need(ell, "ell");
    // Auto selection works with the constants the rate bound actually uses:
    // when alpha + beta <= 0 the Lipschitz side contributes -ell.
    double sel_a = a, sel_b = b;
    if (!(a + b > 0.0)) {
      if (variant == "lipA" && b > l) sel_a = -l;
      if (variant == "lipB" && a > l) sel_b = -l;
    }
    Params params;
    if (opts.delta || opts.lambda || opts.mu) {
      adr::require(opts.gamma && opts.delta && opts.lambda && opts.mu,
                   adr::Errc::infeasible_parameters,
                   "manual mode needs --gamma, --delta, --lambda and --mu");
      params = Params{*opts.gamma, *opts.delta, *opts.lambda, *opts.mu, opts.kappa,
                      adr::DRMode::adaptive};
      adr::validate_params(params);
    } else {
      params = adr::select_params(sel_a, sel_b, opts.gamma, opts.kappa);
    }
    auto rep = variant == "lipA" ? adr::rate_lipschitz_A(a, b, l, params, equality_class)
                                 : adr::rate_lipschitz_B(a, b, l, params);
    doc = adr::rate_report_to_json(rep);
    doc["params"] = adr::params_to_json(params);
  } else if (variant == "classical-gis") {
    auto rep = adr::rate_classical_gis(need(alpha, "alpha"), need(ell, "ell"),
                                       opts.gamma.value_or(1.0), opts.kappa);
    doc = adr::rate_report_to_json(rep);
  } else if (variant == "classical-dr" || variant == "classical-dr-sharp") {
    const double b = need(beta, "beta");
    const double l = need(ell, "ell");
    const bool sharp = variant == "classical-dr-sharp";
    auto rep = adr::rate_classical_dr(b, l, opts.gamma.value_or(1.0), sharp);
    doc = adr::rate_report_to_json(rep);
    if (optimize_gamma) {
      auto best = adr::best_gamma_classical_dr(b, l, sharp);
      doc["best_gamma"] = json{{"gamma", best.gamma}, {"rho", best.rho}};
    }
  } else if (variant == "mv18-compare") {
    const double b = need(beta, "beta");
    const double l = need(ell, "ell");
    const double rho = *adr::rate_classical_dr(b, l, 1.0, false).rho;
    const double r = adr::rate_mv18(b, l);
    doc = json{{"variant", "mv18_compare"}, {"rho", rho}, {"r", r}, {"strict", rho < r}};
  } else {
    adr::raise(adr::Errc::invalid_argument, "unknown rate variant " + variant);
  }
  emit(doc, opts.out_path);
  return kExitOk;
}

// -- validate -------------------------------------------------------------------

struct InvariantRow {
  std::string name;
  bool passed = false;
  double worst_margin = std::numeric_limits<double>::quiet_NaN();
  std::string message;
};

class ValidationBattery {
 public:
  explicit ValidationBattery(std::uint64_t seed) : seed_(seed) {}

  template <typename F>
  void run(const std::string& name, F&& body) {
    InvariantRow row;
    row.name = name;
    try {
      body(row);
    } catch (const adr::Error& e) {
      row.passed = false;
      row.message = std::string(e.code_name()) + ": " + e.what();
    } catch (const std::exception& e) {
      row.passed = false;
      row.message = e.what();
    }
    rows_.push_back(std::move(row));
  }

  std::uint64_t seed() const { return seed_; }
  const std::vector<InvariantRow>& rows() const { return rows_; }

  bool all_passed() const {
    return std::all_of(rows_.begin(), rows_.end(),
                       [](const InvariantRow& r) { return r.passed; });
  }

  json to_json() const {
    json inv = json::array();
    for (const auto& r : rows_) {
      json e{{"name", r.name}, {"passed", r.passed}};
      e["worst_margin"] = std::isnan(r.worst_margin) ? json(nullptr) : json(r.worst_margin);
      if (!r.message.empty()) e["message"] = r.message;
      inv.push_back(e);
    }
    return json{{"passed", all_passed()}, {"invariants", inv}};
  }

 private:
  std::uint64_t seed_;
  std::vector<InvariantRow> rows_;
};

void validate_operator(ValidationBattery& battery, const Handle& op, const std::string& tag) {
  if (op.supports_forward()) {
    battery.run("monotonicity_" + tag, [&](InvariantRow& row) {
      auto rep = adr::verify_monotonicity(op, 1000, battery.seed());
      row.passed = rep.passed;
      row.worst_margin = rep.worst_margin;
    });
    if (op.lipschitz()) {
      battery.run("lipschitz_forward_" + tag, [&](InvariantRow& row) {
        adr::CounterRng rng(battery.seed(), 7);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
          VectorXd x = rng.normal_vector(op.dim());
          VectorXd y = rng.normal_vector(op.dim());
          const double dist = (x - y).norm();
          if (dist < 1e-12) continue;
          worst = std::max(worst, (op.forward(x) - op.forward(y)).norm() / dist);
        }
        row.worst_margin = *op.lipschitz() * (1.0 + 1e-12) - worst;
        row.passed = row.worst_margin >= 0.0;
      });
    }
  }
  for (double gamma : {0.1, 0.5, 1.0, 2.0}) {
    if (1.0 + gamma * op.alpha() <= 0.0) continue;
    if (op.kind() == adr::OperatorKind::prox_shifted && 1.0 + gamma * op.shift() <= 0.0)
      continue;
    std::ostringstream suffix;
    suffix << tag << "_gamma_" << gamma;
    battery.run("cocoercivity_" + suffix.str(), [&](InvariantRow& row) {
      adr::ResolventEvaluator<double> ev(op, gamma);
      auto rep = adr::check_cocoercivity(ev, 1000, battery.seed());
      row.passed = rep.passed;
      row.worst_margin = std::min(rep.worst_inner_margin, rep.worst_norm_margin);
    });
    if (op.lipschitz()) {
      battery.run("lipschitz_resolvent_" + suffix.str(), [&](InvariantRow& row) {
        adr::ResolventEvaluator<double> ev(op, gamma);
        auto rep = adr::check_lipschitz_resolvent(ev, 1000, battery.seed());
        row.passed = rep.passed;
        row.worst_margin = std::min({rep.worst_expansion_margin, rep.worst_quad_margin,
                                     rep.worst_alpha_j_margin});
      });
    }
  }
}

int cmd_validate(const CommonOpts& opts) {
  Problem problem = adr::load_problem(opts.problem_path);
  ValidationBattery battery(opts.seed == 0 ? 2026 : opts.seed);

  validate_operator(battery, problem.a(), "A");
  validate_operator(battery, problem.b(), "B");

  Params params = resolve_params(opts, problem);

  battery.run("metric_inequality", [&](InvariantRow& row) {
    auto rep = adr::check_metric_inequality(problem, params, 1000, battery.seed());
    row.passed = rep.preconditions_ok && rep.passed;
    row.worst_margin = -rep.worst_violation;
  });

  // Solve-level invariants against a high-accuracy reference fixed point.
  adr::SolveResult<double> reference;
  battery.run("reference_solve", [&](InvariantRow& row) {
    reference = adr::iterate(problem, params, VectorXd::Zero(problem.dim()), 1e-14, 200000);
    row.passed = reference.converged;
    row.worst_margin = -reference.final_residual;
  });
  if (reference.converged) {
    adr::CounterRng rng(battery.seed(), 19);
    adr::IterateOptions<double> it_opts;
    it_opts.reference = reference.fixed_point;
    auto run = adr::iterate(problem, params, rng.normal_vector(problem.dim()), opts.tol,
                            opts.max_iter, it_opts);

    battery.run("fejer_monotonicity", [&](InvariantRow& row) {
      double worst = std::numeric_limits<double>::infinity();
      const auto& d = run.trace.fejer_distances;
      for (std::size_t n = 0; n + 1 < d.size(); ++n)
        worst = std::min(worst, d[n] - d[n + 1] + 1e-12);
      row.worst_margin = worst;
      row.passed = worst >= 0.0;
    });

    battery.run("residual_monotonicity", [&](InvariantRow& row) {
      double worst = std::numeric_limits<double>::infinity();
      const auto& r = run.trace.residuals;
      for (std::size_t n = 0; n + 1 < r.size(); ++n)
        worst = std::min(worst, r[n] - r[n + 1] + 1e-12);
      row.worst_margin = worst;
      row.passed = worst >= 0.0;
    });

    battery.run("telescoping_bound", [&](InvariantRow& row) {
      const double alpha = problem.a().alpha();
      const double beta = problem.b().alpha();
      const double k = params.kappa;
      const double w1 = (1.0 - k) / k;
      const double w2 = k * params.mu * (2.0 + 2.0 * params.gamma * alpha - params.mu);
      const double w3 = k * params.mu * (params.mu - (2.0 - 2.0 * params.gamma * beta));
      const double w2p = (w2 + w3 > 0.0) ? w2 * w3 / (w2 + w3) : 0.0;
      const double coefficient = w1 + w2p / (k * k * params.mu * params.mu);
      double sum = 0.0;
      for (double rn : run.trace.residuals) sum += rn * rn;
      const double bound = run.trace.fejer_distances.front() * run.trace.fejer_distances.front();
      row.worst_margin = bound + 1e-9 - coefficient * sum;
      row.passed = row.worst_margin >= 0.0;
    });

    battery.run("shadow_gap_identity", [&](InvariantRow& row) {
      double worst = std::numeric_limits<double>::infinity();
      for (std::size_t n = 0; n < run.trace.residuals.size(); ++n) {
        const double expected = params.kappa * params.mu * run.trace.shadow_gaps[n];
        const double err = std::abs(run.trace.residuals[n] - expected);
        worst = std::min(worst, 1e-10 * (1.0 + expected) - err);
      }
      row.worst_margin = worst;
      row.passed = worst >= 0.0;
    });

    battery.run("certificate", [&](InvariantRow& row) {
      auto cert = adr::certify_solution(problem, run.fixed_point, params, 1e-8);
      row.passed = run.converged && cert.passed;
      row.worst_margin = 1e-8 - cert.inclusion_residual;
    });
  }

  json doc = battery.to_json();
  doc["label"] = problem.label();
  doc["params"] = adr::params_to_json(params);
  emit(doc, opts.out_path);
  return battery.all_passed() ? kExitOk : kExitValidation;
}

// -- bench ------------------------------------------------------------------------

int cmd_bench(const CommonOpts& opts, const std::string& suite_path) {
  std::ifstream in(suite_path);
  adr::require(in.good(), adr::Errc::invalid_argument, "cannot open suite file " + suite_path);
  json suite;
  try {
    in >> suite;
  } catch (const json::exception& e) {
    adr::raise(adr::Errc::invalid_argument,
               "suite file " + suite_path + " is not valid JSON: " + e.what());
  }
  adr::require(suite.is_object() && suite.contains("problems"), adr::Errc::invalid_argument,
               "suite needs a 'problems' array");

  const auto suite_dir = std::filesystem::path(suite_path).parent_path();
  std::vector<double> gammas;
  if (suite.contains("gamma"))
    for (const auto& g : suite.at("gamma")) gammas.push_back(g.get<double>());
  std::vector<double> kappas;
  if (suite.contains("kappa"))
    for (const auto& k : suite.at("kappa")) kappas.push_back(k.get<double>());
  if (kappas.empty()) kappas.push_back(0.5);
  const std::string mode = suite.value("mode", std::string("auto"));
  const double tol = suite.value("tol", opts.tol);
  const int max_iter = suite.value("max_iter", opts.max_iter);
  const int contraction_samples = suite.value("contraction_samples", 1000);

  // One row per (problem, gamma, kappa); a failing row reports its error code
  // and leaves the remaining rows untouched.
  const std::vector<std::string> columns = {
      "row",        "label",          "dim",       "mode",
      "alpha",      "beta",           "gamma",     "delta",
      "lambda",     "mu",             "kappa",     "converged",
      "iterations", "final_residual", "rate_variant", "rho",
      "empirical_contraction", "solution_error", "wall_time_s", "error"};
  std::ostringstream csv;
  for (std::size_t i = 0; i < columns.size(); ++i)
    csv << columns[i] << (i + 1 < columns.size() ? "," : "\n");
  auto write_row = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < columns.size(); ++i)
      csv << (i < cells.size() ? cells[i] : "") << (i + 1 < columns.size() ? "," : "\n");
  };

  int row_index = 0;
  for (const auto& entry : suite.at("problems")) {
    std::optional<Problem> problem;
    std::string load_error;
    try {
      if (entry.is_string()) {
        auto path = std::filesystem::path(entry.get<std::string>());
        if (path.is_relative() && !suite_dir.empty()) path = suite_dir / path;
        problem = adr::load_problem(path.string());
      } else {
        problem = adr::problem_from_json(entry);
      }
    } catch (const adr::Error& e) {
      load_error = e.code_name();
    }
    const std::vector<double> row_gammas =
        gammas.empty() ? std::vector<double>{1.0} : gammas;
    for (double gamma : row_gammas) {
      for (double kappa : kappas) {
        std::vector<std::string> cells(columns.size());
        cells[0] = std::to_string(row_index);
        if (!problem) {
          cells[19] = load_error;
          write_row(cells);
          ++row_index;
          continue;
        }
        cells[1] = problem->label();
        cells[2] = std::to_string(problem->dim());
        const auto t0 = std::chrono::steady_clock::now();
        try {
          Params params;
          if (mode == "classical") {
            params = Params::classical(gamma, kappa);
            adr::require(adr::classical_condition(problem->a().alpha(), problem->b().alpha(),
                                                  gamma, kappa),
                         adr::Errc::infeasible_parameters,
                         "classical convergence condition fails");
          } else {
            params = adr::select_params(problem->a().alpha(), problem->b().alpha(), gamma,
                                        kappa);
          }
          auto result =
              adr::iterate(*problem, params, VectorXd::Zero(problem->dim()), tol, max_iter);
          auto rate = adr::theoretical_rate(*problem, params);
          double empirical = std::numeric_limits<double>::quiet_NaN();
          if (contraction_samples > 0)
            empirical = adr::estimate_contraction(*problem, params, contraction_samples,
                                                  opts.seed + static_cast<std::uint64_t>(row_index));
          const auto t1 = std::chrono::steady_clock::now();
          cells[3] = adr::mode_name(params.mode);
          cells[4] = fmt17(problem->a().alpha());
          cells[5] = fmt17(problem->b().alpha());
          cells[6] = fmt17(params.gamma);
          cells[7] = fmt17(params.delta);
          cells[8] = fmt17(params.lambda);
          cells[9] = fmt17(params.mu);
          cells[10] = fmt17(params.kappa);
          cells[11] = result.converged ? "1" : "0";
          cells[12] = std::to_string(result.iterations);
          cells[13] = fmt17(result.final_residual);
          if (rate) {
            cells[14] = variant_name(rate->variant);
            if (rate->rho) cells[15] = fmt17(*rate->rho);
          }
          if (!std::isnan(empirical)) cells[16] = fmt17(empirical);
          if (problem->known_solution())
            cells[17] = fmt17((result.solution - *problem->known_solution()).norm());
          cells[18] = fmt17(std::chrono::duration<double>(t1 - t0).count());
        } catch (const adr::Error& e) {
          cells[19] = e.code_name();
        }
        write_row(cells);
        ++row_index;
      }
    }
  }
  if (opts.out_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(opts.out_path);
    adr::require(out.good(), adr::Errc::invalid_argument,
                 "cannot open output file " + opts.out_path);
    out << csv.str();
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive Douglas-Rachford splitting toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string variant = "classical-dr";
  std::string suite_path;
  std::optional<double> alpha, beta, ell;
  bool equality_class = false;
  bool optimize_gamma = false;
  std::vector<double> beta_grid, ell_grid, gamma_grid;
  int sweep_samples = 500;

  auto add_common = [&](CLI::App* cmd, bool with_problem) {
    if (with_problem)
      cmd->add_option("--problem", opts.problem_path, "problem JSON file")->required();
    cmd->add_option_function<double>(
        "--gamma", [&](const double& v) { opts.gamma = v; },
        "resolvent parameter gamma (auto mode: hint)");
    cmd->add_option_function<double>(
        "--delta", [&](const double& v) { opts.delta = v; },
        "resolvent parameter delta (manual mode)");
    cmd->add_option_function<double>(
        "--lambda", [&](const double& v) { opts.lambda = v; },
        "relaxation lambda (manual mode)");
    cmd->add_option_function<double>(
        "--mu", [&](const double& v) { opts.mu = v; }, "relaxation mu (manual mode)");
    cmd->add_option("--kappa", opts.kappa, "averaging parameter in (0,1)");
    cmd->add_option("--tol", opts.tol, "residual stopping tolerance");
    cmd->add_option("--max-iter", opts.max_iter, "iteration budget");
    cmd->add_option("--seed", opts.seed, "seed for all randomized checks");
    cmd->add_option("--out", opts.out_path, "output file (stdout when omitted)");
  };

  auto* solve = app.add_subcommand("solve", "run the splitting iteration on a problem");
  add_common(solve, true);
  solve->add_flag("--trace", opts.trace, "write a CSV iteration trace next to the output");

  auto* rates = app.add_subcommand("rates", "evaluate theoretical contraction rates");
  add_common(rates, false);
  rates->add_option("--variant", variant,
                    "lipA | lipB | classical-gis | classical-dr | classical-dr-sharp | "
                    "mv18-compare");
  rates->add_option_function<double>(
      "--alpha", [&](const double& v) { alpha = v; }, "monotonicity constant of A");
  rates->add_option_function<double>(
      "--beta", [&](const double& v) { beta = v; }, "monotonicity constant of B");
  rates->add_option_function<double>(
      "--ell", [&](const double& v) { ell = v; }, "Lipschitz constant");
  rates->add_flag("--equality-class", equality_class,
                  "use the sharper coefficient branch (lipA only)");
  rates->add_flag("--optimize-gamma", optimize_gamma,
                  "also report the heuristic best gamma (classical-dr)");
  rates->add_option("--beta-grid", beta_grid, "sweep mode: beta values")->delimiter(',');
  rates->add_option("--ell-grid", ell_grid, "sweep mode: ell values")->delimiter(',');
  rates->add_option("--gamma-grid", gamma_grid, "sweep mode: gamma values (default 1)")
      ->delimiter(',');
  rates->add_option("--sweep-samples", sweep_samples,
                    "empirical contraction samples per sweep cell (0 disables)");

  auto* validate = app.add_subcommand("validate", "run the seeded invariant battery");
  add_common(validate, true);

  auto* bench = app.add_subcommand("bench", "sweep a suite of problems, emit CSV");
  add_common(bench, false);
  bench->add_option("--suite", suite_path, "suite JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(opts);
    if (rates->parsed()) {
      if (!beta_grid.empty() || !ell_grid.empty())
        return cmd_rates_sweep(opts, beta_grid, ell_grid, gamma_grid, sweep_samples);
      return cmd_rates(opts, variant, alpha, beta, ell, equality_class, optimize_gamma);
    }
    if (validate->parsed()) return cmd_validate(opts);
    if (bench->parsed()) return cmd_bench(opts, suite_path);
  } catch (const adr::Error& e) {
    return fail_config(e);
  } catch (const std::exception& e) {
    return fail_config(adr::Error(adr::Errc::invalid_argument, e.what()));
  }
  return kExitConfig;
}
