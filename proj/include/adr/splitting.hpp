#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "adr/problem.hpp"
#include "adr/resolvents.hpp"

namespace adr {

enum class DRMode { adaptive, classical };

inline const char* mode_name(DRMode m) {
  return m == DRMode::adaptive ? "adaptive" : "classical";
}

/// Parameter tuple (gamma, delta, lambda, mu, kappa) of the adaptive DR
/// operator  T = (1-kappa) Id + kappa R2 R1  with
///   R1 = (1-lambda) Id + lambda J_{gamma A},
///   R2 = (1-mu) Id + mu J_{delta B}.
/// Adaptive mode ties the parameters by (lambda-1)(mu-1) = 1 and
/// delta = (lambda-1) gamma; classical mode is lambda = mu = 2, gamma = delta.
template <typename Scalar>
struct DRParams {
  Scalar gamma{1};
  Scalar delta{1};
  Scalar lambda{2};
  Scalar mu{2};
  Scalar kappa{Scalar(0.5)};
  DRMode mode{DRMode::classical};

  static DRParams classical(Scalar gamma, Scalar kappa = Scalar(0.5)) {
    return DRParams{gamma, gamma, Scalar(2), Scalar(2), kappa, DRMode::classical};
  }

  /// Adaptive parameters from (gamma, mu): lambda = mu/(mu-1), delta = (lambda-1) gamma.
  static DRParams adaptive(Scalar gamma, Scalar mu, Scalar kappa = Scalar(0.5)) {
    const Scalar lambda = mu / (mu - Scalar(1));
    return DRParams{gamma, (lambda - Scalar(1)) * gamma, lambda, mu, kappa, DRMode::adaptive};
  }
};

/// Equality-constraint tolerance: 1e-12 absolute, widened only when the
/// scalar type cannot resolve that (e.g. float).
template <typename Scalar>
constexpr Scalar coupling_tol() {
  return std::max(Scalar(1e-12), Scalar(8) * std::numeric_limits<Scalar>::epsilon());
}

/// Validates the structural invariants of a parameter tuple; throws
/// KAPPA_RANGE / CQ_VIOLATED / INFEASIBLE_PARAMETERS on violation.
template <typename Scalar>
void validate_params(const DRParams<Scalar>& p) {
  const Scalar tol = coupling_tol<Scalar>();
  require(p.kappa > Scalar(0) && p.kappa < Scalar(1), Errc::kappa_range,
          "kappa must lie strictly inside (0, 1)");
  require(p.gamma > Scalar(0) && p.delta > Scalar(0), Errc::infeasible_parameters,
          "gamma and delta must be positive");
  if (p.mode == DRMode::classical) {
    require(std::abs(p.lambda - Scalar(2)) <= tol && std::abs(p.mu - Scalar(2)) <= tol,
            Errc::cq_violated, "classical mode requires lambda = mu = 2");
    require(std::abs(p.delta - p.gamma) <= tol * std::max(p.gamma, Scalar(1)),
            Errc::cq_violated, "classical mode requires gamma = delta");
    return;
  }
  require(p.lambda > Scalar(1) && p.mu > Scalar(1), Errc::infeasible_parameters,
          "adaptive mode requires lambda > 1 and mu > 1");
  require(std::abs((p.lambda - Scalar(1)) * (p.mu - Scalar(1)) - Scalar(1)) <= tol,
          Errc::cq_violated, "(lambda-1)(mu-1) = 1 violated");
  require(std::abs(p.delta - (p.lambda - Scalar(1)) * p.gamma) <= tol * p.gamma,
          Errc::cq_violated, "delta = (lambda-1) gamma violated");
}

/// Per-iteration record of a DR run. Scalar series (residuals, shadow gaps,
/// Fejer distances) are always kept; the iterate and shadow vectors are
/// stored only when a full trace is requested, since they cost n * dim.
template <typename Scalar>
struct IterationTrace {
  std::vector<Scalar> residuals;
  std::vector<Scalar> shadow_gaps;      // ||J1 x_n - J2 R1 x_n||
  std::vector<Scalar> fejer_distances;  // ||x_n - y|| for the supplied reference
  std::vector<VectorX<Scalar>> iterates;
  std::vector<VectorX<Scalar>> shadows1;
  std::vector<VectorX<Scalar>> shadows2;
  bool full = false;
};

template <typename Scalar>
struct SolveResult {
  VectorX<Scalar> fixed_point;
  VectorX<Scalar> solution;  // J1 applied to the last iterate
  int iterations = 0;
  Scalar final_residual{};
  bool converged = false;
  IterationTrace<Scalar> trace;
};

template <typename Scalar>
struct IterateOptions {
  bool full_trace = false;
  /// Reference fixed point for Fejer distances (typically from a prior
  /// high-accuracy run; Fix T is unknown a priori).
  std::optional<VectorX<Scalar>> reference;
};

/// The adaptive DR operator bundled with its two cached resolvent
/// evaluators. Immutable after construction; apply/step are pure.
template <typename Scalar>
class AdrOperator {
 public:
  using Vector = VectorX<Scalar>;

  AdrOperator(const ProblemSpec<Scalar>& problem, const DRParams<Scalar>& params)
      : params_(params),
        j1_(problem.a(), params.gamma),
        j2_(problem.b(), params.delta) {
    validate_params(params_);
  }

  const DRParams<Scalar>& params() const { return params_; }
  const ResolventEvaluator<Scalar>& j1() const { return j1_; }
  const ResolventEvaluator<Scalar>& j2() const { return j2_; }

  struct Step {
    Vector tx;
    Vector shadow1;  // J1 x
    Vector shadow2;  // J2 R1 x
    Scalar residual;  // ||x - Tx||
  };

  /// One evaluation of T with the shadow points exposed.
  Step step(const Vector& x) const {
    Step s;
    s.shadow1 = j1_.resolve(x);
    Vector r1 = (Scalar(1) - params_.lambda) * x + params_.lambda * s.shadow1;
    s.shadow2 = j2_.resolve(r1);
    Vector r2 = (Scalar(1) - params_.mu) * r1 + params_.mu * s.shadow2;
    s.tx = (Scalar(1) - params_.kappa) * x + params_.kappa * r2;
    s.residual = (x - s.tx).norm();
    return s;
  }

  Vector apply(const Vector& x) const { return step(x).tx; }

 private:
  DRParams<Scalar> params_;
  ResolventEvaluator<Scalar> j1_;
  ResolventEvaluator<Scalar> j2_;
};

template <typename Scalar>
VectorX<Scalar> apply_T(const ProblemSpec<Scalar>& problem, const DRParams<Scalar>& params,
                        const std::type_identity_t<VectorX<Scalar>>& x) {
  return AdrOperator<Scalar>(problem, params).apply(x);
}

/// Fixed-point iteration x_{n+1} = T x_n with the residual stopping rule
/// r_n = ||x_n - T x_n|| <= tol (r_n = 0 exactly characterizes fixed
/// points). Exhausting max_iter is not an error: converged = false with the
/// trace filled. The returned solution is J1 of the last iterate.
template <typename Scalar>
SolveResult<Scalar> iterate(const ProblemSpec<Scalar>& problem, const DRParams<Scalar>& params,
                            const std::type_identity_t<VectorX<Scalar>>& x0,
                            std::type_identity_t<Scalar> tol = Scalar(1e-10), int max_iter = 100000,
                            const IterateOptions<Scalar>& options = {}) {
  require(tol >= Scalar(0), Errc::invalid_argument, "tol must be nonnegative");
  require(max_iter >= 1, Errc::invalid_argument, "max_iter must be >= 1");
  AdrOperator<Scalar> T(problem, params);

  SolveResult<Scalar> out;
  out.trace.full = options.full_trace;
  VectorX<Scalar> x = x0;
  for (int n = 0;; ++n) {
    auto s = T.step(x);
    out.trace.residuals.push_back(s.residual);
    out.trace.shadow_gaps.push_back((s.shadow1 - s.shadow2).norm());
    if (options.reference) out.trace.fejer_distances.push_back((x - *options.reference).norm());
    if (options.full_trace) {
      out.trace.iterates.push_back(x);
      out.trace.shadows1.push_back(s.shadow1);
      out.trace.shadows2.push_back(s.shadow2);
    }
    if (s.residual <= tol) {
      out.fixed_point = x;
      out.solution = s.shadow1;
      out.iterations = n;
      out.final_residual = s.residual;
      out.converged = true;
      return out;
    }
    if (n == max_iter) {
      out.fixed_point = x;
      out.solution = s.shadow1;
      out.iterations = n;
      out.final_residual = s.residual;
      out.converged = false;
      return out;
    }
    x = s.tx;
  }
}

template <typename Scalar>
struct Certificate {
  /// || J1 xbar - J2((1-lambda) xbar + lambda J1 xbar) ||: by the fixed-point
  /// characterization this vanishes exactly on Fix T.
  Scalar inclusion_residual{};
  /// || A a + B a || for a = J1 xbar, when both operators allow forward
  /// evaluation; compared against tol * (1 + ||a||).
  std::optional<Scalar> forward_residual;
  Scalar tolerance{};
  bool passed = false;
};

/// Checks that xbar is (near) a fixed point whose shadow solves 0 in Ax + Bx.
template <typename Scalar>
Certificate<Scalar> certify_solution(const ProblemSpec<Scalar>& problem,
                                     const std::type_identity_t<VectorX<Scalar>>& xbar,
                                     const DRParams<Scalar>& params,
                                     std::type_identity_t<Scalar> tol) {
  AdrOperator<Scalar> T(problem, params);
  Certificate<Scalar> cert;
  cert.tolerance = tol;
  VectorX<Scalar> a = T.j1().resolve(xbar);
  VectorX<Scalar> z = (Scalar(1) - params.lambda) * xbar + params.lambda * a;
  cert.inclusion_residual = (a - T.j2().resolve(z)).norm();
  cert.passed = cert.inclusion_residual <= tol;
  if (problem.a().supports_forward() && problem.b().supports_forward()) {
    cert.forward_residual = (problem.a().forward(a) + problem.b().forward(a)).norm();
    cert.passed = cert.passed && *cert.forward_residual <= tol * (Scalar(1) + a.norm());
  }
  return cert;
}

template <typename Scalar>
struct MetricInequalityReport {
  bool preconditions_ok = false;
  bool passed = false;
  /// max over pairs of (lhs - rhs) / (1 + ||x-y||^2); nonpositive (up to
  /// 1e-10) when the inequality holds.
  Scalar worst_violation = -std::numeric_limits<Scalar>::infinity();
  int samples = 0;
};

/// Seeded check of the contraction-type inequality
///   ||Tx-Ty||^2 <= ||x-y||^2 - (1-k)/k ||(Id-T)x-(Id-T)y||^2
///                  - k mu (2+2 g a - mu) ||J1x-J1y||^2
///                  - k mu (mu-(2-2 g b)) ||J2R1x-J2R1y||^2.
/// Precondition failures (min(lambda, mu) < 1 or the coupling equalities) are
/// reported, not thrown.
template <typename Scalar>
MetricInequalityReport<Scalar> check_metric_inequality(const ProblemSpec<Scalar>& problem,
                                                       const DRParams<Scalar>& params,
                                                       int samples, std::uint64_t seed) {
  require(samples >= 1, Errc::invalid_argument, "samples must be >= 1");
  MetricInequalityReport<Scalar> report;
  report.samples = samples;
  const Scalar cq = (params.lambda - Scalar(1)) * (params.mu - Scalar(1)) - Scalar(1);
  report.preconditions_ok =
      std::min(params.lambda, params.mu) >= Scalar(1) &&
      std::abs(cq) <= coupling_tol<Scalar>() &&
      std::abs(params.delta - (params.lambda - Scalar(1)) * params.gamma) <=
          coupling_tol<Scalar>() * params.gamma;
  if (!report.preconditions_ok) return report;

  AdrOperator<Scalar> T(problem, params);
  const Scalar alpha = problem.a().alpha();
  const Scalar beta = problem.b().alpha();
  const Scalar k = params.kappa;
  const Scalar w1 = (Scalar(1) - k) / k;
  const Scalar w2 = k * params.mu * (Scalar(2) + Scalar(2) * params.gamma * alpha - params.mu);
  const Scalar w3 =
      k * params.mu * (params.mu - (Scalar(2) - Scalar(2) * params.gamma * beta));

  CounterRng rng(seed, 404);
  report.worst_violation = -std::numeric_limits<Scalar>::infinity();
  for (int i = 0; i < samples; ++i) {
    VectorX<Scalar> x = rng.normal_vector<Scalar>(problem.dim());
    VectorX<Scalar> y = rng.normal_vector<Scalar>(problem.dim());
    auto sx = T.step(x);
    auto sy = T.step(y);
    const Scalar lhs = (sx.tx - sy.tx).squaredNorm();
    const Scalar rhs = (x - y).squaredNorm() -
                       w1 * ((x - sx.tx) - (y - sy.tx)).squaredNorm() -
                       w2 * (sx.shadow1 - sy.shadow1).squaredNorm() -
                       w3 * (sx.shadow2 - sy.shadow2).squaredNorm();
    const Scalar scale = Scalar(1) + (x - y).squaredNorm();
    report.worst_violation = std::max(report.worst_violation, (lhs - rhs) / scale);
  }
  report.passed = report.worst_violation <= Scalar(1e-10);
  return report;
}

/// Writes the trace as CSV with a mandatory header and floats at 17
/// significant digits. Iterate coordinates are appended when present and
/// requested.
template <typename Scalar>
void write_trace_csv(std::ostream& os, const IterationTrace<Scalar>& trace,
                     bool include_iterates = false) {
  const bool with_fejer = !trace.fejer_distances.empty();
  const bool with_coords = include_iterates && trace.full && !trace.iterates.empty();
  os << "n,residual,fejer_distance,shadow_gap";
  if (with_coords) {
    for (Eigen::Index j = 0; j < trace.iterates.front().size(); ++j) os << ",x" << j;
  }
  os << "\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
  };
  for (std::size_t n = 0; n < trace.residuals.size(); ++n) {
    os << n << ",";
    put(static_cast<double>(trace.residuals[n]));
    os << ",";
    if (with_fejer) put(static_cast<double>(trace.fejer_distances[n]));
    os << ",";
    put(static_cast<double>(trace.shadow_gaps[n]));
    if (with_coords) {
      for (Eigen::Index j = 0; j < trace.iterates[n].size(); ++j) {
        os << ",";
        put(static_cast<double>(trace.iterates[n](j)));
      }
    }
    os << "\n";
  }
}

template <typename Scalar>
void write_trace_csv(const std::string& path, const IterationTrace<Scalar>& trace,
                     bool include_iterates = false) {
  std::ofstream os(path);
  require(os.good(), Errc::invalid_argument, "cannot open trace file " + path);
  write_trace_csv(os, trace, include_iterates);
}

}  // namespace adr
