#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <type_traits>

#include "adr/problem.hpp"
#include "adr/resolvents.hpp"
#include "adr/splitting.hpp"

namespace adr {

enum class OracleMethod { linear_solve, grid_search, proximal_gradient };

inline const char* oracle_method_name(OracleMethod m) {
  switch (m) {
    case OracleMethod::linear_solve: return "linear_solve";
    case OracleMethod::grid_search: return "grid_search";
    case OracleMethod::proximal_gradient: return "proximal_gradient";
  }
  return "unknown";
}

/// Result of an independent reference solver. residual is the method's own
/// certificate: ||Ax + Bx|| for the linear solve, the final cell size for
/// the grid, and the fixed-point step norm for proximal gradient.
template <typename Scalar>
struct OracleResult {
  VectorX<Scalar> solution;
  OracleMethod method{OracleMethod::linear_solve};
  Scalar residual{};
  bool certified = false;
  std::optional<Scalar> objective;  // f + g value at the solution, when available
};

/// Direct solution of 0 = (M_A + M_B) x + (b_A + b_B) for affine,
/// forward-evaluable operator pairs.
template <typename Scalar>
OracleResult<Scalar> solve_linear_sum(const ProblemSpec<Scalar>& problem) {
  require(problem.a().affine() && problem.b().affine(), Errc::invalid_argument,
          "linear-sum oracle needs two affine operators");
  require(problem.a().supports_forward() && problem.b().supports_forward(),
          Errc::unsupported_forward, "linear-sum oracle needs forward evaluation");
  MatrixX<Scalar> sum = problem.a().dense_matrix() + problem.b().dense_matrix();
  VectorX<Scalar> offset = problem.a().affine_offset() + problem.b().affine_offset();
  Eigen::FullPivLU<MatrixX<Scalar>> lu(sum);
  require(lu.isInvertible(), Errc::singular_sum,
          "M_A + M_B is singular: zer(A+B) is empty or not a single point");
  OracleResult<Scalar> out;
  out.method = OracleMethod::linear_solve;
  out.solution = lu.solve((-offset).eval());
  out.residual = (problem.a().forward(out.solution) + problem.b().forward(out.solution)).norm();
  out.certified = out.residual <= Scalar(1e-8) * (Scalar(1) + out.solution.norm());
  return out;
}

namespace detail {

template <typename Scalar, typename F>
void scan_grid(const VectorX<Scalar>& lo, const VectorX<Scalar>& hi, int points_per_axis,
               F&& visit) {
  const Eigen::Index dim = lo.size();
  VectorX<Scalar> z(dim);
  if (dim == 1) {
    for (int i = 0; i < points_per_axis; ++i) {
      z(0) = lo(0) + (hi(0) - lo(0)) * Scalar(i) / Scalar(points_per_axis - 1);
      visit(z);
    }
    return;
  }
  for (int i = 0; i < points_per_axis; ++i) {
    z(0) = lo(0) + (hi(0) - lo(0)) * Scalar(i) / Scalar(points_per_axis - 1);
    for (int j = 0; j < points_per_axis; ++j) {
      z(1) = lo(1) + (hi(1) - lo(1)) * Scalar(j) / Scalar(points_per_axis - 1);
      visit(z);
    }
  }
}

}  // namespace detail

/// Reference minimizer of f + g for prox-family operator pairs.
///
/// grid_search (dim <= 2): exhaustive scan over a box inferred from the
/// operator data (a prox_box domain when present, otherwise [-8, 8]^dim),
/// zooming by 10x around the incumbent until the cell size reaches 1e-6.
/// proximal_gradient: forward-backward iteration with step 1/ell on the
/// smooth side; works in any dimension.
template <typename Scalar>
OracleResult<Scalar> minimize_f_plus_g(const ProblemSpec<Scalar>& problem, OracleMethod method,
                                       int budget = 200000) {
  require(problem.a().prox_family() && problem.b().prox_family(), Errc::not_prox_family,
          "objective oracle needs two prox-family operators");
  const Eigen::Index dim = problem.dim();
  auto objective = [&](const VectorX<Scalar>& z) {
    return problem.a().function_value(z) + problem.b().function_value(z);
  };

  if (method == OracleMethod::grid_search) {
    require(dim <= 2, Errc::dimension_too_large, "grid search is limited to dim <= 2");
    VectorX<Scalar> lo = VectorX<Scalar>::Constant(dim, Scalar(-8));
    VectorX<Scalar> hi = VectorX<Scalar>::Constant(dim, Scalar(8));
    for (const auto* op : {&problem.a(), &problem.b()}) {
      if (op->kind() == OperatorKind::prox_box_indicator) {
        lo = lo.cwiseMax(op->payload_vector());
        hi = hi.cwiseMin(op->payload_vector2());
      }
      if (op->kind() == OperatorKind::prox_shifted &&
          op->base().kind() == OperatorKind::prox_box_indicator) {
        lo = lo.cwiseMax(op->base().payload_vector());
        hi = hi.cwiseMin(op->base().payload_vector2());
      }
    }
    const int points = 101;
    VectorX<Scalar> best = lo;
    Scalar best_value = std::numeric_limits<Scalar>::infinity();
    Scalar cell = ((hi - lo) / Scalar(points - 1)).maxCoeff();
    for (int pass = 0; pass < 24; ++pass) {
      detail::scan_grid(lo, hi, points, [&](const VectorX<Scalar>& z) {
        const Scalar v = objective(z);
        if (v < best_value) {
          best_value = v;
          best = z;
        }
      });
      cell = ((hi - lo) / Scalar(points - 1)).maxCoeff();
      if (cell <= Scalar(1e-6)) break;
      // Zoom to 10 cells around the incumbent: cell size shrinks 10x/pass.
      const VectorX<Scalar> half = VectorX<Scalar>::Constant(dim, Scalar(5) * cell);
      lo = best - half;
      hi = best + half;
    }
    OracleResult<Scalar> out;
    out.method = OracleMethod::grid_search;
    out.solution = best;
    out.objective = best_value;
    out.residual = cell;
    out.certified = cell <= Scalar(1e-6);
    return out;
  }

  require(method == OracleMethod::proximal_gradient, Errc::invalid_argument,
          "unknown oracle method");
  // Smooth side = the operator with forward evaluation and a Lipschitz
  // constant; the other side is handled through its prox.
  const bool a_smooth = problem.a().supports_forward() && problem.a().lipschitz().has_value();
  const OperatorHandle<Scalar>& smooth = a_smooth ? problem.a() : problem.b();
  const OperatorHandle<Scalar>& nonsmooth = a_smooth ? problem.b() : problem.a();
  require(smooth.supports_forward() && smooth.lipschitz().has_value(), Errc::missing_lipschitz,
          "proximal gradient needs a smooth side with a Lipschitz constant");
  const Scalar ell = std::max(*smooth.lipschitz(), Scalar(1e-12));
  const Scalar step = Scalar(1) / ell;
  ResolventEvaluator<Scalar> prox(nonsmooth, step);
  VectorX<Scalar> x = VectorX<Scalar>::Zero(dim);
  Scalar residual = std::numeric_limits<Scalar>::infinity();
  for (int it = 0; it < budget; ++it) {
    VectorX<Scalar> next = prox.resolve((x - step * smooth.forward(x)).eval());
    residual = (next - x).norm() / step;
    x = next;
    if (residual <= Scalar(1e-12)) break;
  }
  OracleResult<Scalar> out;
  out.method = OracleMethod::proximal_gradient;
  out.solution = x;
  out.objective = objective(x);
  out.residual = residual;
  out.certified = residual <= Scalar(1e-8);
  return out;
}

/// Empirical Lipschitz estimate of T: max over seeded pairs drawn in a ball
/// around the fixed point (best effort; falls back to the origin when the
/// iteration does not settle) of ||Tx - Ty|| / ||x - y||. Pairs closer than
/// 1e-8 are skipped.
template <typename Scalar>
Scalar estimate_contraction(const ProblemSpec<Scalar>& problem, const DRParams<Scalar>& params,
                            int samples, std::uint64_t seed,
                            std::type_identity_t<Scalar> radius = Scalar(10)) {
  require(samples >= 2, Errc::invalid_argument, "samples must be >= 2");
  AdrOperator<Scalar> T(problem, params);
  VectorX<Scalar> center = VectorX<Scalar>::Zero(problem.dim());
  auto settle = iterate(problem, params, center, Scalar(1e-14), 200000);
  if (settle.converged) center = settle.fixed_point;

  CounterRng rng(seed, 505);
  Scalar worst = Scalar(0);
  for (int i = 0; i < samples; ++i) {
    VectorX<Scalar> x = center + rng.ball_vector<Scalar>(problem.dim(), radius);
    VectorX<Scalar> y = center + rng.ball_vector<Scalar>(problem.dim(), radius);
    const Scalar dist = (x - y).norm();
    if (dist < Scalar(1e-8)) continue;
    worst = std::max(worst, (T.apply(x) - T.apply(y)).norm() / dist);
  }
  return worst;
}

}  // namespace adr
