#pragma once

// Deterministic construction of the acceptance problem sets. Each regime is
// a fixed list of seeded instances; candidates are screened so the decades of
// residual decay probed by the long-run criteria stay in the numerically
// meaningful range:
//   - instances with a nonzero fixed point must decay slowly enough that the
//     residual at n = 256 sits far above the rounding floor eps*||xbar||;
//   - instances with fixed point exactly 0 decay cleanly into denormals, so
//     any spectral radius below ~0.99 works;
//   - maps that collapse in finitely many steps (residual exactly zero) are
//     excluded.
// The screening is itself deterministic, so every run sees the same sets.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <vector>

#include "adr/oracle.hpp"
#include "adr/rates.hpp"
#include "adr/splitting.hpp"

namespace acceptance {

using adr::CounterRng;
using Handle = adr::OperatorHandle<double>;
using Params = adr::DRParams<double>;
using Problem = adr::ProblemSpec<double>;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Instance {
  Problem problem;
  Params params;
  bool linear_oracle;  // solve_linear_sum applies; otherwise grid search (dim <= 2)
};

inline MatrixXd random_skew(CounterRng& rng, Eigen::Index n, double sigma) {
  MatrixXd g = rng.normal_matrix(n, n);
  MatrixXd s = (g - g.transpose()) / 2.0;
  const double top = Eigen::JacobiSVD<MatrixXd>(s).singularValues()(0);
  return s * (sigma / top);
}

inline MatrixXd random_spd(CounterRng& rng, Eigen::Index n, double lambda_min,
                           double lambda_max) {
  MatrixXd g = rng.normal_matrix(n, n);
  MatrixXd q = g * g.transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(q);
  const VectorXd ev = es.eigenvalues();
  // Rescale the spectrum affinely onto [lambda_min, lambda_max].
  const double lo = ev(0), hi = ev(n - 1);
  const double scale = (lambda_max - lambda_min) / std::max(hi - lo, 1e-12);
  return es.eigenvectors() *
         ((ev.array() - lo) * scale + lambda_min).matrix().asDiagonal() *
         es.eigenvectors().transpose();
}

/// Spectral radius of the linear part of T for an affine operator pair.
inline double affine_spectral_radius(const Problem& p, const Params& prm) {
  const Eigen::Index n = p.dim();
  const MatrixXd eye = MatrixXd::Identity(n, n);
  const MatrixXd j1 = (eye + prm.gamma * p.a().dense_matrix()).inverse();
  const MatrixXd r1 = (1.0 - prm.lambda) * eye + prm.lambda * j1;
  const MatrixXd j2 = (eye + prm.delta * p.b().dense_matrix()).inverse();
  const MatrixXd r2 = (1.0 - prm.mu) * eye + prm.mu * j2;
  const MatrixXd t = (1.0 - prm.kappa) * eye + prm.kappa * r2 * r1;
  return t.eigenvalues().cwiseAbs().maxCoeff();
}

/// Spectral radius of T in the terminal regime of a quadratic + inactive-prox
/// pair (the second resolvent is locally the constant 0 near the fixed point
/// 0, so T is locally linear).
inline double terminal_spectral_radius_quadratic(const MatrixXd& q, const Params& prm) {
  const Eigen::Index n = q.rows();
  const MatrixXd eye = MatrixXd::Identity(n, n);
  const MatrixXd j1 = (eye + prm.gamma * q).inverse();
  const MatrixXd r1 = (1.0 - prm.lambda) * eye + prm.lambda * j1;
  const MatrixXd t = (1.0 - prm.kappa) * eye + prm.kappa * (1.0 - prm.mu) * r1;
  return t.eigenvalues().cwiseAbs().maxCoeff();
}

// Rate windows: nonzero fixed point needs the residual at n = 256 well above
// eps * ||xbar||; zero fixed point only needs to avoid stalling and exact
// collapse.
constexpr double kOffsetRadiusLo = 0.955;
constexpr double kOffsetRadiusHi = 0.995;
constexpr double kZeroRadiusLo = 0.10;
constexpr double kZeroRadiusHi = 0.99;

// -- regime (a): alpha + beta > 0, adaptive parameters ------------------------

inline Instance regime_a_affine(int k) {
  const bool offset = (k % 4) == 2;
  for (std::uint64_t attempt = 0;; ++attempt) {
    CounterRng rng(1000 + static_cast<std::uint64_t>(k), attempt);
    const Eigen::Index dim = 3 + (k / 2) % 3;
    const double sigma = 0.6 + 1.2 * rng.uniform();
    const double kappa = 0.4 + 0.2 * rng.uniform();
    if (offset) {
      const double alpha = 0.01 + 0.04 * rng.uniform();
      auto a = Handle::make_skew_plus_alpha(random_skew(rng, dim, sigma), alpha);
      const double lam_min = 0.004 + 0.02 * rng.uniform();
      MatrixXd q = random_spd(rng, dim, lam_min, lam_min + 0.3 + 0.3 * rng.uniform());
      VectorXd b = 0.5 * rng.normal_vector(dim);
      auto bop = Handle::make_prox_quadratic(q, b);
      Problem problem(a, bop, "a_affine_offset_" + std::to_string(k));
      auto params = adr::select_params(a.alpha(), bop.alpha(), {}, kappa);
      const double spr = affine_spectral_radius(problem, params);
      if (spr < kOffsetRadiusLo || spr > kOffsetRadiusHi) continue;
      return {problem, params, true};
    }
    const double alpha = 0.3 + 0.9 * rng.uniform();
    auto a = Handle::make_skew_plus_alpha(random_skew(rng, dim, sigma), alpha);
    const double beta = -0.3 * alpha + (0.6 + 0.3 * alpha) * rng.uniform();
    auto bop = Handle::make_scaled_identity(dim, beta);
    Problem problem(a, bop, "a_affine_" + std::to_string(k), VectorXd::Zero(dim));
    auto params = adr::select_params(alpha, beta, {}, kappa);
    const double spr = affine_spectral_radius(problem, params);
    if (spr > kZeroRadiusHi) continue;
    return {problem, params, true};
  }
}

inline Instance regime_a_prox(int k) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    CounterRng rng(2000 + static_cast<std::uint64_t>(k), attempt);
    const double lam_min = 0.4 + 0.8 * rng.uniform();
    MatrixXd q = random_spd(rng, 2, lam_min, lam_min + 0.6 + 0.9 * rng.uniform());
    auto f = Handle::make_prox_quadratic(q);  // zero offset: minimizer is 0
    const double w = 0.25 + 0.55 * rng.uniform();
    const double shift = -(0.2 + 0.3 * rng.uniform()) * f.alpha();
    auto g = Handle::make_prox_shifted(Handle::make_prox_l1(2, w), shift);
    Problem problem(f, g, "a_prox_" + std::to_string(k), VectorXd::Zero(2));
    const double kappa = 0.4 + 0.2 * rng.uniform();
    auto params = adr::select_params(f.alpha(), g.alpha(), {}, kappa);
    if (1.0 + params.delta * shift <= 0.0) continue;
    const double spr = terminal_spectral_radius_quadratic(q, params);
    if (spr < kZeroRadiusLo || spr > kZeroRadiusHi) continue;
    return {problem, params, false};
  }
}

inline std::vector<Instance> regime_a() {
  std::vector<Instance> out;
  for (int k = 0; k < 20; ++k)
    out.push_back(k % 2 == 0 ? regime_a_affine(k) : regime_a_prox(k));
  return out;
}

// -- regime (b): alpha = beta = 0, classical parameters -----------------------

inline Instance regime_b_skew_pair(int k) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    CounterRng rng(3000 + static_cast<std::uint64_t>(k), attempt);
    const Eigen::Index dim = 4;
    MatrixXd s1 = random_skew(rng, dim, 0.5 + 1.0 * rng.uniform());
    MatrixXd s2 = random_skew(rng, dim, 0.5 + 1.0 * rng.uniform());
    if (Eigen::JacobiSVD<MatrixXd>(s1 + s2).singularValues().minCoeff() < 0.25) continue;
    auto a = Handle::make_skew_plus_alpha(s1, 0.0);
    auto b = Handle::make_skew_plus_alpha(s2, 0.0);
    Problem problem(a, b, "b_skew_" + std::to_string(k), VectorXd::Zero(dim));
    const double gamma = 0.6 + 0.9 * rng.uniform();
    const double kappa = 0.4 + 0.2 * rng.uniform();
    auto params = Params::classical(gamma, kappa);
    const double spr = affine_spectral_radius(problem, params);
    if (spr < kZeroRadiusLo || spr > kZeroRadiusHi) continue;
    return {problem, params, true};
  }
}

inline Instance regime_b_l1_box(int k) {
  CounterRng rng(4000 + static_cast<std::uint64_t>(k), 0);
  const double gamma = 0.6 + 0.6 * rng.uniform();
  const double w = 0.3 + 0.5 * rng.uniform();
  // Box strictly containing [-gamma*w, gamma*w], so the terminal piece of T
  // is the pure contraction (1 - 2 kappa) x; kappa away from 1/2 avoids the
  // one-step collapse.
  const double margin = 0.3 + 0.5 * rng.uniform();
  VectorXd lo = VectorXd::Constant(2, -(gamma * w + margin + rng.uniform()));
  VectorXd hi = VectorXd::Constant(2, gamma * w + margin + rng.uniform());
  auto f = Handle::make_prox_l1(2, w);
  auto g = Handle::make_prox_box(lo, hi);
  Problem problem(f, g, "b_l1box_" + std::to_string(k), VectorXd::Zero(2));
  const double kappas[4] = {0.25, 0.3, 0.7, 0.75};
  auto params = Params::classical(gamma, kappas[k % 4]);
  return {problem, params, false};
}

inline std::vector<Instance> regime_b() {
  std::vector<Instance> out;
  for (int k = 0; k < 20; ++k)
    out.push_back(k % 2 == 0 ? regime_b_skew_pair(k) : regime_b_l1_box(k));
  return out;
}

// -- regime (c): classical parameters with the strong/weak balance condition --

inline Instance regime_c_prox(int k) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    CounterRng rng(5000 + static_cast<std::uint64_t>(k), attempt);
    const double lam_min = 0.4 + 0.7 * rng.uniform();
    MatrixXd q = random_spd(rng, 2, lam_min, lam_min + 0.5 + 0.8 * rng.uniform());
    auto f = Handle::make_prox_quadratic(q);
    const double w = 0.3 + 0.4 * rng.uniform();
    const double shift = -f.alpha() / (6.0 + 4.0 * rng.uniform());
    auto g = Handle::make_prox_shifted(Handle::make_prox_l1(2, w), shift);
    Problem problem(f, g, "c_prox_" + std::to_string(k), VectorXd::Zero(2));
    const double gamma = 0.6 + 0.4 * rng.uniform();
    auto params = Params::classical(gamma, 0.5);
    if (!adr::classical_condition(f.alpha(), g.alpha(), gamma, params.kappa)) continue;
    if (1.0 + params.delta * shift <= 0.0) continue;
    const double spr = terminal_spectral_radius_quadratic(q, params);
    if (spr < kZeroRadiusLo || spr > kZeroRadiusHi) continue;
    return {problem, params, false};
  }
}

inline Instance regime_c_affine(int k) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    CounterRng rng(6000 + static_cast<std::uint64_t>(k), attempt);
    const Eigen::Index dim = 2 + (k / 2) % 3;
    const double lam_min = 0.01 + 0.05 * rng.uniform();
    MatrixXd q = random_spd(rng, dim, lam_min, lam_min + 0.3 + 0.4 * rng.uniform());
    auto a = Handle::make_prox_quadratic(q, 0.05 * rng.normal_vector(dim));
    const double beta = -a.alpha() / 6.0;
    auto bop = Handle::make_scaled_identity(dim, beta);
    Problem problem(a, bop, "c_affine_" + std::to_string(k));
    const double gamma = 0.8 + 0.4 * rng.uniform();
    auto params = Params::classical(gamma, 0.5);
    if (!adr::classical_condition(a.alpha(), beta, gamma, params.kappa)) continue;
    const double spr = affine_spectral_radius(problem, params);
    if (spr < kOffsetRadiusLo || spr > kOffsetRadiusHi) continue;
    return {problem, params, true};
  }
}

inline std::vector<Instance> regime_c() {
  std::vector<Instance> out;
  for (int k = 0; k < 20; ++k)
    out.push_back(k % 2 == 0 ? regime_c_prox(k) : regime_c_affine(k));
  return out;
}

// -- criterion 2: Lipschitz-A contraction instances ---------------------------

inline std::vector<Instance> contraction_instances() {
  std::vector<Instance> out;
  for (int k = 0; k < 20; ++k) {
    CounterRng rng(7000 + static_cast<std::uint64_t>(k), 0);
    const Eigen::Index dim = 2 + k % 4;
    Handle a = [&] {
      if (k % 2 == 0) {
        const double alpha = 0.3 + 1.2 * rng.uniform();
        return Handle::make_skew_plus_alpha(random_skew(rng, dim, 0.5 + 1.5 * rng.uniform()),
                                            alpha);
      }
      const double lam_min = 0.3 + 0.9 * rng.uniform();
      return Handle::make_prox_quadratic(
          random_spd(rng, dim, lam_min, lam_min + 0.5 + 1.3 * rng.uniform()),
          rng.normal_vector(dim));
    }();
    const double alpha = a.alpha();
    Handle b = [&]() -> Handle {
      switch (k % 5) {
        case 0:
          return Handle::make_prox_l1(dim, 0.2 + 0.8 * rng.uniform());
        case 1: {
          VectorXd lo = -VectorXd::Constant(dim, 0.5 + rng.uniform());
          VectorXd hi = VectorXd::Constant(dim, 0.5 + rng.uniform());
          return Handle::make_prox_box(lo, hi);
        }
        case 2:
          return Handle::make_scaled_identity(dim,
                                              -0.25 * alpha + (0.8 + 0.25 * alpha) * rng.uniform());
        case 3:
          return Handle::make_prox_shifted(Handle::make_prox_l1(dim, 0.3 + 0.4 * rng.uniform()),
                                           -0.3 * alpha);
        default:
          return Handle::make_linear_matrix(
              MatrixXd(random_spd(rng, dim, 0.05, 0.8) + random_skew(rng, dim, 0.5)));
      }
    }();
    Problem problem(a, b, "contraction_" + std::to_string(k));
    const double kappas[3] = {0.35, 0.5, 0.65};
    out.push_back({problem, adr::select_params(alpha, b.alpha(), {}, kappas[k % 3]), false});
  }
  return out;
}

}  // namespace acceptance
