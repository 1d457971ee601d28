#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "adr/problem.hpp"
#include "adr/resolvents.hpp"
#include "adr/splitting.hpp"

namespace adr {

enum class RateVariant {
  lip_a,
  lip_b,
  classical_gis,
  classical_dr,
  classical_dr_sharp,
  mv18,
};

inline const char* variant_name(RateVariant v) {
  switch (v) {
    case RateVariant::lip_a: return "lipA";
    case RateVariant::lip_b: return "lipB";
    case RateVariant::classical_gis: return "classical_gis";
    case RateVariant::classical_dr: return "classical_dr";
    case RateVariant::classical_dr_sharp: return "classical_dr_sharp";
    case RateVariant::mv18: return "mv18";
  }
  return "unknown";
}

template <typename Scalar>
struct ConstraintMargin {
  std::string name;
  Scalar margin{};
  bool ok = false;
};

/// Theoretical contraction constant of the DR operator together with the
/// intermediate quantities of the rate formula and the feasibility margins
/// of the parameter constraints. rho is absent when no guarantee applies.
template <typename Scalar>
struct RateReport {
  std::optional<Scalar> rho;
  RateVariant variant{RateVariant::lip_a};
  Scalar alpha_j{};
  Scalar epsilon{};
  Scalar epsilon_aux{};  // kappa * epsilon / (1 - kappa)
  Scalar phi{};
  std::vector<ConstraintMargin<Scalar>> feasibility;
  std::string note;

  bool applicable() const { return rho.has_value(); }
};

namespace detail {
// Equality constraints carry a 1e-12 absolute tolerance (widened only for
// scalar types that cannot resolve it); interval endpoint comparisons get
// the same slack so the two equivalent constraint forms always agree under
// rounding. Strict positivity is evaluated with zero slack.
template <typename Scalar>
constexpr Scalar feas_tol() {
  return coupling_tol<Scalar>();
}
}  // namespace detail

/// Margins of the adaptive-parameter constraints for (alpha, beta):
///   1 + 2 gamma alpha > 0,
///   mu in [2 - 2 gamma beta, 2 + 2 gamma alpha],
///   (lambda-1)(mu-1) = 1 and delta = (lambda-1) gamma.
template <typename Scalar>
std::vector<ConstraintMargin<Scalar>> params_constraints(const DRParams<Scalar>& p, Scalar alpha,
                                                         Scalar beta) {
  const Scalar tol = detail::feas_tol<Scalar>();
  std::vector<ConstraintMargin<Scalar>> m;
  m.push_back({"gamma_positive", p.gamma, p.gamma > Scalar(0)});
  m.push_back({"delta_positive", p.delta, p.delta > Scalar(0)});
  m.push_back({"lambda_above_one", p.lambda - Scalar(1), p.lambda > Scalar(1)});
  m.push_back({"mu_above_one", p.mu - Scalar(1), p.mu > Scalar(1)});
  const Scalar sv = Scalar(1) + Scalar(2) * p.gamma * alpha;
  m.push_back({"one_plus_two_gamma_alpha", sv, sv > Scalar(0)});
  const Scalar lower = p.mu - (Scalar(2) - Scalar(2) * p.gamma * beta);
  m.push_back({"mu_lower", lower, lower >= -tol});
  const Scalar upper = (Scalar(2) + Scalar(2) * p.gamma * alpha) - p.mu;
  m.push_back({"mu_upper", upper, upper >= -tol});
  const Scalar product = (p.lambda - Scalar(1)) * (p.mu - Scalar(1)) - Scalar(1);
  m.push_back({"coupling_product", product, std::abs(product) <= tol});
  const Scalar coupling = p.delta - (p.lambda - Scalar(1)) * p.gamma;
  m.push_back({"coupling_delta", coupling, std::abs(coupling) <= tol * p.gamma});
  return m;
}

template <typename Scalar>
bool params_feasible(const DRParams<Scalar>& p, Scalar alpha, Scalar beta) {
  for (const auto& c : params_constraints(p, alpha, beta))
    if (!c.ok) return false;
  return true;
}

/// Equivalent constraint set with the roles of (alpha, gamma) and
/// (beta, delta) exchanged:
///   1 + 2 delta beta > 0, lambda in [2 - 2 delta alpha, 2 + 2 delta beta],
///   (mu-1)(lambda-1) = 1 and gamma = (mu-1) delta.
/// Agrees with params_feasible whenever both are evaluated on the same tuple.
template <typename Scalar>
bool check_params_symmetric(const DRParams<Scalar>& p, Scalar alpha, Scalar beta) {
  const Scalar tol = detail::feas_tol<Scalar>();
  if (!(p.gamma > Scalar(0) && p.delta > Scalar(0) && p.lambda > Scalar(1) &&
        p.mu > Scalar(1)))
    return false;
  if (!(Scalar(1) + Scalar(2) * p.delta * beta > Scalar(0))) return false;
  if (!(p.lambda - (Scalar(2) - Scalar(2) * p.delta * alpha) >= -tol)) return false;
  if (!((Scalar(2) + Scalar(2) * p.delta * beta) - p.lambda >= -tol)) return false;
  if (!(std::abs((p.mu - Scalar(1)) * (p.lambda - Scalar(1)) - Scalar(1)) <= tol)) return false;
  if (!(std::abs(p.gamma - (p.mu - Scalar(1)) * p.delta) <= tol * p.delta)) return false;
  return true;
}

/// Feasible parameter tuple for maximally alpha- and beta-monotone operators
/// with alpha + beta >= 0. gamma defaults to 1 for alpha >= 0 and to
/// 1/(4|alpha|) otherwise (margin 1 + 2 gamma alpha = 1/2); mu is the
/// midpoint of the admissible interval after clamping its lower end to
/// 1 + 1e-6.
template <typename Scalar>
DRParams<Scalar> select_params(Scalar alpha, Scalar beta,
                               std::optional<std::type_identity_t<Scalar>> gamma_hint = {},
                               std::type_identity_t<Scalar> kappa = Scalar(0.5)) {
  require(kappa > Scalar(0) && kappa < Scalar(1), Errc::kappa_range,
          "kappa must lie strictly inside (0, 1)");
  require(alpha + beta >= Scalar(0), Errc::infeasible_parameters,
          "alpha + beta >= 0 is required for parameter selection");
  Scalar gamma;
  if (gamma_hint) {
    gamma = *gamma_hint;
    require(gamma > Scalar(0) && Scalar(1) + Scalar(2) * gamma * alpha > Scalar(0),
            Errc::infeasible_parameters, "gamma hint violates 1 + 2*gamma*alpha > 0");
  } else {
    gamma = alpha >= Scalar(0) ? Scalar(1) : Scalar(1) / (Scalar(4) * std::abs(alpha));
  }
  const Scalar hi = Scalar(2) + Scalar(2) * gamma * alpha;
  const Scalar lo = std::max(Scalar(2) - Scalar(2) * gamma * beta, Scalar(1) + Scalar(1e-6));
  require(lo <= hi, Errc::infeasible_parameters,
          "admissible interval for mu is empty with this gamma");
  const Scalar mu = (lo + hi) / Scalar(2);
  DRParams<Scalar> p = DRParams<Scalar>::adaptive(gamma, mu, kappa);
  if (p.lambda == Scalar(2) && p.mu == Scalar(2) && p.delta == p.gamma)
    p.mode = DRMode::classical;
  return p;
}

/// Convergence condition of the classical DR parameterization
/// (lambda = mu = 2, gamma = delta): either alpha = beta = 0, or
/// alpha + beta > 0 with 1 + gamma*alpha*beta/(alpha+beta) > kappa.
template <typename Scalar>
bool classical_condition(Scalar alpha, Scalar beta, Scalar gamma, Scalar kappa) {
  if (alpha == Scalar(0) && beta == Scalar(0)) return true;
  return alpha + beta > Scalar(0) &&
         Scalar(1) + gamma * alpha * beta / (alpha + beta) > kappa;
}

namespace detail {
template <typename Scalar>
Scalar sqrt_clamped(Scalar v) {
  return std::sqrt(std::max(v, Scalar(0)));
}

template <typename Scalar>
void require_feasible(const DRParams<Scalar>& p, Scalar alpha, Scalar beta) {
  for (const auto& c : params_constraints(p, alpha, beta)) {
    require(c.ok, Errc::infeasible_parameters,
            "parameter constraint violated: " + c.name + " (margin " +
                std::to_string(static_cast<double>(c.margin)) + ")");
  }
}
}  // namespace detail

/// Contraction constant of T when A is alpha-monotone and Lipschitz with
/// constant ell (or merely Lipschitz, in which case beta > ell lets alpha be
/// replaced by -ell). Requires feasible parameters; the reported rho is < 1.
template <typename Scalar>
RateReport<Scalar> rate_lipschitz_A(Scalar alpha, Scalar beta, Scalar ell,
                                    const DRParams<Scalar>& params,
                                    bool equality_class = false) {
  require(ell >= Scalar(0), Errc::invalid_constants, "Lipschitz constant must be nonnegative");
  if (!(alpha + beta > Scalar(0))) {
    require(beta > ell, Errc::rate_not_applicable,
            "needs alpha + beta > 0, or beta > ell with alpha := -ell");
    alpha = -ell;
  }
  require(std::abs(alpha) <= ell, Errc::invalid_constants,
          "|alpha| <= ell is required on the Lipschitz side");
  detail::require_feasible(params, alpha, beta);

  const Scalar g = params.gamma, d = params.delta, l = params.lambda, m = params.mu,
               k = params.kappa;
  RateReport<Scalar> rep;
  rep.variant = RateVariant::lip_a;
  rep.feasibility = params_constraints(params, alpha, beta);
  rep.epsilon = (m - (Scalar(2) - Scalar(2) * g * beta)) / (Scalar(2) * (Scalar(1) + d * beta));
  rep.epsilon_aux = k * rep.epsilon / (Scalar(1) - k);
  const Scalar one_ga = Scalar(1) + g * alpha;
  rep.phi = rep.epsilon_aux * l *
            (Scalar(2) * one_ga +
             rep.epsilon_aux * (l * (Scalar(1) + Scalar(2) * g * alpha) - Scalar(2) * one_ga));
  rep.alpha_j = compute_alpha_J(alpha, ell, g, equality_class);
  const Scalar denom = Scalar(1) + Scalar(2) * g * alpha + g * g * ell * ell;
  const Scalar first = detail::sqrt_clamped(
      (Scalar(1) + rep.epsilon_aux * (l - Scalar(1))) *
          (Scalar(1) + rep.epsilon_aux * (l - Scalar(1))) -
      rep.phi * rep.alpha_j);
  const Scalar second = detail::sqrt_clamped(
      Scalar(1) - m * (Scalar(2) + Scalar(2) * g * alpha - m) / denom);
  const Scalar rho = (Scalar(1) - k) * first + k * (Scalar(1) - rep.epsilon * (l - Scalar(1))) * second;
  if (rho < Scalar(1)) {
    rep.rho = rho;
  } else {
    rep.note = "computed bound is not below one; no contraction guarantee";
  }
  return rep;
}

/// Mirror of rate_lipschitz_A for a Lipschitz second operator B, which must
/// be linear. The roles of (alpha, gamma, lambda) and (beta, delta, mu) are
/// exchanged throughout; phi is evaluated with the B-side auxiliary constant
/// epsilon_aux = kappa*epsilon/(1-kappa) under that exchange.
template <typename Scalar>
RateReport<Scalar> rate_lipschitz_B(Scalar alpha, Scalar beta, Scalar ell,
                                    const DRParams<Scalar>& params) {
  require(ell >= Scalar(0), Errc::invalid_constants, "Lipschitz constant must be nonnegative");
  if (!(alpha + beta > Scalar(0))) {
    require(alpha > ell, Errc::rate_not_applicable,
            "needs alpha + beta > 0, or alpha > ell with beta := -ell");
    beta = -ell;
  }
  require(std::abs(beta) <= ell, Errc::invalid_constants,
          "|beta| <= ell is required on the Lipschitz side");
  detail::require_feasible(params, alpha, beta);

  const Scalar g = params.gamma, d = params.delta, l = params.lambda, m = params.mu,
               k = params.kappa;
  RateReport<Scalar> rep;
  rep.variant = RateVariant::lip_b;
  rep.feasibility = params_constraints(params, alpha, beta);
  rep.note = "phi evaluated with the B-side epsilon_aux under the "
             "(alpha,gamma,lambda)<->(beta,delta,mu) exchange";
  rep.epsilon = (l - (Scalar(2) - Scalar(2) * d * alpha)) / (Scalar(2) * (Scalar(1) + g * alpha));
  rep.epsilon_aux = k * rep.epsilon / (Scalar(1) - k);
  const Scalar one_db = Scalar(1) + d * beta;
  rep.phi = rep.epsilon_aux * m *
            (Scalar(2) * one_db +
             rep.epsilon_aux * (m * (Scalar(1) + Scalar(2) * d * beta) - Scalar(2) * one_db));
  rep.alpha_j = compute_alpha_J(beta, ell, d, false);
  const Scalar denom = Scalar(1) + Scalar(2) * d * beta + d * d * ell * ell;
  const Scalar first = detail::sqrt_clamped(
      (Scalar(1) + rep.epsilon_aux * (m - Scalar(1))) *
          (Scalar(1) + rep.epsilon_aux * (m - Scalar(1))) -
      rep.phi * rep.alpha_j);
  const Scalar second = detail::sqrt_clamped(
      Scalar(1) - l * (Scalar(2) + Scalar(2) * d * beta - l) / denom);
  const Scalar rho = (Scalar(1) - k) * first + k * (Scalar(1) - rep.epsilon * (m - Scalar(1))) * second;
  if (rho < Scalar(1)) {
    rep.rho = rho;
  } else {
    rep.note += rep.note.empty() ? "" : "; ";
    rep.note += "computed bound is not below one; no contraction guarantee";
  }
  return rep;
}

/// Problem-aware entry: constants and the equality-class flag are read off
/// the operator handles.
template <typename Scalar>
RateReport<Scalar> rate_lipschitz_A(const ProblemSpec<Scalar>& problem,
                                    const DRParams<Scalar>& params) {
  require(problem.a().lipschitz().has_value(), Errc::missing_lipschitz,
          "operator A has no declared Lipschitz constant");
  return rate_lipschitz_A(problem.a().alpha(), problem.b().alpha(), *problem.a().lipschitz(),
                          params, problem.a().kind() == OperatorKind::skew_plus_alpha);
}

template <typename Scalar>
RateReport<Scalar> rate_lipschitz_B(const ProblemSpec<Scalar>& problem,
                                    const DRParams<Scalar>& params) {
  require(problem.b().lipschitz().has_value(), Errc::missing_lipschitz,
          "operator B has no declared Lipschitz constant");
  require(problem.b().linear(), Errc::requires_linear_b,
          "the B-side rate requires a linear operator B");
  return rate_lipschitz_B(problem.a().alpha(), problem.b().alpha(), *problem.b().lipschitz(),
                          params);
}

/// Classical parameterization with strongly monotone Lipschitz A:
///   rho = (1-kappa) + kappa sqrt(1 - 4 g a / (1 + 2 g a + g^2 l^2)).
template <typename Scalar>
RateReport<Scalar> rate_classical_gis(Scalar alpha, Scalar ell, Scalar gamma, Scalar kappa) {
  require(alpha > Scalar(0), Errc::invalid_constants, "alpha must be positive");
  require(alpha <= ell, Errc::invalid_constants, "alpha <= ell is required");
  require(gamma > Scalar(0), Errc::invalid_constants, "gamma must be positive");
  require(kappa > Scalar(0) && kappa < Scalar(1), Errc::kappa_range,
          "kappa must lie strictly inside (0, 1)");
  RateReport<Scalar> rep;
  rep.variant = RateVariant::classical_gis;
  const Scalar denom = Scalar(1) + Scalar(2) * gamma * alpha + gamma * gamma * ell * ell;
  rep.alpha_j = Scalar(1) / denom;
  rep.rho = (Scalar(1) - kappa) +
            kappa * detail::sqrt_clamped(Scalar(1) - Scalar(4) * gamma * alpha / denom);
  return rep;
}

/// Classical DR rate (kappa = 1/2) for monotone Lipschitz A and strongly
/// monotone B. sharp = true uses the tighter coefficient available when A
/// annihilates the monotonicity inner product (e.g. linear skew A).
template <typename Scalar>
RateReport<Scalar> rate_classical_dr(Scalar beta, Scalar ell, Scalar gamma, bool sharp) {
  require(beta > Scalar(0), Errc::invalid_constants, "beta must be positive");
  require(ell >= Scalar(0), Errc::invalid_constants, "ell must be nonnegative");
  require(gamma > Scalar(0), Errc::invalid_constants, "gamma must be positive");
  RateReport<Scalar> rep;
  rep.variant = sharp ? RateVariant::classical_dr_sharp : RateVariant::classical_dr;
  const Scalar quad = Scalar(1) / (Scalar(1) + gamma * gamma * ell * ell);
  const Scalar lin = Scalar(1) / (Scalar(1) + gamma * ell);
  rep.alpha_j = sharp ? quad : std::min(lin, quad);
  rep.epsilon = gamma * beta / (Scalar(1) + gamma * beta);
  const Scalar one2 = Scalar(1) + Scalar(2) * gamma * beta;
  const Scalar rho = (detail::sqrt_clamped(one2 * one2 - Scalar(4) * gamma * beta *
                                                             (Scalar(1) + gamma * beta) *
                                                             rep.alpha_j) +
                      Scalar(1)) /
                     (Scalar(2) * (Scalar(1) + gamma * beta));
  rep.rho = rho;
  return rep;
}

/// Reference rate for the classical DR operator at gamma = delta = 1 from an
/// earlier analysis; rate_classical_dr is strictly below it for all
/// beta > 0, ell >= 0.
template <typename Scalar>
Scalar rate_mv18(Scalar beta, Scalar ell) {
  require(beta > Scalar(0), Errc::invalid_constants, "beta must be positive");
  require(ell >= Scalar(0), Errc::invalid_constants, "ell must be nonnegative");
  const Scalar one2 = Scalar(1) + Scalar(2) * beta;
  const Scalar mixed = Scalar(1) / ((Scalar(1) + ell) * (Scalar(1) + ell)) +
                       Scalar(1) / (Scalar(1) + ell * ell);
  return (detail::sqrt_clamped(one2 * one2 - Scalar(2) * beta * (Scalar(1) + beta) * mixed) +
          Scalar(1)) /
         (Scalar(2) * (Scalar(1) + beta));
}

template <typename Scalar>
struct GammaSearchResult {
  Scalar gamma{};
  Scalar rho{};
};

/// Heuristic 1-D minimization of the classical DR rate over gamma: coarse
/// log-spaced scan followed by golden-section refinement. No closed form for
/// the optimal gamma is known.
template <typename Scalar>
GammaSearchResult<Scalar> best_gamma_classical_dr(Scalar beta, Scalar ell, bool sharp = false,
                                                  Scalar log10_lo = Scalar(-3),
                                                  Scalar log10_hi = Scalar(3)) {
  auto rho_of = [&](Scalar t) {
    return *rate_classical_dr(beta, ell, std::pow(Scalar(10), t), sharp).rho;
  };
  const int grid = 241;
  Scalar best_t = log10_lo, best_v = rho_of(log10_lo);
  for (int i = 1; i < grid; ++i) {
    const Scalar t = log10_lo + (log10_hi - log10_lo) * Scalar(i) / Scalar(grid - 1);
    const Scalar v = rho_of(t);
    if (v < best_v) {
      best_v = v;
      best_t = t;
    }
  }
  const Scalar h = (log10_hi - log10_lo) / Scalar(grid - 1);
  Scalar a = std::max(log10_lo, best_t - h);
  Scalar b = std::min(log10_hi, best_t + h);
  const Scalar invphi = Scalar(0.5) * (std::sqrt(Scalar(5)) - Scalar(1));
  Scalar c = b - invphi * (b - a);
  Scalar d = a + invphi * (b - a);
  Scalar fc = rho_of(c), fd = rho_of(d);
  for (int it = 0; it < 120 && (b - a) > Scalar(1e-12); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = rho_of(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = rho_of(d);
    }
  }
  const Scalar t = (a + b) / Scalar(2);
  return {std::pow(Scalar(10), t), rho_of(t)};
}

/// Best applicable contraction guarantee for a problem, trying the A-side
/// and B-side bounds; absent when neither applies.
template <typename Scalar>
std::optional<RateReport<Scalar>> theoretical_rate(const ProblemSpec<Scalar>& problem,
                                                   const DRParams<Scalar>& params) {
  std::optional<RateReport<Scalar>> best;
  auto consider = [&](RateReport<Scalar> rep) {
    if (!rep.applicable()) return;
    if (!best || *rep.rho < *best->rho) best = std::move(rep);
  };
  if (problem.a().lipschitz()) {
    try {
      consider(rate_lipschitz_A(problem, params));
    } catch (const Error&) {
    }
  }
  if (problem.b().lipschitz() && problem.b().linear()) {
    try {
      consider(rate_lipschitz_B(problem, params));
    } catch (const Error&) {
    }
  }
  return best;
}

}  // namespace adr
