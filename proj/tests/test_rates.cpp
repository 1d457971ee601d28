#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "adr/oracle.hpp"
#include "adr/rates.hpp"
#include "testing_oracles.hpp"

using adr::CounterRng;
using adr::Errc;
using adr::Error;
using Handle = adr::OperatorHandle<double>;
using Params = adr::DRParams<double>;
using Problem = adr::ProblemSpec<double>;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("select_params recovers classical DR for two monotone operators") {
  auto p = adr::select_params(0.0, 0.0);
  CHECK(p.gamma == 1.0);
  CHECK(p.mu == 2.0);
  CHECK(p.lambda == 2.0);
  CHECK(p.delta == 1.0);
  CHECK(p.mode == adr::DRMode::classical);
}

TEST_CASE("select_params picks the admissible-interval midpoint") {
  auto p = adr::select_params(1.0, -0.5, 1.0);
  // Interval [2 + 1, 2 + 2] = [3, 4], midpoint 3.5.
  CHECK(p.mu == doctest::Approx(3.5));
  CHECK(p.lambda == doctest::Approx(1.4));
  CHECK(p.delta == doctest::Approx(0.4));
  CHECK(adr::params_feasible(p, 1.0, -0.5));
}

TEST_CASE("select_params clamps the interval for weakly monotone A") {
  auto p = adr::select_params(-1.0, 2.0);
  CHECK(p.gamma == doctest::Approx(0.25));
  // Interval [1, 1.5] clamped to [1 + 1e-6, 1.5].
  CHECK(p.mu == doctest::Approx(1.25).epsilon(1e-5));
  CHECK(p.lambda == doctest::Approx(5.0).epsilon(1e-4));
  CHECK(p.delta == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(p.mu > 1.0 + 1e-6 - 1e-12);
  CHECK(adr::params_feasible(p, -1.0, 2.0));
}

TEST_CASE("select_params rejects infeasible data") {
  try {
    adr::select_params(1.0, -2.0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::infeasible_parameters);
  }
  // gamma hint violating 1 + 2 gamma alpha > 0.
  CHECK_THROWS_AS(adr::select_params(-1.0, 2.0, 1.0), Error);
  CHECK_THROWS_AS(adr::select_params(0.0, 0.0, {}, 1.0), Error);
  // A hint so close to the singular-valuedness boundary that the clamped
  // interval for mu becomes empty.
  CHECK_THROWS_AS(adr::select_params(-1.0, 2.0, 0.49999997), Error);
}

TEST_CASE("select_params under- and over-reflects for a strong/weak pair") {
  // Strongly monotone A paired with matching weakly monotone B: the interval
  // degenerates to mu = 2 + 2*gamma*alpha > 2, hence lambda < 2.
  const double alpha = 0.75;
  auto p = adr::select_params(alpha, -alpha, 1.0);
  CHECK(p.mu == doctest::Approx(2.0 + 2.0 * alpha));
  CHECK(p.mu > 2.0);
  CHECK(p.lambda < 2.0);
  CHECK(adr::params_feasible(p, alpha, -alpha));
}

TEST_CASE("the two equivalent constraint formulations agree") {
  auto p = adr::select_params(1.0, -0.5, 1.0);
  CHECK(adr::check_params_symmetric(p, 1.0, -0.5));
  CHECK(adr::check_params_symmetric(adr::select_params(0.0, 0.0), 0.0, 0.0));

  Params perturbed = p;
  perturbed.delta *= 1.1;
  CHECK(!adr::params_feasible(perturbed, 1.0, -0.5));
  CHECK(!adr::check_params_symmetric(perturbed, 1.0, -0.5));

  CounterRng rng(2);
  for (int i = 0; i < 500; ++i) {
    const double alpha = 3.0 * rng.normal();
    const double beta = std::abs(3.0 * rng.normal()) - alpha >= 0.0
                            ? std::abs(3.0 * rng.normal()) - alpha
                            : -alpha;
    if (alpha + beta < 0.0) continue;
    auto params = adr::select_params(alpha, beta);
    CHECK(adr::params_feasible(params, alpha, beta));
    CHECK(adr::check_params_symmetric(params, alpha, beta));
  }
}

TEST_CASE("classical convergence condition") {
  CHECK(adr::classical_condition(0.0, 0.0, 1.0, 0.5));
  CHECK(adr::classical_condition(0.0, 0.0, 17.0, 0.99));
  CHECK(!adr::classical_condition(1.0, -0.5, 1.0, 0.5));  // 1 - 1 = 0 < 1/2
  CHECK(adr::classical_condition(1.0, -0.25, 1.0, 0.5));  // 2/3 > 1/2
  CHECK(!adr::classical_condition(-1.0, 0.5, 1.0, 0.5));  // alpha + beta < 0
}

TEST_CASE("A-side rate reduces to the classical strongly-monotone formula") {
  auto rep = adr::rate_lipschitz_A(1.0, 0.0, 1.0, Params::classical(1.0), false);
  REQUIRE(rep.applicable());
  CHECK(rep.epsilon == 0.0);
  CHECK(rep.epsilon_aux == 0.0);
  CHECK(rep.phi == 0.0);
  CHECK(*rep.rho == doctest::Approx(0.5).epsilon(1e-15));

  auto gis = adr::rate_classical_gis(1.0, 1.0, 1.0, 0.5);
  CHECK(*gis.rho == doctest::Approx(*rep.rho).epsilon(1e-15));

  // Same reduction at other constants.
  for (double alpha : {0.25, 0.5, 2.0}) {
    for (double ell : {2.0, 3.0}) {
      for (double gamma : {0.5, 1.0}) {
        auto a = adr::rate_lipschitz_A(alpha, 0.0, ell, Params::classical(gamma), false);
        auto g = adr::rate_classical_gis(alpha, ell, gamma, 0.5);
        REQUIRE(a.applicable());
        CHECK(*a.rho == doctest::Approx(*g.rho).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("mu at the lower endpoint forces epsilon = phi = 0 exactly") {
  const double alpha = 1.0, beta = -0.25, gamma = 1.0;
  const double mu = 2.0 - 2.0 * gamma * beta;  // 2.5
  auto params = Params::adaptive(gamma, mu, 0.5);
  auto rep = adr::rate_lipschitz_A(alpha, beta, 1.5, params, false);
  REQUIRE(rep.applicable());
  CHECK(rep.epsilon == 0.0);
  CHECK(rep.epsilon_aux == 0.0);
  CHECK(rep.phi == 0.0);
  // With the first radical equal to one the rate is (1-k) + k * sqrt(...).
  const double denom = 1.0 + 2.0 * gamma * alpha + gamma * gamma * 1.5 * 1.5;
  const double expected =
      0.5 + 0.5 * std::sqrt(1.0 - mu * (2.0 + 2.0 * gamma * alpha - mu) / denom);
  CHECK(*rep.rho == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("A-side rate bounds the empirical contraction factor") {
  CounterRng rng(44);
  MatrixXd s = testing_oracles::random_skew(rng, 3);
  s *= std::sqrt(3.0) / Eigen::JacobiSVD<MatrixXd>(s).singularValues()(0);
  auto a = Handle::make_skew_plus_alpha(s, 1.0);  // ell = sqrt(1 + 3) = 2
  CHECK(*a.lipschitz() == doctest::Approx(2.0).epsilon(1e-12));
  auto b = Handle::make_prox_shifted(Handle::make_prox_l1(3, 0.4), -0.5);
  Problem problem(a, b, "rateA");
  auto params = adr::select_params(1.0, -0.5);
  auto rep = adr::rate_lipschitz_A(problem, params);
  REQUIRE(rep.applicable());
  CHECK(*rep.rho > 0.0);
  CHECK(*rep.rho < 1.0);
  const double empirical = adr::estimate_contraction(problem, params, 2000, 7);
  CHECK(empirical <= *rep.rho * (1.0 + 1e-9));
}

TEST_CASE("A-side rate clause for a merely Lipschitz A") {
  // alpha + beta <= 0 but beta > ell: alpha is replaced by -ell.
  auto params = adr::select_params(-0.5, 2.0);
  auto rep = adr::rate_lipschitz_A(0.0, 2.0, 0.5, params, false);
  REQUIRE(rep.applicable());
  CHECK(*rep.rho < 1.0);

  CHECK_THROWS_AS(adr::rate_lipschitz_A(0.0, 0.25, 0.5, params, false), Error);
}

TEST_CASE("B-side rate mirrors the A-side under the role exchange") {
  auto repB = adr::rate_lipschitz_B(0.0, 1.0, 1.0, Params::classical(1.0));
  REQUIRE(repB.applicable());
  CHECK(*repB.rho == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(repB.note.find("epsilon") != std::string::npos);

  // Mirror instances agree: swapping (alpha, gamma, lambda) with
  // (beta, delta, mu) maps one bound onto the other.
  const double alpha = 0.3, beta = 0.9, ell = 1.7;
  auto params = adr::select_params(beta, alpha, 0.8);
  Params swapped;
  swapped.gamma = params.delta;
  swapped.delta = params.gamma;
  swapped.lambda = params.mu;
  swapped.mu = params.lambda;
  swapped.kappa = params.kappa;
  swapped.mode = adr::DRMode::adaptive;
  auto a_form = adr::rate_lipschitz_A(beta, alpha, ell, params, false);
  auto b_form = adr::rate_lipschitz_B(alpha, beta, ell, swapped);
  REQUIRE(a_form.applicable());
  REQUIRE(b_form.applicable());
  CHECK(*a_form.rho == doctest::Approx(*b_form.rho).epsilon(1e-12));
}

TEST_CASE("B-side rate with a strongly monotone A and merely Lipschitz B") {
  // ell < alpha: beta is replaced by -ell.
  auto params = adr::select_params(2.0, -0.5);
  auto rep = adr::rate_lipschitz_B(2.0, 0.0, 1.0, params);
  REQUIRE(rep.applicable());
  CHECK(*rep.rho < 1.0);
}

TEST_CASE("the problem-aware B-side rate requires a linear operator") {
  CounterRng rng(3);
  MatrixXd s = testing_oracles::random_skew(rng, 2);
  auto a = Handle::make_scaled_identity(2, 2.0);
  auto affine_b = Handle::make_prox_quadratic(MatrixXd::Identity(2, 2), VectorXd::Ones(2));
  Problem problem(a, affine_b);
  try {
    adr::rate_lipschitz_B(problem, adr::select_params(2.0, 1.0));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::requires_linear_b);
  }

  auto linear_b = Handle::make_skew_plus_alpha(s, 1.0);
  Problem fine(a, linear_b);
  CHECK(adr::rate_lipschitz_B(fine, adr::select_params(2.0, 1.0)).applicable());

  // The empirical factor respects the B-side bound.
  auto params = adr::select_params(2.0, 1.0);
  auto rep = adr::rate_lipschitz_B(fine, params);
  const double empirical = adr::estimate_contraction(fine, params, 2000, 13);
  CHECK(empirical <= *rep.rho * (1.0 + 1e-9));
}

TEST_CASE("classical DR rate values") {
  auto rep = adr::rate_classical_dr(1.0, 1.0, 1.0, false);
  CHECK(*rep.rho == doctest::Approx((std::sqrt(5.0) + 1.0) / 4.0).epsilon(1e-15));
  auto sharp = adr::rate_classical_dr(1.0, 1.0, 1.0, true);
  CHECK(*sharp.rho == doctest::Approx(*rep.rho).epsilon(1e-15));  // coincide at ell = 1
  auto smooth = adr::rate_classical_dr(1.0, 0.0, 1.0, false);
  CHECK(*smooth.rho == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(adr::rate_classical_dr(0.0, 1.0, 1.0, false), Error);
  CHECK_THROWS_AS(adr::rate_classical_dr(-1.0, 1.0, 1.0, false), Error);
}

TEST_CASE("sharp classical rate never exceeds the general one") {
  for (double beta : {0.1, 0.5, 1.0, 3.0}) {
    for (double ell : {0.0, 0.4, 1.0, 2.5}) {
      for (double gamma : {0.25, 1.0, 2.0}) {
        auto general = adr::rate_classical_dr(beta, ell, gamma, false);
        auto sharp = adr::rate_classical_dr(beta, ell, gamma, true);
        CHECK(*sharp.rho <= *general.rho + 1e-15);
        CHECK(*general.rho < 1.0);
      }
    }
  }
}

TEST_CASE("comparison rate and strict improvement") {
  CHECK(adr::rate_mv18(1.0, 1.0) == doctest::Approx((std::sqrt(6.0) + 1.0) / 4.0).epsilon(1e-15));
  CHECK_THROWS_AS(adr::rate_mv18(0.0, 1.0), Error);

  for (double beta : {0.1, 1.0, 2.0, 5.0}) {
    for (double ell : {0.05, 0.5, 1.0, 4.0}) {
      const double rho = *adr::rate_classical_dr(beta, ell, 1.0, false).rho;
      const double r = adr::rate_mv18(beta, ell);
      CHECK(rho < r);
    }
  }
}

TEST_CASE("coefficient inequality chain") {
  // 1/(1+gl)^2 <= min{1/((1+ga)(1+gl)), 1/(1+2ga+g^2l^2)} = alpha_J
  //            <= equality-class value.
  for (double alpha : {-0.4, 0.0, 0.7, 1.5}) {
    for (double factor : {1.0, 1.3, 2.5}) {
      const double ell = std::abs(alpha) * factor + 0.1;
      for (double gamma : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        if (1.0 + gamma * alpha <= 0.0) continue;
        const double general = adr::compute_alpha_J(alpha, ell, gamma, false);
        const double equality = adr::compute_alpha_J(alpha, ell, gamma, true);
        const double lo = 1.0 / ((1.0 + gamma * ell) * (1.0 + gamma * ell));
        const double branch_a = 1.0 / ((1.0 + gamma * alpha) * (1.0 + gamma * ell));
        const double branch_b = 1.0 / (1.0 + 2.0 * gamma * alpha + gamma * gamma * ell * ell);
        CHECK(lo <= std::min(branch_a, branch_b) + 1e-15);
        CHECK(general == doctest::Approx(std::min(branch_a, branch_b)).epsilon(1e-13));
        CHECK(general <= equality + 1e-15);
      }
    }
  }
}

TEST_CASE("pointwise minimum comparison behind the strict rate improvement") {
  for (double e = -3.0; e <= 3.0; e += 0.125) {
    const double ell = std::pow(10.0, e);
    const double lhs = std::min(2.0 / (1.0 + ell), 2.0 / (1.0 + ell * ell));
    const double rhs = 1.0 / ((1.0 + ell) * (1.0 + ell)) + 1.0 / (1.0 + ell * ell);
    CHECK(lhs > rhs);
  }
}

TEST_CASE("heuristic gamma search improves on the default") {
  for (double beta : {0.3, 1.0}) {
    for (double ell : {0.5, 2.0}) {
      auto best = adr::best_gamma_classical_dr(beta, ell);
      CHECK(best.rho <= *adr::rate_classical_dr(beta, ell, 1.0, false).rho + 1e-12);
      CHECK(best.rho == doctest::Approx(*adr::rate_classical_dr(beta, ell, best.gamma, false).rho)
                            .epsilon(1e-12));
    }
  }
}

TEST_CASE("theoretical_rate picks an applicable bound") {
  CounterRng rng(21);
  MatrixXd s = testing_oracles::random_skew(rng, 2);
  Problem problem(Handle::make_skew_plus_alpha(s, 1.0), Handle::make_prox_l1(2, 0.5));
  auto params = adr::select_params(1.0, 0.0);
  auto rate = adr::theoretical_rate(problem, params);
  REQUIRE(rate.has_value());
  CHECK(rate->variant == adr::RateVariant::lip_a);

  Problem no_rate(Handle::make_prox_l1(2, 0.5),
                  Handle::make_prox_box(VectorXd::Constant(2, -1.0), VectorXd::Ones(2)));
  CHECK(!adr::theoretical_rate(no_rate, adr::select_params(0.0, 0.0)).has_value());
}

TEST_CASE("rate reports carry feasibility margins") {
  auto rep = adr::rate_lipschitz_A(1.0, -0.5, 2.0, adr::select_params(1.0, -0.5), false);
  REQUIRE(rep.applicable());
  CHECK(!rep.feasibility.empty());
  for (const auto& c : rep.feasibility) CHECK(c.ok);

  try {
    adr::rate_lipschitz_A(1.0, -0.5, 2.0, Params::adaptive(1.0, 10.0), false);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::infeasible_parameters);
  }
}
