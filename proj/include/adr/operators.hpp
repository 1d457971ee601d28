#pragma once

#include <Eigen/Dense>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "adr/errors.hpp"
#include "adr/random.hpp"

namespace adr {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

enum class OperatorKind {
  scaled_identity,
  linear_matrix,
  skew_plus_alpha,
  prox_quadratic,
  prox_l1,
  prox_box_indicator,
  prox_shifted,
};

inline const char* kind_name(OperatorKind k) {
  switch (k) {
    case OperatorKind::scaled_identity: return "scaled_identity";
    case OperatorKind::linear_matrix: return "linear_matrix";
    case OperatorKind::skew_plus_alpha: return "skew_plus_alpha";
    case OperatorKind::prox_quadratic: return "prox_quadratic";
    case OperatorKind::prox_l1: return "prox_l1";
    case OperatorKind::prox_box_indicator: return "prox_box_indicator";
    case OperatorKind::prox_shifted: return "prox_shifted";
  }
  return "unknown";
}

inline std::optional<OperatorKind> kind_from_name(std::string_view name) {
  for (OperatorKind k :
       {OperatorKind::scaled_identity, OperatorKind::linear_matrix,
        OperatorKind::skew_plus_alpha, OperatorKind::prox_quadratic, OperatorKind::prox_l1,
        OperatorKind::prox_box_indicator, OperatorKind::prox_shifted}) {
    if (name == kind_name(k)) return k;
  }
  return std::nullopt;
}

/// Immutable handle for an operator on R^n with its monotonicity metadata.
///
/// Each built-in kind has a closed-form resolvent (see ResolventEvaluator).
/// The monotonicity constant alpha is structural where possible
/// (scaled_identity, skew_plus_alpha, prox_l1, prox_box_indicator) and is
/// otherwise computed at construction from the payload: for matrix kinds it
/// is the smallest eigenvalue of the symmetric part, so the metadata cannot
/// drift from the data. Lipschitz constants are attached for the
/// single-valued kinds, with |alpha| <= lipschitz always.
template <typename Scalar>
class OperatorHandle {
 public:
  using Vector = VectorX<Scalar>;
  using Matrix = MatrixX<Scalar>;

  // -- factories ------------------------------------------------------------

  /// A = alpha * Id.
  static OperatorHandle make_scaled_identity(Eigen::Index dim, Scalar alpha) {
    require(dim > 0, Errc::invalid_constants, "dimension must be positive");
    OperatorHandle h(OperatorKind::scaled_identity, dim);
    h.alpha_ = alpha;
    h.lipschitz_ = std::abs(alpha);
    return h;
  }

  /// A x = M x. The monotonicity constant is the smallest eigenvalue of the
  /// symmetric part and the Lipschitz constant is the largest singular value.
  static OperatorHandle make_linear_matrix(Matrix m) {
    check_square(m);
    OperatorHandle h(OperatorKind::linear_matrix, m.rows());
    Matrix sym = (m + m.transpose()) / Scalar(2);
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    h.alpha_ = es.eigenvalues()(0);
    h.lipschitz_ = spectral_norm(m);
    h.m_ = std::move(m);
    return h;
  }

  /// Same as make_linear_matrix but with a caller-declared alpha. The value is
  /// trusted verbatim; verify_monotonicity exists to catch misdeclarations.
  static OperatorHandle make_linear_matrix(Matrix m, Scalar declared_alpha) {
    OperatorHandle h = make_linear_matrix(std::move(m));
    h.alpha_ = declared_alpha;
    return h;
  }

  /// A = S + alpha * Id with S^T = -S (checked to 1e-12 absolute). Operators
  /// of this form satisfy the monotonicity inequality with equality, which
  /// unlocks the sharper resolvent coefficient branch.
  static OperatorHandle make_skew_plus_alpha(Matrix skew, Scalar alpha) {
    check_square(skew);
    const double asym = (skew + skew.transpose()).template lpNorm<Eigen::Infinity>();
    require(asym <= 1e-12, Errc::invalid_constants,
            "skew payload is not antisymmetric (max |S + S^T| = " + std::to_string(asym) + ")");
    OperatorHandle h(OperatorKind::skew_plus_alpha, skew.rows());
    h.alpha_ = alpha;
    const Scalar sigma = spectral_norm(skew);
    h.lipschitz_ = std::sqrt(alpha * alpha + sigma * sigma);
    h.m_ = std::move(skew);
    return h;
  }

  /// Subdifferential of f(x) = x^T Q x / 2 + b^T x with Q symmetric;
  /// alpha = lambda_min(Q), lipschitz = max |eigenvalue of Q|.
  static OperatorHandle make_prox_quadratic(Matrix q, Vector b) {
    check_square(q);
    require((q - q.transpose()).template lpNorm<Eigen::Infinity>() <= 1e-12,
            Errc::invalid_constants, "quadratic payload must be symmetric");
    require(b.size() == q.rows(), Errc::dimension_mismatch,
            "offset length does not match quadratic form");
    OperatorHandle h(OperatorKind::prox_quadratic, q.rows());
    Eigen::SelfAdjointEigenSolver<Matrix> es(q, Eigen::EigenvaluesOnly);
    h.alpha_ = es.eigenvalues()(0);
    h.lipschitz_ = std::max(std::abs(es.eigenvalues()(0)),
                            std::abs(es.eigenvalues()(q.rows() - 1)));
    h.m_ = std::move(q);
    h.v_ = std::move(b);
    return h;
  }

  static OperatorHandle make_prox_quadratic(Matrix q) {
    Vector b = Vector::Zero(q.rows());
    return make_prox_quadratic(std::move(q), std::move(b));
  }

  static OperatorHandle make_prox_quadratic(Matrix q, Vector b, Scalar declared_alpha) {
    OperatorHandle h = make_prox_quadratic(std::move(q), std::move(b));
    h.alpha_ = declared_alpha;
    return h;
  }

  /// Subdifferential of f(x) = sum_i w_i |x_i|, w_i >= 0. Convex (alpha = 0),
  /// set-valued at kinks, so no forward evaluation and no Lipschitz constant.
  static OperatorHandle make_prox_l1(Vector weights) {
    require(weights.size() > 0, Errc::invalid_constants, "dimension must be positive");
    require((weights.array() >= Scalar(0)).all(), Errc::invalid_constants,
            "l1 weights must be nonnegative");
    OperatorHandle h(OperatorKind::prox_l1, weights.size());
    h.alpha_ = Scalar(0);
    h.v_ = std::move(weights);
    return h;
  }

  static OperatorHandle make_prox_l1(Eigen::Index dim, Scalar weight) {
    return make_prox_l1(Vector::Constant(dim, weight));
  }

  /// Subdifferential of the indicator of the box [lower, upper].
  static OperatorHandle make_prox_box(Vector lower, Vector upper) {
    require(lower.size() == upper.size(), Errc::dimension_mismatch,
            "box bounds must have equal length");
    require(lower.size() > 0, Errc::invalid_constants, "dimension must be positive");
    require((lower.array() <= upper.array()).all(), Errc::invalid_constants,
            "box is empty (lower > upper)");
    OperatorHandle h(OperatorKind::prox_box_indicator, lower.size());
    h.alpha_ = Scalar(0);
    h.v_ = std::move(lower);
    h.v2_ = std::move(upper);
    return h;
  }

  /// Subdifferential of f + (shift/2) ||.||^2 for a prox-capable base f.
  /// This is how weakly convex test functions (shift < 0) are built.
  static OperatorHandle make_prox_shifted(OperatorHandle base, Scalar shift) {
    require(base.prox_family(), Errc::not_prox_family,
            "prox_shifted base must be a prox-capable kind");
    OperatorHandle h(OperatorKind::prox_shifted, base.dim());
    h.alpha_ = base.alpha() + shift;
    if (base.lipschitz()) h.lipschitz_ = *base.lipschitz() + std::abs(shift);
    h.shift_ = shift;
    h.base_ = std::make_shared<const OperatorHandle>(std::move(base));
    return h;
  }

  // -- metadata ---------------------------------------------------------------

  Eigen::Index dim() const { return dim_; }
  OperatorKind kind() const { return kind_; }
  Scalar alpha() const { return alpha_; }
  const std::optional<Scalar>& lipschitz() const { return lipschitz_; }
  /// All built-ins are maximally alpha-monotone (continuous with full domain,
  /// or subdifferentials of lower semicontinuous alpha-convex functions).
  bool maximal() const { return true; }

  bool supports_forward() const {
    switch (kind_) {
      case OperatorKind::prox_l1:
      case OperatorKind::prox_box_indicator:
        return false;
      case OperatorKind::prox_shifted:
        return base_->supports_forward();
      default:
        return true;
    }
  }

  /// Forward map is affine: A x = M x + b.
  bool affine() const {
    switch (kind_) {
      case OperatorKind::scaled_identity:
      case OperatorKind::linear_matrix:
      case OperatorKind::skew_plus_alpha:
      case OperatorKind::prox_quadratic:
        return true;
      case OperatorKind::prox_shifted:
        return base_->affine();
      default:
        return false;
    }
  }

  /// Truly linear (affine with zero offset); the B-side linear-rate bound
  /// requires this of the second operator.
  bool linear() const { return affine() && affine_offset().isZero(Scalar(0)); }

  /// A function value is available (the operator is a subdifferential of an
  /// explicitly known f).
  bool prox_family() const {
    switch (kind_) {
      case OperatorKind::prox_quadratic:
      case OperatorKind::prox_l1:
      case OperatorKind::prox_box_indicator:
        return true;
      case OperatorKind::prox_shifted:
        return true;
      default:
        return false;
    }
  }

  // -- evaluation -------------------------------------------------------------

  Vector forward(const Vector& x) const {
    check_dim(x);
    switch (kind_) {
      case OperatorKind::scaled_identity:
        return alpha_ * x;
      case OperatorKind::linear_matrix:
        return m_ * x;
      case OperatorKind::skew_plus_alpha:
        return m_ * x + alpha_ * x;
      case OperatorKind::prox_quadratic:
        return m_ * x + v_;
      case OperatorKind::prox_shifted:
        return base_->forward(x) + shift_ * x;
      default:
        raise(Errc::unsupported_forward,
              std::string(kind_name(kind_)) + " has a set-valued subdifferential; "
              "use the resolvent instead");
    }
  }

  /// f(x) for prox-family kinds; +inf outside the box indicator's domain.
  Scalar function_value(const Vector& x) const {
    check_dim(x);
    switch (kind_) {
      case OperatorKind::prox_quadratic:
        return Scalar(0.5) * x.dot(m_ * x) + v_.dot(x);
      case OperatorKind::prox_l1:
        return v_.dot(x.cwiseAbs());
      case OperatorKind::prox_box_indicator: {
        const Scalar slack = 1e-12;
        if ((x.array() >= v_.array() - slack).all() &&
            (x.array() <= v2_.array() + slack).all())
          return Scalar(0);
        return std::numeric_limits<Scalar>::infinity();
      }
      case OperatorKind::prox_shifted:
        return base_->function_value(x) + shift_ / Scalar(2) * x.squaredNorm();
      default:
        raise(Errc::not_prox_family,
              std::string(kind_name(kind_)) + " has no associated function value");
    }
  }

  /// Linear part of the forward map (affine kinds only).
  Matrix dense_matrix() const {
    switch (kind_) {
      case OperatorKind::scaled_identity:
        return alpha_ * Matrix::Identity(dim_, dim_);
      case OperatorKind::linear_matrix:
        return m_;
      case OperatorKind::skew_plus_alpha:
        return m_ + alpha_ * Matrix::Identity(dim_, dim_);
      case OperatorKind::prox_quadratic:
        return m_;
      case OperatorKind::prox_shifted:
        require(base_->affine(), Errc::unsupported_forward, "operator is not affine");
        return base_->dense_matrix() + shift_ * Matrix::Identity(dim_, dim_);
      default:
        raise(Errc::unsupported_forward, "operator is not affine");
    }
  }

  /// Offset of the forward map (affine kinds only).
  Vector affine_offset() const {
    switch (kind_) {
      case OperatorKind::scaled_identity:
      case OperatorKind::linear_matrix:
      case OperatorKind::skew_plus_alpha:
        return Vector::Zero(dim_);
      case OperatorKind::prox_quadratic:
        return v_;
      case OperatorKind::prox_shifted:
        require(base_->affine(), Errc::unsupported_forward, "operator is not affine");
        return base_->affine_offset();
      default:
        raise(Errc::unsupported_forward, "operator is not affine");
    }
  }

  // -- payload access (for evaluators and serialization) ----------------------

  const Matrix& payload_matrix() const { return m_; }
  const Vector& payload_vector() const { return v_; }
  const Vector& payload_vector2() const { return v2_; }
  Scalar shift() const { return shift_; }
  const OperatorHandle& base() const { return *base_; }

 private:
  OperatorHandle(OperatorKind kind, Eigen::Index dim) : kind_(kind), dim_(dim) {}

  static void check_square(const Matrix& m) {
    require(m.rows() > 0, Errc::invalid_constants, "dimension must be positive");
    require(m.rows() == m.cols(), Errc::dimension_mismatch, "matrix payload must be square");
  }

  void check_dim(const Vector& x) const {
    require(x.size() == dim_, Errc::dimension_mismatch,
            "vector length " + std::to_string(x.size()) + " does not match operator dimension " +
                std::to_string(dim_));
  }

  static Scalar spectral_norm(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
  }

  OperatorKind kind_;
  Eigen::Index dim_;
  Scalar alpha_{};
  std::optional<Scalar> lipschitz_;
  Matrix m_;
  Vector v_, v2_;
  Scalar shift_{};
  std::shared_ptr<const OperatorHandle> base_;
};

template <typename Scalar>
VectorX<Scalar> forward_eval(const OperatorHandle<Scalar>& op, const VectorX<Scalar>& x) {
  return op.forward(x);
}

/// Handle of op + c * Id. The payload is shifted so the resolvent stays in
/// closed form; alpha becomes alpha + c and any Lipschitz constant stays
/// within the conservative bound lipschitz + |c|.
template <typename Scalar>
OperatorHandle<Scalar> shift_operator(const OperatorHandle<Scalar>& op, Scalar c) {
  using Handle = OperatorHandle<Scalar>;
  using Matrix = MatrixX<Scalar>;
  switch (op.kind()) {
    case OperatorKind::scaled_identity:
      return Handle::make_scaled_identity(op.dim(), op.alpha() + c);
    case OperatorKind::linear_matrix:
      return Handle::make_linear_matrix(
          Matrix(op.payload_matrix() + c * Matrix::Identity(op.dim(), op.dim())));
    case OperatorKind::skew_plus_alpha:
      return Handle::make_skew_plus_alpha(op.payload_matrix(), op.alpha() + c);
    case OperatorKind::prox_quadratic:
      return Handle::make_prox_quadratic(
          Matrix(op.payload_matrix() + c * Matrix::Identity(op.dim(), op.dim())),
          op.payload_vector());
    case OperatorKind::prox_l1:
    case OperatorKind::prox_box_indicator:
      return Handle::make_prox_shifted(op, c);
    case OperatorKind::prox_shifted:
      return Handle::make_prox_shifted(op.base(), op.shift() + c);
  }
  raise(Errc::invalid_argument, "unknown operator kind");
}

template <typename Scalar>
struct MonotonicityReport {
  bool passed = false;
  /// min over samples of (<x-y, Ax-Ay> - alpha ||x-y||^2) / ||x-y||^2.
  Scalar worst_margin = std::numeric_limits<Scalar>::infinity();
  int samples = 0;
  Scalar declared_alpha{};
};

/// Monte-Carlo check of the declared monotonicity constant: over seeded
/// standard-normal pairs, <x-y, Ax-Ay> >= alpha ||x-y||^2 - 1e-10 ||x-y||^2.
template <typename Scalar>
MonotonicityReport<Scalar> verify_monotonicity(const OperatorHandle<Scalar>& op, int samples,
                                               std::uint64_t seed) {
  require(samples >= 1, Errc::invalid_argument, "samples must be >= 1");
  require(op.supports_forward(), Errc::unsupported_forward,
          "monotonicity check needs forward evaluation");
  MonotonicityReport<Scalar> report;
  report.samples = samples;
  report.declared_alpha = op.alpha();
  CounterRng rng(seed, 101);
  for (int i = 0; i < samples; ++i) {
    VectorX<Scalar> x = rng.normal_vector<Scalar>(op.dim());
    VectorX<Scalar> y = rng.normal_vector<Scalar>(op.dim());
    const Scalar dist2 = (x - y).squaredNorm();
    if (dist2 <= Scalar(0)) continue;
    const Scalar inner = (x - y).dot(op.forward(x) - op.forward(y));
    report.worst_margin = std::min(report.worst_margin, (inner - op.alpha() * dist2) / dist2);
  }
  report.passed = report.worst_margin >= Scalar(-1e-10);
  return report;
}

}  // namespace adr
