#pragma once

#include <optional>
#include <string>
#include <utility>

#include "adr/operators.hpp"

namespace adr {

/// Declarative inclusion problem: find x with 0 in A x + B x.
template <typename Scalar>
class ProblemSpec {
 public:
  using Vector = VectorX<Scalar>;

  ProblemSpec(OperatorHandle<Scalar> a, OperatorHandle<Scalar> b, std::string label = {},
              std::optional<Vector> known_solution = {})
      : a_(std::move(a)), b_(std::move(b)), label_(std::move(label)),
        known_solution_(std::move(known_solution)) {
    require(a_.dim() == b_.dim(), Errc::dimension_mismatch,
            "operators A and B must share the ambient dimension");
    if (known_solution_) {
      require(known_solution_->size() == a_.dim(), Errc::dimension_mismatch,
              "known_solution length does not match problem dimension");
      if (a_.supports_forward() && b_.supports_forward()) {
        const Scalar residual =
            (a_.forward(*known_solution_) + b_.forward(*known_solution_)).norm();
        require(residual <= Scalar(1e-8), Errc::invalid_problem,
                "known_solution violates 0 in Ax + Bx (residual " + std::to_string(residual) +
                    ")");
      }
    }
  }

  const OperatorHandle<Scalar>& a() const { return a_; }
  const OperatorHandle<Scalar>& b() const { return b_; }
  Eigen::Index dim() const { return a_.dim(); }
  const std::string& label() const { return label_; }
  const std::optional<Vector>& known_solution() const { return known_solution_; }

 private:
  OperatorHandle<Scalar> a_;
  OperatorHandle<Scalar> b_;
  std::string label_;
  std::optional<Vector> known_solution_;
};

}  // namespace adr
