#pragma once

#include "bcolab/linalg.hpp"

#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace bcolab {

/// An evaluable convex function on R^d. Convexity holds by construction: the
/// only forms are PSD quadratics, maxima of affine maps and nonnegative
/// combinations of those. Values are immutable and cheap to copy.
///
/// Besides the evaluator the function carries the constants the bandit
/// reduction works with: a Lipschitz bound n, a strong-convexity modulus m and,
/// when known, its minimizer and minimum value over the action body.
class ConvexFunction {
 public:
  enum class Form { Quadratic, MaxAffine, Sum };

  /// x^T a x + b^T x + c. `a` is symmetrized and must be PSD.
  static ConvexFunction quadratic(Matrix a, Vector b, double c);
  /// scale * |x - center|^2 + offset.
  static ConvexFunction isotropic_quadratic(const Vector& center, double scale, double offset);
  /// max_i (slopes.row(i) x + offsets(i)).
  static ConvexFunction max_affine(Matrix slopes, Vector offsets);
  /// constant + sum_i w_i f_i with w_i >= 0.
  static ConvexFunction sum(std::vector<std::pair<double, ConvexFunction>> terms,
                            double constant = 0.0);

  double operator()(const Vector& x) const;
  Vector subgradient(const Vector& x) const;

  Eigen::Index dim() const;
  Form form() const;

  double lipschitz() const { return lipschitz_; }
  double strong_convexity() const { return strong_convexity_; }
  const std::optional<Vector>& minimizer() const { return minimizer_; }
  const std::optional<double>& min_value() const { return min_value_; }

  ConvexFunction with_lipschitz(double n) const;
  ConvexFunction with_strong_convexity(double m) const;
  ConvexFunction with_minimum(Vector x, double value) const;

  /// The quadratic x^T a x + b^T x + c equal to this function, when the
  /// function is a quadratic or a nonnegative combination of quadratics.
  struct QuadraticParts {
    Matrix a;
    Vector b;
    double c = 0.0;
  };
  std::optional<QuadraticParts> as_quadratic() const;

  /// Secant lower curvature of the underlying form (2 lambda_min(a) for
  /// quadratics, 0 for max-affine, weighted sums combine linearly).
  double structural_modulus() const;

 private:
  struct Node;
  explicit ConvexFunction(std::shared_ptr<const Node> node);

  std::shared_ptr<const Node> node_;
  double lipschitz_ = std::numeric_limits<double>::infinity();
  double strong_convexity_ = 0.0;
  std::optional<Vector> minimizer_;
  std::optional<double> min_value_;
};

}  // namespace bcolab
