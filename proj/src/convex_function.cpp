#include "bcolab/convex_function.hpp"

#include "bcolab/error.hpp"

#include <variant>

namespace bcolab {

namespace {

struct QuadraticForm {
  Matrix a;
  Vector b;
  double c;
};

struct MaxAffineForm {
  Matrix slopes;
  Vector offsets;
};

struct SumForm {
  std::vector<std::pair<double, ConvexFunction>> terms;
  double constant;
};

}  // namespace

struct ConvexFunction::Node {
  std::variant<QuadraticForm, MaxAffineForm, SumForm> form;
  Eigen::Index dim;
};

ConvexFunction::ConvexFunction(std::shared_ptr<const Node> node) : node_(std::move(node)) {
  strong_convexity_ = structural_modulus();
}

ConvexFunction ConvexFunction::quadratic(Matrix a, Vector b, double c) {
  require(a.rows() == a.cols() && a.rows() == b.size(), Errc::InvalidArgument,
          "quadratic: dimension mismatch");
  Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  require(eig.eigenvalues().minCoeff() >= -1e-12, Errc::InvalidArgument,
          "quadratic: matrix must be positive semidefinite");
  const auto d = b.size();
  return ConvexFunction(std::make_shared<const Node>(
      Node{QuadraticForm{std::move(sym), std::move(b), c}, d}));
}

ConvexFunction ConvexFunction::isotropic_quadratic(const Vector& center, double scale,
                                                   double offset) {
  const auto d = center.size();
  return quadratic(scale * Matrix::Identity(d, d), -2.0 * scale * center,
                   scale * center.squaredNorm() + offset);
}

ConvexFunction ConvexFunction::max_affine(Matrix slopes, Vector offsets) {
  require(slopes.rows() == offsets.size() && slopes.rows() > 0, Errc::InvalidArgument,
          "max_affine: need one offset per slope row");
  const auto d = slopes.cols();
  return ConvexFunction(std::make_shared<const Node>(
      Node{MaxAffineForm{std::move(slopes), std::move(offsets)}, d}));
}

ConvexFunction ConvexFunction::sum(std::vector<std::pair<double, ConvexFunction>> terms,
                                   double constant) {
  require(!terms.empty(), Errc::InvalidArgument, "sum: no terms");
  const auto d = terms.front().second.dim();
  for (const auto& [w, f] : terms) {
    require(w >= 0.0, Errc::InvalidArgument, "sum: weights must be nonnegative");
    require(f.dim() == d, Errc::InvalidArgument, "sum: dimension mismatch");
  }
  return ConvexFunction(
      std::make_shared<const Node>(Node{SumForm{std::move(terms), constant}, d}));
}

double ConvexFunction::operator()(const Vector& x) const {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, QuadraticForm>) {
          return x.dot(f.a * x) + f.b.dot(x) + f.c;
        } else if constexpr (std::is_same_v<T, MaxAffineForm>) {
          return (f.slopes * x + f.offsets).maxCoeff();
        } else {
          double v = f.constant;
          for (const auto& [w, g] : f.terms) v += w * g(x);
          return v;
        }
      },
      node_->form);
}

Vector ConvexFunction::subgradient(const Vector& x) const {
  return std::visit(
      [&](const auto& f) -> Vector {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, QuadraticForm>) {
          return 2.0 * f.a * x + f.b;
        } else if constexpr (std::is_same_v<T, MaxAffineForm>) {
          Eigen::Index best = 0;
          (f.slopes * x + f.offsets).maxCoeff(&best);
          return f.slopes.row(best).transpose();
        } else {
          Vector g = Vector::Zero(node_->dim);
          for (const auto& [w, h] : f.terms) g += w * h.subgradient(x);
          return g;
        }
      },
      node_->form);
}

Eigen::Index ConvexFunction::dim() const { return node_->dim; }

ConvexFunction::Form ConvexFunction::form() const {
  switch (node_->form.index()) {
    case 0: return Form::Quadratic;
    case 1: return Form::MaxAffine;
    default: return Form::Sum;
  }
}

ConvexFunction ConvexFunction::with_lipschitz(double n) const {
  ConvexFunction f = *this;
  f.lipschitz_ = n;
  return f;
}

ConvexFunction ConvexFunction::with_strong_convexity(double m) const {
  require(m >= 0.0, Errc::InvalidArgument, "strong convexity modulus must be >= 0");
  ConvexFunction f = *this;
  f.strong_convexity_ = m;
  return f;
}

ConvexFunction ConvexFunction::with_minimum(Vector x, double value) const {
  require(x.size() == dim(), Errc::InvalidArgument, "minimizer dimension mismatch");
  ConvexFunction f = *this;
  f.minimizer_ = std::move(x);
  f.min_value_ = value;
  return f;
}

std::optional<ConvexFunction::QuadraticParts> ConvexFunction::as_quadratic() const {
  return std::visit(
      [&](const auto& f) -> std::optional<QuadraticParts> {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, QuadraticForm>) {
          return QuadraticParts{f.a, f.b, f.c};
        } else if constexpr (std::is_same_v<T, MaxAffineForm>) {
          return std::nullopt;
        } else {
          const auto d = node_->dim;
          QuadraticParts acc{Matrix::Zero(d, d), Vector::Zero(d), f.constant};
          for (const auto& [w, g] : f.terms) {
            auto q = g.as_quadratic();
            if (!q) return std::nullopt;
            acc.a += w * q->a;
            acc.b += w * q->b;
            acc.c += w * q->c;
          }
          return acc;
        }
      },
      node_->form);
}

double ConvexFunction::structural_modulus() const {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, QuadraticForm>) {
          Eigen::SelfAdjointEigenSolver<Matrix> eig(f.a, Eigen::EigenvaluesOnly);
          return std::max(0.0, 2.0 * eig.eigenvalues().minCoeff());
        } else if constexpr (std::is_same_v<T, MaxAffineForm>) {
          return 0.0;
        } else {
          double m = 0.0;
          for (const auto& [w, g] : f.terms) m += w * g.structural_modulus();
          return m;
        }
      },
      node_->form);
}

}  // namespace bcolab
