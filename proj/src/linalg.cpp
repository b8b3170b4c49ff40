#include "bcolab/linalg.hpp"

#include "bcolab/error.hpp"

#include <cmath>

namespace bcolab {

Matrix orthonormal_complement(const Vector& x) {
  const double norm = x.norm();
  require(norm > 0.0, Errc::ZeroDirection, "direction must be nonzero");
  const auto d = x.size();
  Eigen::HouseholderQR<Matrix> qr(Matrix(x / norm));
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  return q.rightCols(d - 1);
}

Vector project(const Vector& x, const Vector& y) {
  const double norm = x.norm();
  require(norm > 0.0, Errc::ZeroDirection, "projection direction must be nonzero");
  const Vector u = x / norm;
  return y - y.dot(u) * u;
}

Matrix spd_power(const Matrix& m, double exponent) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  const Vector vals = eig.eigenvalues().array().max(0.0).pow(exponent);
  return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

Matrix polar_spd_factor(const Matrix& t) {
  Matrix p = spd_power(t.transpose() * t, 0.5);
  return 0.5 * (p + p.transpose());
}

Matrix normalize_det(const Matrix& t) {
  const double det = t.determinant();
  require(det > 0.0, Errc::InvalidArgument, "matrix must have positive determinant");
  return t / std::pow(det, 1.0 / static_cast<double>(t.rows()));
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::NoIntersection: return "NoIntersection";
    case Errc::Unbounded: return "Unbounded";
    case Errc::ZeroDirection: return "ZeroDirection";
    case Errc::XInsideBody: return "XInsideBody";
    case Errc::RejectionFailure: return "RejectionFailure";
    case Errc::DegenerateFacet: return "DegenerateFacet";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::EpsTooSmall: return "EpsTooSmall";
    case Errc::BisectionFailure: return "BisectionFailure";
    case Errc::WindowMiss: return "WindowMiss";
    case Errc::MassMismatch: return "MassMismatch";
    case Errc::MissingMinValue: return "MissingMinValue";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::CoverTooLarge: return "CoverTooLarge";
    case Errc::EmptyInset: return "EmptyInset";
    case Errc::EmptyPosterior: return "EmptyPosterior";
    case Errc::ZeroInformation: return "ZeroInformation";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::VersionMismatch: return "VersionMismatch";
  }
  return "Unknown";
}

}  // namespace bcolab
