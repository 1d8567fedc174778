#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace corrcoh {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kNegativeEigenvalue = 1e-10;
inline constexpr double kUnitary = 1e-10;
inline constexpr double kNorm = 1e-10;
/// Entries below this magnitude are skipped when fixing basis-vector phases.
inline constexpr double kPhaseZero = 1e-12;
/// Marginal eigenvalues below this are treated as an exact null space.
inline constexpr double kNullEigenvalue = 1e-12;
}  // namespace tol

namespace limits {
inline constexpr int kMaxFactorDim = 16;
inline constexpr int kMaxTotalDim = 256;
}  // namespace limits

inline Matrix kron(const Matrix& a, const Matrix& b) { return Eigen::kroneckerProduct(a, b).eval(); }
inline Vector kron(const Vector& a, const Vector& b) { return Eigen::kroneckerProduct(a, b).eval(); }

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double hermiticity_residual(const Matrix& m) { return max_abs(m - m.adjoint()); }

inline double unitarity_residual(const Matrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return max_abs(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols()));
}

inline bool is_unitary(const Matrix& u, double tol = tol::kUnitary) { return unitarity_residual(u) <= tol; }

/// Multiply each column by a phase so that its first non-negligible entry is real and nonnegative.
inline void apply_phase_convention(Matrix& columns) {
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    for (Eigen::Index r = 0; r < columns.rows(); ++r) {
      const double mag = std::abs(columns(r, c));
      if (mag > tol::kPhaseZero) {
        columns.col(c) *= std::conj(columns(r, c)) / mag;
        columns(r, c) = mag;
        break;
      }
    }
  }
}

struct EigenSystem {
  RealVector values;  // descending
  Matrix vectors;     // column k pairs with values[k]
};

/// Hermitian eigendecomposition, eigenvalues descending. Ties keep the solver's order;
/// eigenvectors follow the phase convention.
inline EigenSystem hermitian_eigen(const Matrix& h) {
  const Matrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  const Eigen::Index n = sym.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const RealVector& ev = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return ev(a) > ev(b); });
  EigenSystem out{RealVector(n), Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = ev(order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
  }
  apply_phase_convention(out.vectors);
  return out;
}

inline RealVector hermitian_eigenvalues(const Matrix& h) {
  const Matrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

/// Clip PSD drift: values in [-kNegativeEigenvalue, 0) become 0. Larger negatives are kept.
inline double clip_eigenvalue(double v) { return (v < 0.0 && v >= -tol::kNegativeEigenvalue) ? 0.0 : v; }

/// Shannon entropy in bits of a (clipped) spectrum, with 0 log 0 = 0.
inline double entropy_bits(const RealVector& spectrum) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    const double p = clip_eigenvalue(spectrum(i));
    if (p > 0.0) s -= p * std::log2(p);
  }
  return s;
}

/// exp(iH) for Hermitian H.
inline Matrix exp_i_hermitian(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (h + h.adjoint()));
  const RealVector& w = solver.eigenvalues();
  Vector phases(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) phases(i) = std::polar(1.0, w(i));
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

/// Extend orthonormal columns to a unitary; the given columns are kept verbatim.
inline Matrix complete_basis(const Matrix& columns) {
  const Eigen::Index d = columns.rows();
  const Eigen::Index r = columns.cols();
  Matrix full(d, d);
  if (r == d) return columns;
  Eigen::HouseholderQR<Matrix> qr(columns);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  full.leftCols(r) = columns;
  full.rightCols(d - r) = q.rightCols(d - r);
  return full;
}

/// Unitary V with V x_k = y_k for orthonormal column sets x, y of equal size.
inline Matrix unitary_mapping(const Matrix& from, const Matrix& to) {
  return complete_basis(to) * complete_basis(from).adjoint();
}

}  // namespace corrcoh
