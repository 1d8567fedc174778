#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "corrcoh/rng.hpp"
#include "corrcoh/state.hpp"

namespace corrcoh {

inline Matrix ginibre(int rows, int cols, Rng& rng) {
  Matrix g(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) g(r, c) = rng.complex_normal();
  return g;
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the R-diagonal phases removed.
inline Matrix haar_unitary(int d, Rng& rng) {
  const Matrix z = ginibre(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0.0) q.col(k) *= r(k, k) / mag;
  }
  return q;
}

inline Ket haar_ket(const Dims& dims, Rng& rng) {
  const int d = product(dims);
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = rng.complex_normal();
  return Ket::normalized(v, dims);
}

inline Ket haar_ket(const Dims& dims, std::uint64_t seed) {
  Rng rng(seed);
  return haar_ket(dims, rng);
}

/// rho = G G^dagger / Tr(G G^dagger) with G of shape d x rank (rank 0 means full).
inline DensityMatrix ginibre_mixed(const Dims& dims, Rng& rng, int rank = 0) {
  const int d = product(dims);
  const Matrix g = ginibre(d, rank > 0 ? rank : d, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint());
  return DensityMatrix(rho, dims);
}

inline DensityMatrix ginibre_mixed(const Dims& dims, std::uint64_t seed, int rank = 0) {
  Rng rng(seed);
  return ginibre_mixed(dims, rng, rank);
}

inline LocalBasisPair random_product_basis(int d_a, int d_b, Rng& rng) {
  Matrix ua = haar_unitary(d_a, rng);
  Matrix ub = haar_unitary(d_b, rng);
  return {Basis(ua), Basis(ub)};
}

inline LocalBasisPair random_product_basis(int d_a, int d_b, std::uint64_t seed) {
  Rng rng(seed);
  return random_product_basis(d_a, d_b, rng);
}

/// Uniform point on the probability simplex.
inline std::vector<double> random_simplex(std::size_t n, Rng& rng) {
  std::vector<double> w(n);
  double sum = 0.0;
  for (auto& x : w) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    x = -std::log(u);
    sum += x;
  }
  for (auto& x : w) x /= sum;
  return w;
}

struct SeparableSample {
  Ensemble decomposition;
  DensityMatrix state;
};

/// Mixture of `terms` random product pure states, returned with its decomposition.
inline SeparableSample random_separable(const Dims& dims, int terms, Rng& rng) {
  if (dims.size() != 2) throw ArgumentError("random_separable needs bipartite dims");
  Ensemble e;
  e.weights = random_simplex(static_cast<std::size_t>(terms), rng);
  for (int t = 0; t < terms; ++t) {
    const Ket a = haar_ket({dims[0]}, rng);
    const Ket b = haar_ket({dims[1]}, rng);
    e.states.emplace_back(kron(a.amplitudes(), b.amplitudes()), dims);
  }
  DensityMatrix rho = e.mixture();
  return {std::move(e), std::move(rho)};
}

inline SeparableSample random_separable(const Dims& dims, int terms, std::uint64_t seed) {
  Rng rng(seed);
  return random_separable(dims, terms, rng);
}

}  // namespace corrcoh
