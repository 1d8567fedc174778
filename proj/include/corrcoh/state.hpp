#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corrcoh/errors.hpp"
#include "corrcoh/linalg.hpp"

namespace corrcoh {

using Dims = std::vector<int>;
using Labels = std::vector<std::string>;

enum class Party { alice, bob };

/// Positional labels used when none are given: A/B for two factors, A/A'/B/B' for four.
inline Labels default_labels(std::size_t factors) {
  switch (factors) {
    case 1: return {"A"};
    case 2: return {"A", "B"};
    case 3: return {"A", "B", "B'"};
    case 4: return {"A", "A'", "B", "B'"};
    default: {
      Labels out;
      for (std::size_t i = 0; i < factors; ++i) out.push_back("F" + std::to_string(i));
      return out;
    }
  }
}

/// Alice owns every factor whose tag starts with 'A', Bob every factor starting with 'B'.
inline Party party_of(std::string_view label) {
  if (!label.empty() && label.front() == 'A') return Party::alice;
  if (!label.empty() && label.front() == 'B') return Party::bob;
  throw ArgumentError("label '" + std::string(label) + "' belongs to neither Alice (A...) nor Bob (B...)");
}

inline int product(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

namespace detail {

inline void check_dims(const Dims& dims, Eigen::Index total) {
  if (dims.empty()) throw ArgumentError("dims must be nonempty");
  long prod = 1;
  for (int d : dims) {
    if (d < 1) throw ArgumentError("subsystem dimensions must be positive");
    if (d > limits::kMaxFactorDim)
      throw SizeError("subsystem dimension " + std::to_string(d) + " exceeds " + std::to_string(limits::kMaxFactorDim));
    prod *= d;
    if (prod > limits::kMaxTotalDim)
      throw SizeError("total dimension exceeds " + std::to_string(limits::kMaxTotalDim));
  }
  if (prod != total)
    throw ValidationError("product of dims " + std::to_string(prod) + " does not match matrix dimension " +
                          std::to_string(total));
}

inline Labels check_labels(Labels labels, std::size_t factors) {
  if (labels.empty()) return default_labels(factors);
  if (labels.size() != factors) throw ArgumentError("one label per subsystem is required");
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i + 1; j < labels.size(); ++j)
      if (labels[i] == labels[j]) throw ArgumentError("duplicate subsystem label '" + labels[i] + "'");
  return labels;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Row-major strides: the first factor is the most significant index.
inline std::vector<int> strides(const Dims& dims) {
  std::vector<int> s(dims.size(), 1);
  for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k) s[k] = s[k + 1] * dims[k + 1];
  return s;
}

}  // namespace detail

/// Normalized pure state with subsystem structure.
class Ket {
 public:
  Ket(Vector amplitudes, Dims dims, Labels labels = {})
      : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)) {
    detail::check_dims(dims_, amplitudes_.size());
    labels_ = detail::check_labels(std::move(labels), dims_.size());
    const double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > tol::kNorm) throw ValidationError("ket norm " + detail::fmt(norm) + " differs from 1");
  }

  /// Normalizes a nonzero vector before construction.
  static Ket normalized(const Vector& v, Dims dims, Labels labels = {}) {
    const double n = v.norm();
    if (n == 0.0) throw ArgumentError("cannot normalize the zero vector");
    return Ket(v / n, std::move(dims), std::move(labels));
  }

  const Vector& amplitudes() const { return amplitudes_; }
  const Dims& dims() const { return dims_; }
  const Labels& labels() const { return labels_; }
  int dim() const { return static_cast<int>(amplitudes_.size()); }

  Matrix projector() const { return amplitudes_ * amplitudes_.adjoint(); }

 private:
  Vector amplitudes_;
  Dims dims_;
  Labels labels_;
};

/// Hermitian, PSD, unit-trace matrix with subsystem structure. Validated on construction.
class DensityMatrix {
 public:
  DensityMatrix(Matrix data, Dims dims, Labels labels = {}) : data_(std::move(data)), dims_(std::move(dims)) {
    if (data_.rows() != data_.cols()) throw ValidationError("density matrix must be square");
    detail::check_dims(dims_, data_.rows());
    labels_ = detail::check_labels(std::move(labels), dims_.size());
    const double herm = hermiticity_residual(data_);
    if (herm > tol::kHermitian) throw ValidationError("not Hermitian: max |rho - rho^dagger| = " + detail::fmt(herm));
    const double tr = data_.trace().real();
    if (std::abs(tr - 1.0) > tol::kTrace) throw ValidationError("trace " + detail::fmt(tr) + " differs from 1");
    const double lo = hermitian_eigenvalues(data_).minCoeff();
    if (lo < -tol::kNegativeEigenvalue) throw ValidationError("not PSD: min eigenvalue " + detail::fmt(lo));
  }

  explicit DensityMatrix(const Ket& psi) : DensityMatrix(psi.projector(), psi.dims(), psi.labels()) {}

  const Matrix& matrix() const { return data_; }
  const Dims& dims() const { return dims_; }
  const Labels& labels() const { return labels_; }
  int dim() const { return static_cast<int>(data_.rows()); }
  std::size_t factors() const { return dims_.size(); }

  int factor_index(std::string_view label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == label) return static_cast<int>(i);
    throw ArgumentError("unknown subsystem label '" + std::string(label) + "'");
  }

  double purity() const { return (data_ * data_).trace().real(); }

 private:
  Matrix data_;
  Dims dims_;
  Labels labels_;
};

/// Orthonormal basis; column k is the k-th basis vector.
class Basis {
 public:
  explicit Basis(Matrix vectors) : vectors_(std::move(vectors)) {
    const double res = unitarity_residual(vectors_);
    if (!(res <= tol::kUnitary)) throw ArgumentError("basis is not orthonormal (residual " + detail::fmt(res) + ")");
  }

  static Basis computational(int d) { return Basis(Matrix::Identity(d, d)); }

  const Matrix& matrix() const { return vectors_; }
  int dim() const { return static_cast<int>(vectors_.rows()); }

 private:
  Matrix vectors_;
};

/// Local bases for Alice and Bob defining the product reference basis.
struct LocalBasisPair {
  Basis alice;
  Basis bob;

  static LocalBasisPair computational(int d_a, int d_b) {
    return {Basis::computational(d_a), Basis::computational(d_b)};
  }

  Basis product() const { return Basis(kron(alice.matrix(), bob.matrix())); }
};

/// psi = sum_k sqrt(coefficients[k]) basis_a.col(k) (x) basis_b.col(k).
/// Coefficients are descending and have min(d_A, d_B) entries; trailing columns of each
/// basis complete it to a full orthonormal basis of that factor.
struct SchmidtForm {
  RealVector coefficients;
  Matrix basis_a;
  Matrix basis_b;

  int rank(double cutoff = 1e-12) const {
    return static_cast<int>((coefficients.array() > cutoff).count());
  }

  Vector reconstruct() const {
    Vector out = Vector::Zero(basis_a.rows() * basis_b.rows());
    for (Eigen::Index k = 0; k < coefficients.size(); ++k)
      out += std::sqrt(std::max(coefficients(k), 0.0)) * kron(Vector(basis_a.col(k)), Vector(basis_b.col(k)));
    return out;
  }

  LocalBasisPair bases() const { return {Basis(basis_a), Basis(basis_b)}; }
};

/// Probability-weighted pure states sharing one subsystem structure.
struct Ensemble {
  std::vector<double> weights;
  std::vector<Ket> states;

  void validate() const {
    if (weights.size() != states.size() || states.empty())
      throw ArgumentError("ensemble needs one weight per state and at least one state");
    double sum = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw ValidationError("ensemble weights must be nonnegative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-10) throw ValidationError("ensemble weights sum to " + detail::fmt(sum));
    for (const Ket& k : states)
      if (k.dims() != states.front().dims()) throw ArgumentError("ensemble members must share dims");
  }

  Matrix mixture_matrix() const {
    Matrix m = Matrix::Zero(states.front().dim(), states.front().dim());
    for (std::size_t i = 0; i < states.size(); ++i) m += weights[i] * states[i].projector();
    return m;
  }

  DensityMatrix mixture() const {
    validate();
    return DensityMatrix(mixture_matrix(), states.front().dims(), states.front().labels());
  }
};

// ---------------------------------------------------------------------------
// Structural operations

/// Reorder subsystems: factor k of the result is factor order[k] of the input.
inline Matrix permute_factors(const Matrix& m, const Dims& dims, const std::vector<int>& order) {
  const std::size_t n = dims.size();
  Dims new_dims(n);
  for (std::size_t k = 0; k < n; ++k) new_dims[k] = dims[static_cast<std::size_t>(order[k])];
  const auto old_strides = detail::strides(dims);
  const auto new_strides = detail::strides(new_dims);
  const int total = static_cast<int>(m.rows());
  // map[new_index] = old_index
  std::vector<int> map(static_cast<std::size_t>(total));
  for (int idx = 0; idx < total; ++idx) {
    int old_idx = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const int digit = (idx / new_strides[k]) % new_dims[k];
      old_idx += digit * old_strides[static_cast<std::size_t>(order[k])];
    }
    map[static_cast<std::size_t>(idx)] = old_idx;
  }
  Matrix out(total, total);
  for (int c = 0; c < total; ++c)
    for (int r = 0; r < total; ++r) out(r, c) = m(map[static_cast<std::size_t>(r)], map[static_cast<std::size_t>(c)]);
  return out;
}

/// Trace out every factor whose index is not in `keep` (indices ascending).
inline Matrix partial_trace_matrix(const Matrix& m, const Dims& dims, const std::vector<int>& keep) {
  const std::size_t n = dims.size();
  std::vector<bool> kept(n, false);
  for (int k : keep) kept[static_cast<std::size_t>(k)] = true;
  Dims kept_dims;
  for (std::size_t k = 0; k < n; ++k)
    if (kept[k]) kept_dims.push_back(dims[k]);
  const auto st = detail::strides(dims);
  const auto kst = detail::strides(kept_dims);
  const int total = static_cast<int>(m.rows());
  std::vector<int> kept_index(static_cast<std::size_t>(total)), traced_index(static_cast<std::size_t>(total));
  for (int idx = 0; idx < total; ++idx) {
    int ki = 0, ti = 0, pos = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const int digit = (idx / st[k]) % dims[k];
      if (kept[k]) {
        ki += digit * kst[static_cast<std::size_t>(pos++)];
      } else {
        ti = ti * dims[k] + digit;
      }
    }
    kept_index[static_cast<std::size_t>(idx)] = ki;
    traced_index[static_cast<std::size_t>(idx)] = ti;
  }
  const int kd = product(kept_dims);
  Matrix out = Matrix::Zero(kd, kd);
  for (int c = 0; c < total; ++c)
    for (int r = 0; r < total; ++r)
      if (traced_index[static_cast<std::size_t>(r)] == traced_index[static_cast<std::size_t>(c)])
        out(kept_index[static_cast<std::size_t>(r)], kept_index[static_cast<std::size_t>(c)]) += m(r, c);
  return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep) {
  if (keep.empty()) throw ArgumentError("partial_trace needs at least one subsystem to keep");
  std::vector<int> idx;
  for (const auto& tag : keep) idx.push_back(rho.factor_index(tag));
  std::sort(idx.begin(), idx.end());
  if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) throw ArgumentError("duplicate tag in keep list");
  Dims d;
  Labels l;
  for (int k : idx) {
    d.push_back(rho.dims()[static_cast<std::size_t>(k)]);
    l.push_back(rho.labels()[static_cast<std::size_t>(k)]);
  }
  return DensityMatrix(partial_trace_matrix(rho.matrix(), rho.dims(), idx), d, l);
}

/// Label collisions are resolved by priming the later tag (A, B, A', B').
inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  if (static_cast<long>(a.dim()) * b.dim() > limits::kMaxTotalDim)
    throw SizeError("tensor product exceeds total dimension " + std::to_string(limits::kMaxTotalDim));
  Labels labels = a.labels();
  for (std::string tag : b.labels()) {
    while (std::find(labels.begin(), labels.end(), tag) != labels.end()) tag += "'";
    labels.push_back(tag);
  }
  return DensityMatrix(kron(a.matrix(), b.matrix()), dims, labels);
}

/// The state regrouped as Alice's factors (in order) then Bob's, flattened to two parties.
struct BipartiteView {
  Matrix matrix;
  int dim_a = 1;
  int dim_b = 1;
};

inline BipartiteView bipartite_view(const Matrix& m, const Dims& dims, const Labels& labels) {
  std::vector<int> order;
  BipartiteView v;
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (party_of(labels[k]) == Party::alice) {
      order.push_back(static_cast<int>(k));
      v.dim_a *= dims[k];
    }
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (party_of(labels[k]) == Party::bob) {
      order.push_back(static_cast<int>(k));
      v.dim_b *= dims[k];
    }
  bool identity = true;
  for (std::size_t k = 0; k < order.size(); ++k) identity = identity && order[k] == static_cast<int>(k);
  v.matrix = identity ? m : permute_factors(m, dims, order);
  return v;
}

inline BipartiteView bipartite_view(const DensityMatrix& rho) {
  return bipartite_view(rho.matrix(), rho.dims(), rho.labels());
}

/// Reduced states of a two-party view.
inline Matrix marginal_a(const BipartiteView& v) { return partial_trace_matrix(v.matrix, {v.dim_a, v.dim_b}, {0}); }
inline Matrix marginal_b(const BipartiteView& v) { return partial_trace_matrix(v.matrix, {v.dim_a, v.dim_b}, {1}); }

inline SchmidtForm schmidt_decompose(const Ket& psi) {
  if (psi.dims().size() != 2) throw ArgumentError("schmidt_decompose needs a bipartite ket");
  const int da = psi.dims()[0];
  const int db = psi.dims()[1];
  Matrix coeff(da, db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < db; ++j) coeff(i, j) = psi.amplitudes()(i * db + j);
  Eigen::JacobiSVD<Matrix> svd(coeff, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();  // descending
  SchmidtForm out;
  out.coefficients = s.array().square();
  out.coefficients /= out.coefficients.sum();
  out.basis_a = svd.matrixU();
  out.basis_b = svd.matrixV().conjugate();
  // Phase convention on Alice's vectors; Bob's paired vectors absorb the inverse phase.
  for (Eigen::Index k = 0; k < out.basis_a.cols(); ++k) {
    for (Eigen::Index r = 0; r < out.basis_a.rows(); ++r) {
      const double mag = std::abs(out.basis_a(r, k));
      if (mag > tol::kPhaseZero) {
        const Complex phase = std::conj(out.basis_a(r, k)) / mag;
        out.basis_a.col(k) *= phase;
        if (k < out.basis_b.cols()) out.basis_b.col(k) /= phase;
        break;
      }
    }
  }
  // Unpaired completion vectors of the larger factor carry no amplitude; fix their phases freely.
  if (out.basis_b.cols() > s.size()) {
    Matrix tail = out.basis_b.rightCols(out.basis_b.cols() - s.size());
    apply_phase_convention(tail);
    out.basis_b.rightCols(tail.cols()) = tail;
  }
  return out;
}

/// Completely dephase in the given basis.
inline Matrix dephase_matrix(const Matrix& m, const Matrix& basis) {
  const Matrix in_basis = basis.adjoint() * m * basis;
  return basis * in_basis.diagonal().asDiagonal() * basis.adjoint();
}

inline DensityMatrix dephase(const DensityMatrix& rho, const Basis& basis) {
  if (basis.dim() != rho.dim()) throw ArgumentError("basis dimension does not match state");
  return DensityMatrix(dephase_matrix(rho.matrix(), basis.matrix()), rho.dims(), rho.labels());
}

inline DensityMatrix dephase(const DensityMatrix& rho, const LocalBasisPair& bases) {
  if (rho.factors() != 2 || bases.alice.dim() != rho.dims()[0] || bases.bob.dim() != rho.dims()[1])
    throw ArgumentError("local bases do not match the bipartite dims");
  return dephase(rho, bases.product());
}

inline DensityMatrix apply_local_unitary(const DensityMatrix& rho, const Matrix& u_a, const Matrix& u_b) {
  if (rho.factors() != 2) throw ArgumentError("apply_local_unitary needs a bipartite state");
  if (u_a.rows() != rho.dims()[0] || u_b.rows() != rho.dims()[1])
    throw ArgumentError("local unitary dimensions do not match the state");
  if (!is_unitary(u_a) || !is_unitary(u_b)) throw ArgumentError("local operator is not unitary");
  const Matrix u = kron(u_a, u_b);
  return DensityMatrix(u * rho.matrix() * u.adjoint(), rho.dims(), rho.labels());
}

inline Ket apply_local_unitary(const Ket& psi, const Matrix& u_a, const Matrix& u_b) {
  if (psi.dims().size() != 2) throw ArgumentError("apply_local_unitary needs a bipartite ket");
  if (u_a.rows() != psi.dims()[0] || u_b.rows() != psi.dims()[1])
    throw ArgumentError("local unitary dimensions do not match the state");
  if (!is_unitary(u_a) || !is_unitary(u_b)) throw ArgumentError("local operator is not unitary");
  return Ket::normalized(kron(u_a, u_b) * psi.amplitudes(), psi.dims(), psi.labels());
}

/// Exchange the contents of two equal-dimension factors; labels stay positional.
inline DensityMatrix apply_swap(const DensityMatrix& rho, const std::string& tag_x, const std::string& tag_y) {
  const int x = rho.factor_index(tag_x);
  const int y = rho.factor_index(tag_y);
  if (rho.dims()[static_cast<std::size_t>(x)] != rho.dims()[static_cast<std::size_t>(y)])
    throw ArgumentError("swapped subsystems must have equal dimension");
  std::vector<int> order(rho.factors());
  std::iota(order.begin(), order.end(), 0);
  std::swap(order[static_cast<std::size_t>(x)], order[static_cast<std::size_t>(y)]);
  return DensityMatrix(permute_factors(rho.matrix(), rho.dims(), order), rho.dims(), rho.labels());
}

/// Swap of the two halves of an equal-dimension bipartite matrix.
inline Matrix swap_halves(const Matrix& m, int d) { return permute_factors(m, {d, d}, {1, 0}); }

// ---------------------------------------------------------------------------
// Purity helpers

inline bool is_pure(const DensityMatrix& rho, double tol = 1e-9) { return std::abs(rho.purity() - 1.0) <= tol; }

/// Dominant eigenvector as a ket; meaningful when the state is pure.
inline Ket to_ket(const DensityMatrix& rho) {
  const EigenSystem es = hermitian_eigen(rho.matrix());
  return Ket::normalized(es.vectors.col(0), rho.dims(), rho.labels());
}

}  // namespace corrcoh
