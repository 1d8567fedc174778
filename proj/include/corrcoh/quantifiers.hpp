#pragma once

#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "corrcoh/coherence.hpp"
#include "corrcoh/correlated.hpp"
#include "corrcoh/sampling.hpp"
#include "corrcoh/simplex.hpp"
#include "corrcoh/state.hpp"

namespace corrcoh {

enum class BoundKind { exact, upper_bound };

inline const char* to_string(BoundKind k) { return k == BoundKind::exact ? "exact" : "upper_bound"; }

/// An extended state together with an admissible basis pair for its party split
/// (AA':BB' for symmetric extensions, A:BB' for Bob-side extensions).
struct ExtensionCandidate {
  DensityMatrix state;
  /// (d_A', d_B'); d_A' = 1 for Bob-side-only extensions.
  std::pair<int, int> ancilla_dims;
  /// Max-entry swap residual AA' <-> BB' after the alignment unitary; empty for Bob-side extensions.
  std::optional<double> symmetry_residual;
  /// Max-entry distance between the traced-out extension and the state it extends.
  double marginal_residual = 0.0;
  /// Party carrying the alignment unitary ("A"), empty when no alignment applies.
  std::string alignment_side;
  LocalBasisPair witness;
};

struct BoundDiagnostics {
  int restarts = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<int, int>> ancilla_dims_tried;
  /// Candidate family that attained the reported value.
  std::string source;
  int candidates = 0;
  bool converged = true;
};

struct BoundReport {
  double value = 0.0;
  BoundKind kind = BoundKind::upper_bound;
  std::variant<std::monostate, SchmidtForm, ExtensionCandidate, Ensemble> witness;
  BoundDiagnostics diagnostics;
};

// ---------------------------------------------------------------------------
// Pure states

namespace detail {

inline Ket require_pure(const DensityMatrix& rho, const char* who) {
  if (rho.factors() != 2) throw ArgumentError(std::string(who) + " needs a bipartite state");
  if (!is_pure(rho, 1e-10))
    throw ArgumentError(std::string(who) + " needs a pure state (purity " + fmt(rho.purity()) +
                        "); use the mixed-state upper bound instead");
  return to_ket(rho);
}

/// Coherence of a pure state written in its own Schmidt basis: the amplitudes are sqrt(lambda_k)
/// at the diagonal positions (k, k).
inline double schmidt_basis_coherence(const CoherenceMeasure& measure, const RealVector& lambdas, int d_a, int d_b) {
  Vector phi = Vector::Zero(d_a * d_b);
  for (Eigen::Index k = 0; k < lambdas.size(); ++k) phi(k * d_b + k) = std::sqrt(std::max(lambdas(k), 0.0));
  return measure.in_reference_basis(phi * phi.adjoint());
}

/// Schmidt coefficients of an unnormalized coefficient vector, normalized to sum 1.
inline RealVector schmidt_spectrum(const Vector& v, int d_a, int d_b) {
  const Matrix c = Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      v.data(), d_a, d_b);
  Eigen::JacobiSVD<Matrix> svd(c);
  RealVector s = svd.singularValues().array().square();
  const double total = s.sum();
  if (total > 0.0) s /= total;
  return s;
}

inline int gcd(int a, int b) { return b == 0 ? a : gcd(b, a % b); }
inline int lcm(int a, int b) { return a / gcd(a, b) * b; }

}  // namespace detail

/// E_C of a pure state: the measure evaluated in the Schmidt product basis.
inline BoundReport e_pure(const CoherenceMeasure& measure, const Ket& psi) {
  if (psi.dims().size() != 2) throw ArgumentError("e_pure needs a bipartite ket");
  SchmidtForm sf = schmidt_decompose(psi);
  const Matrix p = kron(sf.basis_a, sf.basis_b);
  BoundReport r;
  r.value = measure.in_reference_basis(p.adjoint() * psi.projector() * p);
  r.kind = BoundKind::exact;
  r.diagnostics.source = "schmidt";
  r.diagnostics.candidates = 1;
  r.witness = std::move(sf);
  return r;
}

inline BoundReport e_pure(const CoherenceMeasure& measure, const DensityMatrix& rho) {
  return e_pure(measure, detail::require_pure(rho, "e_pure"));
}

/// sum_{i != j} sqrt(lambda_i lambda_j).
inline double e_l1_pure_closed_form(const SchmidtForm& sf) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < sf.coefficients.size(); ++i)
    for (Eigen::Index j = 0; j < sf.coefficients.size(); ++j)
      if (i != j) s += std::sqrt(std::max(sf.coefficients(i), 0.0) * std::max(sf.coefficients(j), 0.0));
  return s;
}

/// S(Tr_B |psi><psi|) in bits.
inline double entropy_of_entanglement(const Ket& psi) {
  if (psi.dims().size() != 2) throw ArgumentError("entropy_of_entanglement needs a bipartite ket");
  return von_neumann_entropy(partial_trace_matrix(psi.projector(), psi.dims(), {0}));
}

// ---------------------------------------------------------------------------
// Oracles

/// Positive-partial-transpose test; exact separability criterion for 2x2 and 2x3.
inline double ppt_min_eigenvalue(const DensityMatrix& rho) {
  if (rho.factors() != 2) throw ArgumentError("partial transpose needs a bipartite state");
  const int da = rho.dims()[0], db = rho.dims()[1];
  Matrix pt(rho.dim(), rho.dim());
  for (int a = 0; a < da; ++a)
    for (int b = 0; b < db; ++b)
      for (int a2 = 0; a2 < da; ++a2)
        for (int b2 = 0; b2 < db; ++b2) pt(a * db + b, a2 * db + b2) = rho.matrix()(a * db + b2, a2 * db + b);
  return hermitian_eigenvalues(pt).minCoeff();
}

inline bool is_separable_ppt(const DensityMatrix& rho) {
  const Dims& d = rho.dims();
  const bool supported = d.size() == 2 && ((d[0] == 2 && d[1] == 2) || (d[0] == 2 && d[1] == 3) || (d[0] == 3 && d[1] == 2));
  if (!supported) throw ArgumentError("PPT separability is exact only for 2x2 and 2x3 systems");
  return ppt_min_eigenvalue(rho) >= -tol::kNegativeEigenvalue;
}

/// Wootters concurrence. With rho = X X^dagger the spin-flip eigenvalues are the singular values
/// of X^T (sy x sy) X, which avoids square roots of noise-level eigenvalues. Eigenvalues of rho
/// below 1e-14 are dropped as numerical rank deficiency.
inline double concurrence_2q(const DensityMatrix& rho) {
  if (rho.dims() != Dims{2, 2}) throw ArgumentError("concurrence_2q needs a two-qubit state");
  const EigenSystem es = hermitian_eigen(rho.matrix());
  int rank = 0;
  while (rank < 4 && es.values(rank) > 1e-14) ++rank;
  Matrix x(4, rank);
  for (int k = 0; k < rank; ++k) x.col(k) = std::sqrt(es.values(k)) * es.vectors.col(k);
  Matrix yy = Matrix::Zero(4, 4);
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const Matrix tau = x.transpose() * yy * x;
  Eigen::JacobiSVD<Matrix> svd(tau);
  RealVector s = RealVector::Zero(4);
  s.head(svd.singularValues().size()) = svd.singularValues();
  return std::max(0.0, s(0) - s(1) - s(2) - s(3));
}

inline double concurrence_2q(const Ket& psi) { return concurrence_2q(DensityMatrix(psi)); }

// ---------------------------------------------------------------------------
// Extensions

namespace detail {

inline Vector basis_vector(int d, int k) {
  Vector e = Vector::Zero(d);
  e(k) = 1.0;
  return e;
}

inline std::pair<int, int> symmetric_ancilla_dims(int d_a, int d_b, int flags) {
  const int l = lcm(d_a, d_b);
  return {flags * (l / d_a), flags * (l / d_b)};
}

inline bool fits(int d_a, int d_b, std::pair<int, int> anc) {
  const int fa = d_a * anc.first, fb = d_b * anc.second;
  return anc.first <= limits::kMaxFactorDim && anc.second <= limits::kMaxFactorDim &&
         static_cast<long>(fa) * fb <= limits::kMaxTotalDim;
}

}  // namespace detail

/// Symmetric extension built from a pure-state decomposition rho = sum_k p_k |psi_k><psi_k|:
///   sigma = sum_k p_k |psi_k><psi_k|_{AB} (x) |k><k|_{A'} (x) |k><k|_{B'}
/// (with zero padding of A', B' when d_A != d_B so that d_A d_A' = d_B d_B'). A controlled unitary
/// on AA' mapping each branch's Alice Schmidt vectors onto Bob's makes sigma swap-invariant.
/// The witness basis is the flagged Schmidt basis, in which the correlated coherence is
/// sum_k p_k E_C(psi_k) for l1 and relative entropy.
inline ExtensionCandidate extension_from_pure_ensemble(const Ensemble& e) {
  e.validate();
  const Dims& dims = e.states.front().dims();
  if (dims.size() != 2) throw ArgumentError("extension needs a bipartite ensemble");
  const int da = dims[0], db = dims[1];
  const int flags = static_cast<int>(e.states.size());
  const auto anc = detail::symmetric_ancilla_dims(da, db, flags);
  if (!detail::fits(da, db, anc))
    throw SizeError("extension with " + std::to_string(flags) + " flags exceeds the dimension limits");
  const int pad_a = anc.first / flags, pad_b = anc.second / flags;
  const int dim_alice = da * anc.first, dim_bob = db * anc.second;  // equal
  const int r = std::min(da, db);

  Matrix sigma = Matrix::Zero(dim_alice * dim_bob, dim_alice * dim_bob);
  Matrix alice_vectors(dim_alice, flags * da), bob_vectors(dim_bob, flags * db);
  Matrix from(dim_alice, flags * r), to(dim_bob, flags * r);
  for (int k = 0; k < flags; ++k) {
    const Ket& psi = e.states[static_cast<std::size_t>(k)];
    const SchmidtForm sf = schmidt_decompose(psi);
    const Vector flag_a = detail::basis_vector(anc.first, k * pad_a);
    const Vector flag_b = detail::basis_vector(anc.second, k * pad_b);
    Vector big = Vector::Zero(dim_alice * dim_bob);
    for (int i = 0; i < r; ++i) {
      const Vector ua = kron(Vector(sf.basis_a.col(i)), flag_a);
      const Vector wb = kron(Vector(sf.basis_b.col(i)), flag_b);
      big += std::sqrt(std::max(sf.coefficients(i), 0.0)) * kron(ua, wb);
      from.col(k * r + i) = ua;
      to.col(k * r + i) = wb;
    }
    sigma += e.weights[static_cast<std::size_t>(k)] * big * big.adjoint();
    for (int i = 0; i < da; ++i) alice_vectors.col(k * da + i) = kron(Vector(sf.basis_a.col(i)), flag_a);
    for (int j = 0; j < db; ++j) bob_vectors.col(k * db + j) = kron(Vector(sf.basis_b.col(j)), flag_b);
  }
  const Matrix align = kron(unitary_mapping(from, to), Matrix::Identity(dim_bob, dim_bob));
  const Matrix aligned = align * sigma * align.adjoint();
  const double sym = max_abs(swap_halves(aligned, dim_alice) - aligned);

  DensityMatrix state(sigma, {da, anc.first, db, anc.second}, {"A", "A'", "B", "B'"});
  const double marg = max_abs(partial_trace_matrix(sigma, state.dims(), {0, 2}) - e.mixture_matrix());
  return {std::move(state), anc, sym, marg, "A",
          LocalBasisPair{Basis(complete_basis(alice_vectors)), Basis(complete_basis(bob_vectors))}};
}

/// Extension sum_i p_i |a_i><a_i| (x) |i><i| (x) |b_i><b_i| (x) |i><i| of a separable state.
inline ExtensionCandidate extension_from_separable_decomposition(const Ensemble& e) {
  e.validate();
  for (const Ket& k : e.states) {
    if (k.dims().size() != 2) throw ArgumentError("decomposition members must be bipartite");
    if (schmidt_decompose(k).coefficients(0) < 1.0 - 1e-10)
      throw ArgumentError("decomposition member is not a product state");
  }
  return extension_from_pure_ensemble(e);
}

namespace detail {

/// Groups Alice vectors of product members into an orthonormal basis; empty if two members'
/// Alice vectors are neither parallel nor orthogonal.
inline std::optional<std::pair<Matrix, std::vector<int>>> cq_alice_basis(const Ensemble& e, double tolerance = 1e-8) {
  std::vector<Vector> distinct;
  std::vector<int> assignment;
  for (const Ket& k : e.states) {
    const SchmidtForm sf = schmidt_decompose(k);
    if (sf.coefficients(0) < 1.0 - 1e-10) return std::nullopt;
    const Vector a = sf.basis_a.col(0);
    int found = -1;
    for (std::size_t j = 0; j < distinct.size(); ++j) {
      const double ov = std::abs(distinct[j].dot(a));
      if (ov > 1.0 - tolerance) {
        found = static_cast<int>(j);
        break;
      }
      if (ov > tolerance) return std::nullopt;
    }
    if (found < 0) {
      found = static_cast<int>(distinct.size());
      distinct.push_back(a);
    }
    assignment.push_back(found);
  }
  Matrix cols(distinct.front().size(), static_cast<Eigen::Index>(distinct.size()));
  for (std::size_t j = 0; j < distinct.size(); ++j) cols.col(static_cast<Eigen::Index>(j)) = distinct[j];
  return std::make_pair(complete_basis(cols), assignment);
}

}  // namespace detail

/// Bob-side extension sum_k p_k |a_k><a_k| (x) |b_k><b_k| (x) |k><k|_{B'} of a classical-quantum
/// decomposition (Alice vectors pairwise parallel or orthogonal). Its correlated coherence
/// vanishes in the returned witness basis.
inline ExtensionCandidate discord_extension_from_cq_decomposition(const Ensemble& e) {
  e.validate();
  const Dims& dims = e.states.front().dims();
  if (dims.size() != 2) throw ArgumentError("extension needs a bipartite ensemble");
  const auto alice = detail::cq_alice_basis(e);
  if (!alice) throw ArgumentError("decomposition is not classical-quantum");
  const int da = dims[0], db = dims[1];
  const int flags = static_cast<int>(e.states.size());
  if (flags > limits::kMaxFactorDim || static_cast<long>(da) * db * flags > limits::kMaxTotalDim)
    throw SizeError("Bob-side extension exceeds the dimension limits");
  Matrix sigma = Matrix::Zero(da * db * flags, da * db * flags);
  Matrix bob_vectors(db * flags, db * flags);
  for (int k = 0; k < flags; ++k) {
    const SchmidtForm sf = schmidt_decompose(e.states[static_cast<std::size_t>(k)]);
    const Vector flag = detail::basis_vector(flags, k);
    const Vector v = kron(Vector(alice->first.col(alice->second[static_cast<std::size_t>(k)])),
                          kron(Vector(sf.basis_b.col(0)), flag));
    sigma += e.weights[static_cast<std::size_t>(k)] * v * v.adjoint();
    for (int j = 0; j < db; ++j) bob_vectors.col(k * db + j) = kron(Vector(sf.basis_b.col(j)), flag);
  }
  DensityMatrix state(sigma, {da, db, flags}, {"A", "B", "B'"});
  const double marg = max_abs(partial_trace_matrix(sigma, state.dims(), {0, 1}) - e.mixture_matrix());
  return {std::move(state), {1, flags}, std::nullopt, marg, "", LocalBasisPair{Basis(alice->first), Basis(bob_vectors)}};
}

/// Bob-side extension sum_k p_k |psi_k><psi_k| (x) |k><k|_{B'} of any pure-state decomposition.
/// The witness is the pair of marginal eigenbases; callers refine it with c_min.
inline ExtensionCandidate discord_extension_from_pure_ensemble(const Ensemble& e) {
  e.validate();
  const Dims& dims = e.states.front().dims();
  const int flags = static_cast<int>(e.states.size());
  const int d = e.states.front().dim();
  if (flags > limits::kMaxFactorDim || static_cast<long>(d) * flags > limits::kMaxTotalDim)
    throw SizeError("Bob-side extension exceeds the dimension limits");
  Matrix sigma = Matrix::Zero(d * flags, d * flags);
  for (int k = 0; k < flags; ++k) {
    const Vector v = kron(e.states[static_cast<std::size_t>(k)].amplitudes(), detail::basis_vector(flags, k));
    sigma += e.weights[static_cast<std::size_t>(k)] * v * v.adjoint();
  }
  DensityMatrix state(sigma, {dims[0], dims[1], flags}, {"A", "B", "B'"});
  const BipartiteView view = bipartite_view(state);
  const double marg = max_abs(partial_trace_matrix(sigma, state.dims(), {0, 1}) - e.mixture_matrix());
  return {std::move(state), {1, flags}, std::nullopt, marg, "",
          LocalBasisPair{Basis(hermitian_eigen(marginal_a(view)).vectors), Basis(hermitian_eigen(marginal_b(view)).vectors)}};
}

// ---------------------------------------------------------------------------
// Pure-state ensemble search (convex roof)

struct RoofOptions {
  /// Number of ensemble members; 0 means rank^2.
  int ensemble_size = 0;
  int restarts = 4;
  std::uint64_t seed = 0;
  int max_sweeps = 60;
  double tol = 1e-10;
};

struct RoofSearchResult {
  Ensemble ensemble;
  double value = 0.0;
  bool converged = false;
};

namespace detail {

struct MemberCost {
  const CoherenceMeasure& measure;
  int d_a, d_b;
  double operator()(const Vector& v) const {
    const double n2 = v.squaredNorm();
    if (n2 < 1e-300) return 0.0;
    return n2 * schmidt_basis_coherence(measure, schmidt_spectrum(v, d_a, d_b), d_a, d_b);
  }
};

inline void rotate_pair(const Vector& x, const Vector& y, double theta, double phi, Vector& xo, Vector& yo) {
  const double c = std::cos(theta), s = std::sin(theta);
  const Complex ph = std::polar(1.0, phi);
  xo = c * x + s * ph * y;
  yo = -s * std::conj(ph) * x + c * y;
}

}  // namespace detail

/// Minimize sum_k p_k E_C(psi_k) over K-member decompositions of rho. Decompositions are the
/// rows of W diag(sqrt(mu)) E^dagger with W a K x rank isometry; the search applies Givens
/// rotations between pairs of members (a unitary on the member index).
inline RoofSearchResult search_pure_ensemble(const CoherenceMeasure& measure, const DensityMatrix& rho, int members,
                                             int restarts, std::uint64_t seed, int max_sweeps = 60,
                                             double tol = 1e-10) {
  if (rho.factors() != 2) throw ArgumentError("ensemble search needs a bipartite state");
  const int da = rho.dims()[0], db = rho.dims()[1];
  const EigenSystem es = hermitian_eigen(rho.matrix());
  int rank = 0;
  while (rank < es.values.size() && es.values(rank) > tol::kNullEigenvalue) ++rank;
  if (members < rank) throw ArgumentError("a decomposition needs at least rank(rho) members");
  const detail::MemberCost cost{measure, da, db};

  RoofSearchResult best{Ensemble{}, std::numeric_limits<double>::infinity(), false};
  std::vector<Vector> best_members;
  for (int start = 0; start <= restarts; ++start) {
    Matrix w = Matrix::Zero(members, rank);
    if (start == 0) {
      w.topRows(rank) = Matrix::Identity(rank, rank);
    } else {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(start)));
      w = haar_unitary(members, rng).leftCols(rank);
    }
    std::vector<Vector> v(static_cast<std::size_t>(members));
    std::vector<double> c(static_cast<std::size_t>(members));
    for (int k = 0; k < members; ++k) {
      Vector x = Vector::Zero(rho.dim());
      for (int j = 0; j < rank; ++j) x += w(k, j) * std::sqrt(es.values(j)) * es.vectors.col(j);
      v[static_cast<std::size_t>(k)] = x;
      c[static_cast<std::size_t>(k)] = cost(x);
    }
    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      double gained = 0.0;
      for (int k = 0; k < members; ++k)
        for (int l = k + 1; l < members; ++l) {
          auto& vk = v[static_cast<std::size_t>(k)];
          auto& vl = v[static_cast<std::size_t>(l)];
          const double current = c[static_cast<std::size_t>(k)] + c[static_cast<std::size_t>(l)];
          Vector xo, yo;
          auto pair_cost = [&](const RealVector& p) {
            detail::rotate_pair(vk, vl, p(0), p(1), xo, yo);
            return cost(xo) + cost(yo);
          };
          RealVector p0 = RealVector::Zero(2);
          double p0_val = current;
          for (int ti = 0; ti < 4; ++ti)
            for (int pi = 0; pi < 4; ++pi) {
              if (ti == 0 && pi > 0) continue;
              RealVector p(2);
              p << ti * std::numbers::pi / 8.0, pi * std::numbers::pi / 2.0;
              const double val = pair_cost(p);
              if (val < p0_val) {
                p0_val = val;
                p0 = p;
              }
            }
          SimplexOptions so;
          so.initial_step = std::numbers::pi / 16.0;
          so.max_evaluations = 120;
          so.f_tol = 1e-14;
          so.max_rounds = 2;
          const SimplexResult res = minimize_simplex(pair_cost, p0, so);
          if (res.value < current - 1e-15) {
            detail::rotate_pair(vk, vl, res.x(0), res.x(1), xo, yo);
            vk = xo;
            vl = yo;
            c[static_cast<std::size_t>(k)] = cost(vk);
            c[static_cast<std::size_t>(l)] = cost(vl);
            gained += current - (c[static_cast<std::size_t>(k)] + c[static_cast<std::size_t>(l)]);
          }
        }
      if (gained <= tol) {
        converged = true;
        break;
      }
    }
    const double total = std::accumulate(c.begin(), c.end(), 0.0);
    if (total < best.value) {
      best.value = total;
      best.converged = converged;
      best_members = v;
    }
  }
  double norm = 0.0;
  for (const auto& x : best_members) norm += x.squaredNorm() > 1e-14 ? x.squaredNorm() : 0.0;
  for (const auto& x : best_members) {
    const double n2 = x.squaredNorm();
    if (n2 <= 1e-14) continue;
    best.ensemble.weights.push_back(n2 / norm);
    best.ensemble.states.push_back(Ket::normalized(x, rho.dims(), rho.labels()));
  }
  return best;
}

/// Upper bound on the convex roof of the pure-state quantifier.
inline BoundReport e_convex_roof_estimate(const CoherenceMeasure& measure, const DensityMatrix& rho,
                                          const RoofOptions& opt = {}) {
  if (rho.factors() != 2) throw ArgumentError("convex roof needs a bipartite state");
  BoundReport r;
  r.diagnostics.seed = opt.seed;
  if (is_pure(rho, 1e-10)) {
    r = e_pure(measure, to_ket(rho));
    r.diagnostics.seed = opt.seed;
    return r;
  }
  const RealVector ev = hermitian_eigenvalues(rho.matrix());
  const int rank = static_cast<int>((ev.array() > tol::kNullEigenvalue).count());
  const int members = opt.ensemble_size > 0 ? opt.ensemble_size : std::min(rank * rank, 16);
  RoofSearchResult res = search_pure_ensemble(measure, rho, members, opt.restarts, opt.seed, opt.max_sweeps, opt.tol);
  r.value = res.value;
  r.kind = BoundKind::upper_bound;
  r.diagnostics.restarts = opt.restarts;
  r.diagnostics.source = "ensemble_search";
  r.diagnostics.candidates = opt.restarts + 1;
  r.diagnostics.converged = res.converged;
  r.witness = std::move(res.ensemble);
  return r;
}

// ---------------------------------------------------------------------------
// E_C and D_C upper bounds

struct ExtensionOptions {
  /// Largest ancilla factor dimension used by searched candidates.
  int max_ancilla_dim = 4;
  int restarts = 4;
  std::uint64_t seed = 0;
  /// Optional pure-state decomposition of the input. Product members give the separable-state
  /// extension; general members give the flagged-ensemble extension.
  std::optional<Ensemble> decomposition;
  /// Accepted max-entry distance between the decomposition's mixture and the input.
  double decomposition_tol = 1e-7;
  /// Search for further candidates; when false only the supplied decomposition (and the
  /// pure-state path) is evaluated.
  bool search = true;
  CminOptions cmin;
};

namespace detail {

inline double check_decomposition(const Ensemble& e, const DensityMatrix& rho, double tolerance) {
  e.validate();
  if (e.states.front().dims() != rho.dims()) throw ArgumentError("decomposition dims do not match the state");
  const double res = max_abs(e.mixture_matrix() - rho.matrix());
  if (res > tolerance) throw ArgumentError("decomposition does not reproduce the state (residual " + fmt(res) + ")");
  return res;
}

inline bool all_product(const Ensemble& e) {
  for (const Ket& k : e.states)
    if (schmidt_decompose(k).coefficients(0) < 1.0 - 1e-10) return false;
  return true;
}

/// Correlated coherence of a candidate at its witness basis; with `search` the witness seeds c_min.
inline CminResult evaluate_candidate(const CoherenceMeasure& measure, const ExtensionCandidate& cand,
                                     const CminOptions& base, bool search) {
  CminOptions o = base;
  o.initial = {cand.witness};
  o.local_search = search;
  if (!search) o.restarts = 0;
  return c_min(measure, cand.state, o);
}

}  // namespace detail

/// Upper bound on E_C: min over symmetric-extension candidates of the correlated coherence.
/// Candidates are flagged pure-state decompositions found by ensemble search (flag count from
/// rank(rho) up to the ancilla limit) plus the supplied decomposition, if any. Every candidate is
/// a feasible symmetric extension, so the value never undercuts E_C.
inline BoundReport e_upper_bound(const CoherenceMeasure& measure, const DensityMatrix& rho,
                                 const ExtensionOptions& opt = {}) {
  if (rho.factors() != 2) throw ArgumentError("e_upper_bound needs a bipartite state");
  const int da = rho.dims()[0], db = rho.dims()[1];
  BoundReport best;
  best.value = std::numeric_limits<double>::infinity();
  best.diagnostics.restarts = opt.restarts;
  best.diagnostics.seed = opt.seed;
  bool supplied_zero = false;

  auto consider = [&](ExtensionCandidate cand, const std::string& source, bool search) {
    const CminResult cm = detail::evaluate_candidate(measure, cand, opt.cmin, search);
    ++best.diagnostics.candidates;
    if (cm.value < best.value) {
      best.value = cm.value;
      cand.witness = cm.argmin_basis;
      best.diagnostics.source = source;
      best.diagnostics.converged = cm.converged;
      best.witness = std::move(cand);
      return true;
    }
    return false;
  };

  if (is_pure(rho, 1e-10)) {
    Ensemble single{{1.0}, {to_ket(rho)}};
    const auto anc = detail::symmetric_ancilla_dims(da, db, 1);
    best.diagnostics.ancilla_dims_tried.push_back(anc);
    consider(extension_from_pure_ensemble(single), "trivial", false);
    best.kind = BoundKind::exact;
    return best;
  }

  if (opt.decomposition) {
    detail::check_decomposition(*opt.decomposition, rho, opt.decomposition_tol);
    const bool product = detail::all_product(*opt.decomposition);
    ExtensionCandidate cand = product ? extension_from_separable_decomposition(*opt.decomposition)
                                      : extension_from_pure_ensemble(*opt.decomposition);
    best.diagnostics.ancilla_dims_tried.push_back(cand.ancilla_dims);
    if (consider(std::move(cand), product ? "separable_decomposition" : "supplied_decomposition", false))
      supplied_zero = product && best.value <= 1e-8;
  }

  const RealVector ev = hermitian_eigenvalues(rho.matrix());
  const int rank = static_cast<int>((ev.array() > tol::kNullEigenvalue).count());
  bool searched = false;
  for (int flags = rank; opt.search && !supplied_zero; ++flags) {
    const auto anc = detail::symmetric_ancilla_dims(da, db, flags);
    if (anc.first > opt.max_ancilla_dim || anc.second > opt.max_ancilla_dim || !detail::fits(da, db, anc)) break;
    best.diagnostics.ancilla_dims_tried.push_back(anc);
    RoofSearchResult res =
        search_pure_ensemble(measure, rho, flags, opt.restarts, derive_seed(opt.seed, static_cast<std::uint64_t>(flags)));
    consider(extension_from_pure_ensemble(res.ensemble), "ensemble_search", false);
    searched = true;
  }
  if (!searched && !opt.decomposition && !opt.search)
    throw SearchError("no candidate extension: search disabled and no decomposition supplied");
  if (!searched && !opt.decomposition)
    throw SearchError("no feasible symmetric extension: rank " + std::to_string(rank) +
                      " needs ancilla dims beyond max_ancilla_dim " + std::to_string(opt.max_ancilla_dim));
  best.kind = supplied_zero && best.diagnostics.source == "separable_decomposition" ? BoundKind::exact
                                                                                     : BoundKind::upper_bound;
  return best;
}

// ---------------------------------------------------------------------------
// Classical-quantum and classical-classical detection

/// max |Delta_A(rho) - rho| where Delta_A dephases Alice in `alice_basis`.
inline double cq_residual(const DensityMatrix& rho, const Basis& alice_basis) {
  const BipartiteView v = bipartite_view(rho);
  if (alice_basis.dim() != v.dim_a) throw ArgumentError("Alice basis dimension mismatch");
  Matrix dephased = Matrix::Zero(v.matrix.rows(), v.matrix.cols());
  const Matrix id_b = Matrix::Identity(v.dim_b, v.dim_b);
  for (int i = 0; i < v.dim_a; ++i) {
    const Vector a = alice_basis.matrix().col(i);
    const Matrix proj = kron(Matrix(a * a.adjoint()), id_b);
    dephased += proj * v.matrix * proj;
  }
  return max_abs(dephased - v.matrix);
}

struct CqResult {
  bool is_cq = false;
  Basis witness;
  double residual = 0.0;
  bool converged = true;
};

struct ClassifierOptions {
  double tol = 1e-6;
  double eps_deg = 1e-7;
  int restarts = 8;
  std::uint64_t seed = 0;
};

/// Searches the eigenbases of rho_A for one in which dephasing Alice leaves rho unchanged.
inline CqResult is_classical_quantum(const DensityMatrix& rho, const ClassifierOptions& opt = {}) {
  const BipartiteView v = bipartite_view(rho);
  const BlockUnitaryChart chart(admissible_bases(marginal_a(v), opt.eps_deg));
  const int db = v.dim_b;
  auto off_block = [&](const Matrix& basis) {
    const Matrix p = kron(basis, Matrix::Identity(db, db));
    const Matrix m = p.adjoint() * v.matrix * p;
    double s = 0.0;
    for (int i = 0; i < v.dim_a; ++i)
      for (int j = 0; j < v.dim_a; ++j)
        if (i != j) s += m.block(i * db, j * db, db, db).squaredNorm();
    return s;
  };
  Matrix best_basis = chart.basis(chart.identity());
  double best = off_block(best_basis);
  bool converged = true;
  if (chart.dimension() > 0 && best > 1e-30) {
    SimplexOptions so;
    so.f_tol = 1e-30;
    so.x_tol = 1e-13;
    so.max_evaluations = 6000;
    for (int r = 0; r <= opt.restarts; ++r) {
      BlockUnitaryChart::Centers centers = chart.identity();
      if (r > 0) {
        Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(r)));
        centers = chart.random(rng);
      }
      const SimplexResult res = minimize_simplex(
          [&](const RealVector& x) { return off_block(chart.basis(centers, x.data())); },
          RealVector::Zero(chart.dimension()), so);
      if (res.value < best) {
        best = res.value;
        best_basis = chart.basis(centers, res.x.data());
        converged = res.converged;
      }
      if (best <= 1e-30) break;
    }
  }
  Basis witness(best_basis);
  const double residual = cq_residual(rho, witness);
  return {residual <= opt.tol, std::move(witness), residual, converged};
}

struct CcResult {
  bool is_cc = false;
  LocalBasisPair witness;
  double value = 0.0;
  bool converged = true;
};

/// Classical-classical iff C_min vanishes.
inline CcResult is_classical_classical(const DensityMatrix& rho, const ClassifierOptions& opt = {},
                                       const CoherenceMeasure& measure = L1Coherence{}) {
  CminOptions co;
  co.eps_deg = opt.eps_deg;
  co.restarts = opt.restarts;
  co.seed = opt.seed;
  CminResult r = c_min(measure, rho, co);
  return {r.value <= opt.tol, std::move(r.argmin_basis), r.value, r.converged};
}

enum class Correlation { classical_classical, classical_quantum, neither };

inline const char* to_string(Correlation c) {
  switch (c) {
    case Correlation::classical_classical: return "CC";
    case Correlation::classical_quantum: return "CQ";
    default: return "neither";
  }
}

struct Classification {
  Correlation label;
  CcResult cc;
  CqResult cq;
};

inline Classification classify(const DensityMatrix& rho, const ClassifierOptions& opt = {}) {
  CcResult cc = is_classical_classical(rho, opt);
  CqResult cq = is_classical_quantum(rho, opt);
  Correlation label = cc.is_cc ? Correlation::classical_classical
                               : (cq.is_cq ? Correlation::classical_quantum : Correlation::neither);
  return {label, std::move(cc), std::move(cq)};
}

/// CQ decomposition read off a classical-quantum witness: Alice's basis vectors times the
/// eigen-decompositions of the conditional Bob states.
inline Ensemble cq_decomposition(const DensityMatrix& rho, const Basis& alice) {
  const BipartiteView v = bipartite_view(rho);
  Ensemble e;
  for (int i = 0; i < v.dim_a; ++i) {
    const Vector a = alice.matrix().col(i);
    const Matrix proj = kron(Matrix(a.adjoint()), Matrix::Identity(v.dim_b, v.dim_b));
    const Matrix cond = proj * v.matrix * proj.adjoint();
    const EigenSystem es = hermitian_eigen(cond);
    for (int j = 0; j < v.dim_b; ++j) {
      if (es.values(j) <= 1e-14) continue;
      e.weights.push_back(es.values(j));
      e.states.emplace_back(kron(a, Vector(es.vectors.col(j))), Dims{v.dim_a, v.dim_b});
    }
  }
  const double total = std::accumulate(e.weights.begin(), e.weights.end(), 0.0);
  for (double& w : e.weights) w /= total;
  return e;
}

/// Upper bound on D_C: min over Bob-side extensions. Candidates are the trivial extension
/// (C_min of the state itself), the classical-quantum flag construction (from a supplied
/// decomposition or a detected CQ witness), and flagged pure-state decompositions.
inline BoundReport d_c_upper_bound(const CoherenceMeasure& measure, const DensityMatrix& rho,
                                   const ExtensionOptions& opt = {}) {
  if (rho.factors() != 2) throw ArgumentError("d_c_upper_bound needs a bipartite state");
  BoundReport best;
  best.value = std::numeric_limits<double>::infinity();
  best.diagnostics.restarts = opt.restarts;
  best.diagnostics.seed = opt.seed;
  bool from_decomposition = false;

  auto record = [&](const CminResult& cm, std::variant<std::monostate, SchmidtForm, ExtensionCandidate, Ensemble> w,
                    const std::string& source) {
    ++best.diagnostics.candidates;
    if (cm.value < best.value) {
      best.value = cm.value;
      best.diagnostics.source = source;
      best.diagnostics.converged = cm.converged;
      best.witness = std::move(w);
      return true;
    }
    return false;
  };

  CminOptions base = opt.cmin;
  base.seed = opt.seed;
  base.restarts = opt.restarts;

  if (is_pure(rho, 1e-10)) {
    SchmidtForm sf = schmidt_decompose(to_ket(rho));
    CminOptions o = base;
    o.initial = {sf.bases()};
    best.diagnostics.ancilla_dims_tried.push_back({1, 1});
    record(c_min(measure, rho, o), std::move(sf), "trivial");
    best.kind = BoundKind::exact;
    return best;
  }

  best.diagnostics.ancilla_dims_tried.push_back({1, 1});
  record(c_min(measure, rho, base), std::monostate{}, "trivial");

  auto consider_cq = [&](const Ensemble& e, const std::string& source) {
    ExtensionCandidate cand = discord_extension_from_cq_decomposition(e);
    best.diagnostics.ancilla_dims_tried.push_back(cand.ancilla_dims);
    const CminResult cm = detail::evaluate_candidate(measure, cand, base, false);
    cand.witness = cm.argmin_basis;
    if (record(cm, std::move(cand), source) && best.value <= 1e-12) from_decomposition = true;
  };

  if (opt.decomposition) {
    detail::check_decomposition(*opt.decomposition, rho, opt.decomposition_tol);
    if (detail::cq_alice_basis(*opt.decomposition)) {
      consider_cq(*opt.decomposition, "supplied_cq_decomposition");
    } else {
      ExtensionCandidate cand = discord_extension_from_pure_ensemble(*opt.decomposition);
      best.diagnostics.ancilla_dims_tried.push_back(cand.ancilla_dims);
      const CminResult cm = detail::evaluate_candidate(measure, cand, base, true);
      cand.witness = cm.argmin_basis;
      record(cm, std::move(cand), "supplied_decomposition");
    }
  }

  if (best.value > 1e-12 && opt.search) {
    ClassifierOptions co;
    co.seed = opt.seed;
    const CqResult cq = is_classical_quantum(rho, co);
    if (cq.is_cq) {
      const Ensemble e = cq_decomposition(rho, cq.witness);
      if (static_cast<int>(e.states.size()) <= limits::kMaxFactorDim) consider_cq(e, "cq_witness");
    }
  }

  if (best.value > 1e-12 && opt.search) {
    const RealVector ev = hermitian_eigenvalues(rho.matrix());
    const int rank = static_cast<int>((ev.array() > tol::kNullEigenvalue).count());
    for (int flags = std::max(rank, 2); flags <= opt.max_ancilla_dim; ++flags) {
      if (static_cast<long>(rho.dim()) * flags > limits::kMaxTotalDim) break;
      best.diagnostics.ancilla_dims_tried.push_back({1, flags});
      RoofSearchResult res = search_pure_ensemble(measure, rho, flags, 0, opt.seed);
      ExtensionCandidate cand = discord_extension_from_pure_ensemble(res.ensemble);
      CminOptions o = base;
      o.seed = derive_seed(opt.seed, static_cast<std::uint64_t>(flags));
      const CminResult cm = detail::evaluate_candidate(measure, cand, o, true);
      cand.witness = cm.argmin_basis;
      record(cm, std::move(cand), "flagged_ensemble");
    }
  }

  best.kind = (from_decomposition && best.value <= 1e-12) ? BoundKind::exact : BoundKind::upper_bound;
  return best;
}

}  // namespace corrcoh
