#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "corrcoh/coherence.hpp"
#include "corrcoh/rng.hpp"
#include "corrcoh/sampling.hpp"
#include "corrcoh/simplex.hpp"
#include "corrcoh/state.hpp"

namespace corrcoh {

// ---------------------------------------------------------------------------
// Correlated coherence

/// C(rho_AB) - C(rho_A) - C(rho_B) with the product of the given local bases.
/// Works on raw matrices so optimizers can call it without revalidating states.
inline double correlated_coherence_matrix(const CoherenceMeasure& measure, const Matrix& rho_ab, const Matrix& rho_a,
                                          const Matrix& rho_b, const Matrix& basis_a, const Matrix& basis_b) {
  const Matrix p = kron(basis_a, basis_b);
  return measure.in_reference_basis(p.adjoint() * rho_ab * p) -
         measure.in_reference_basis(basis_a.adjoint() * rho_a * basis_a) -
         measure.in_reference_basis(basis_b.adjoint() * rho_b * basis_b);
}

/// Parties are taken from the labels, so extended states (A, A', B, B') are grouped as AA':BB'.
inline double correlated_coherence(const CoherenceMeasure& measure, const DensityMatrix& rho,
                                   const LocalBasisPair& bases) {
  const BipartiteView v = bipartite_view(rho);
  if (bases.alice.dim() != v.dim_a || bases.bob.dim() != v.dim_b)
    throw ArgumentError("local bases do not match the party dimensions");
  return correlated_coherence_matrix(measure, v.matrix, marginal_a(v), marginal_b(v), bases.alice.matrix(),
                                     bases.bob.matrix());
}

// ---------------------------------------------------------------------------
// Admissible bases

struct EigenCluster {
  double value = 0.0;  // mean eigenvalue of the cluster
  int offset = 0;      // first index in the descending spectrum
  int multiplicity = 0;
};

/// Eigenvalue clusters. Neighbouring eigenvalues join a cluster when their gap is at most
/// eps times the largest eigenvalue.
struct DegeneracyProfile {
  std::vector<EigenCluster> clusters;
  double eps = 0.0;

  bool nondegenerate() const {
    for (const auto& c : clusters)
      if (c.multiplicity > 1) return false;
    return true;
  }
};

inline DegeneracyProfile cluster_spectrum(const RealVector& descending, double eps) {
  DegeneracyProfile p{{}, eps};
  const Eigen::Index n = descending.size();
  if (n == 0) return p;
  const double scale = std::max(std::abs(descending(0)), std::numeric_limits<double>::min());
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (i == n || descending(i - 1) - descending(i) > eps * scale) {
      EigenCluster c;
      c.offset = static_cast<int>(start);
      c.multiplicity = static_cast<int>(i - start);
      c.value = descending.segment(start, i - start).mean();
      p.clusters.push_back(c);
      start = i;
    }
  }
  return p;
}

/// The set of local bases in which a marginal is incoherent: its eigenbases. By C1,
/// C(rho_A) = 0 exactly when rho_A is diagonal, so the set is parametrized by one unitary
/// per degenerate eigenvalue cluster acting on `eigen.vectors`.
struct AdmissibleBases {
  EigenSystem eigen;
  DegeneracyProfile profile;
};

inline AdmissibleBases admissible_bases(const Matrix& marginal, double eps_deg = 1e-7) {
  AdmissibleBases ab{hermitian_eigen(marginal), {}};
  ab.profile = cluster_spectrum(ab.eigen.values, eps_deg);
  return ab;
}

inline AdmissibleBases admissible_bases(const DensityMatrix& marginal, double eps_deg = 1e-7) {
  return admissible_bases(marginal.matrix(), eps_deg);
}

/// Local chart on the admissible set: basis = V * blockdiag(center_c * exp(i H_c(x))).
/// H_c has zero diagonal, since basis-vector phases cannot change a conforming measure.
/// Clusters in the null space of the marginal are frozen: their basis vectors carry no weight.
class BlockUnitaryChart {
 public:
  using Centers = std::vector<Matrix>;

  explicit BlockUnitaryChart(const AdmissibleBases& ab) : eigenvectors_(ab.eigen.vectors), clusters_(ab.profile.clusters) {
    for (const auto& c : clusters_) {
      const bool is_free = c.multiplicity > 1 && c.value > tol::kNullEigenvalue;
      free_.push_back(is_free);
      offsets_.push_back(dimension_);
      if (is_free) dimension_ += c.multiplicity * (c.multiplicity - 1);
    }
  }

  int dimension() const { return dimension_; }
  int size() const { return static_cast<int>(eigenvectors_.rows()); }

  Centers identity() const {
    Centers out;
    for (const auto& c : clusters_) out.push_back(Matrix::Identity(c.multiplicity, c.multiplicity));
    return out;
  }

  Centers random(Rng& rng) const {
    Centers out;
    for (std::size_t k = 0; k < clusters_.size(); ++k) {
      const int m = clusters_[k].multiplicity;
      out.push_back(free_[k] ? haar_unitary(m, rng) : Matrix(Matrix::Identity(m, m)));
    }
    return out;
  }

  Centers advance(const Centers& centers, const double* x) const {
    Centers out = centers;
    for (std::size_t k = 0; k < clusters_.size(); ++k) {
      if (!free_[k]) continue;
      out[k] = centers[k] * exp_i_hermitian(generator(k, x));
    }
    return out;
  }

  Matrix basis(const Centers& centers) const {
    Matrix b = eigenvectors_;
    for (std::size_t k = 0; k < clusters_.size(); ++k) {
      const auto& c = clusters_[k];
      b.middleCols(c.offset, c.multiplicity) = eigenvectors_.middleCols(c.offset, c.multiplicity) * centers[k];
    }
    return b;
  }

  Matrix basis(const Centers& centers, const double* x) const { return basis(dimension_ == 0 ? centers : advance(centers, x)); }

  /// Express an orthonormal basis in this chart if it is admissible (up to column order).
  std::optional<Centers> locate(const Matrix& candidate, double tolerance = 1e-8) const {
    if (candidate.rows() != eigenvectors_.rows() || candidate.cols() != eigenvectors_.cols()) return std::nullopt;
    const Matrix w = eigenvectors_.adjoint() * candidate;
    std::vector<std::vector<Eigen::Index>> members(clusters_.size());
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      std::size_t best = 0;
      double best_weight = -1.0;
      for (std::size_t k = 0; k < clusters_.size(); ++k) {
        const double weight = w.col(j).segment(clusters_[k].offset, clusters_[k].multiplicity).squaredNorm();
        if (weight > best_weight) {
          best_weight = weight;
          best = k;
        }
      }
      if (1.0 - best_weight > tolerance) return std::nullopt;
      members[best].push_back(j);
    }
    Centers out;
    for (std::size_t k = 0; k < clusters_.size(); ++k) {
      const auto& c = clusters_[k];
      if (static_cast<int>(members[k].size()) != c.multiplicity) return std::nullopt;
      Matrix u(c.multiplicity, c.multiplicity);
      for (int col = 0; col < c.multiplicity; ++col)
        u.col(col) = w.col(members[k][static_cast<std::size_t>(col)]).segment(c.offset, c.multiplicity);
      // Re-orthonormalize the block to remove the tolerated leakage.
      Eigen::JacobiSVD<Matrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
      out.push_back(svd.matrixU() * svd.matrixV().adjoint());
    }
    return out;
  }

 private:
  Matrix generator(std::size_t k, const double* x) const {
    const int m = clusters_[k].multiplicity;
    Matrix h = Matrix::Zero(m, m);
    const double* p = x + offsets_[k];
    for (int r = 0; r < m; ++r)
      for (int c = r + 1; c < m; ++c) {
        h(r, c) = Complex(p[0], p[1]);
        h(c, r) = Complex(p[0], -p[1]);
        p += 2;
      }
    return h;
  }

  Matrix eigenvectors_;
  std::vector<EigenCluster> clusters_;
  std::vector<bool> free_;
  std::vector<int> offsets_;
  int dimension_ = 0;
};

// ---------------------------------------------------------------------------
// C_min

struct CminOptions {
  double eps_deg = 1e-7;
  int restarts = 16;
  /// Objective evaluations allowed per local search.
  int max_iters = 8000;
  double tol = 1e-9;
  /// Run local searches; when false only the identity chart point and `initial` are evaluated.
  bool local_search = true;
  std::uint64_t seed = 0;
  /// Extra admissible bases to evaluate and start local searches from. Bases that are not
  /// eigenbases of the marginals are ignored.
  std::vector<LocalBasisPair> initial;
};

struct CminResult {
  double value = 0.0;
  LocalBasisPair argmin_basis;
  int restarts_used = 0;
  bool converged = true;
  int evaluations = 0;
  /// Number of free real parameters searched (0 when the admissible basis is unique).
  int search_dimension = 0;
};

/// Minimum correlated coherence over local eigenbases of both marginals. Exact when both
/// marginals are nondegenerate; otherwise a multi-start simplex search over the per-cluster
/// unitaries. Restart r draws its starting point from derive_seed(seed, r).
inline CminResult c_min(const CoherenceMeasure& measure, const DensityMatrix& rho, const CminOptions& opt = {}) {
  const BipartiteView view = bipartite_view(rho);
  const Matrix rho_a = marginal_a(view);
  const Matrix rho_b = marginal_b(view);
  const BlockUnitaryChart chart_a(admissible_bases(rho_a, opt.eps_deg));
  const BlockUnitaryChart chart_b(admissible_bases(rho_b, opt.eps_deg));
  const int na = chart_a.dimension();
  const int n = na + chart_b.dimension();

  auto value_at = [&](const Matrix& ba, const Matrix& bb) {
    return correlated_coherence_matrix(measure, view.matrix, rho_a, rho_b, ba, bb);
  };

  struct Start {
    BlockUnitaryChart::Centers a, b;
  };
  std::vector<Start> starts;
  for (const auto& pair : opt.initial) {
    auto ca = chart_a.locate(pair.alice.matrix());
    auto cb = chart_b.locate(pair.bob.matrix());
    if (ca && cb) starts.push_back({std::move(*ca), std::move(*cb)});
  }
  starts.push_back({chart_a.identity(), chart_b.identity()});

  double best = std::numeric_limits<double>::infinity();
  Matrix best_a, best_b;
  int evaluations = 0;
  for (const auto& s : starts) {
    const Matrix ba = chart_a.basis(s.a);
    const Matrix bb = chart_b.basis(s.b);
    const double v = value_at(ba, bb);
    ++evaluations;
    if (v < best) {
      best = v;
      best_a = ba;
      best_b = bb;
    }
  }

  bool converged = true;
  int restarts_used = 0;
  if (n > 0 && best > 0.0 && opt.local_search) {
    for (int r = 0; r < opt.restarts; ++r) {
      Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(r)));
      Start s{chart_a.random(rng), chart_b.random(rng)};
      starts.push_back(std::move(s));
    }
    SimplexOptions so;
    so.f_tol = opt.tol;
    so.max_evaluations = opt.max_iters;
    bool best_converged = true;
    for (const auto& s : starts) {
      auto f = [&](const RealVector& x) {
        return value_at(chart_a.basis(s.a, x.data()), chart_b.basis(s.b, x.data() + na));
      };
      const SimplexResult res = minimize_simplex(f, RealVector::Zero(n), so);
      evaluations += res.evaluations;
      ++restarts_used;
      if (res.value < best) {
        best = res.value;
        best_a = chart_a.basis(s.a, res.x.data());
        best_b = chart_b.basis(s.b, res.x.data() + na);
        best_converged = res.converged;
      } else if (res.value == best) {
        best_converged = best_converged && res.converged;
      }
      if (best <= 0.0) break;
    }
    converged = best_converged;
  }

  CminResult out{std::max(best, 0.0), LocalBasisPair{Basis(best_a), Basis(best_b)}, restarts_used, converged,
                 evaluations, n};
  return out;
}

}  // namespace corrcoh
