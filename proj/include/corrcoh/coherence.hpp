#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "corrcoh/state.hpp"

namespace corrcoh {

/// A basis-dependent coherence functional. Implementations only see the state already
/// expressed in the reference basis; `evaluate` performs the change of basis.
///
/// A measure is admissible for the downstream quantifiers when it is zero exactly on
/// matrices diagonal in the reference basis, convex, and insensitive to the phases and
/// ordering of basis vectors (see the conformance tests).
class CoherenceMeasure {
 public:
  virtual ~CoherenceMeasure() = default;

  virtual std::string_view id() const = 0;

  /// Coherence of `rho` with respect to the computational basis.
  virtual double in_reference_basis(const Matrix& rho) const = 0;

  double evaluate(const Matrix& rho, const Matrix& basis) const {
    if (basis.rows() != rho.rows()) throw ArgumentError("basis dimension does not match state");
    return in_reference_basis(basis.adjoint() * rho * basis);
  }

  double evaluate(const DensityMatrix& rho, const Basis& basis) const { return evaluate(rho.matrix(), basis.matrix()); }
};

/// Sum of absolute values of the off-diagonal entries.
class L1Coherence final : public CoherenceMeasure {
 public:
  std::string_view id() const override { return "l1"; }
  double in_reference_basis(const Matrix& rho) const override {
    double s = 0.0;
    for (Eigen::Index c = 0; c < rho.cols(); ++c)
      for (Eigen::Index r = 0; r < rho.rows(); ++r)
        if (r != c) s += std::abs(rho(r, c));
    return s;
  }
};

/// S(diag(rho)) - S(rho), in bits.
class RelativeEntropyCoherence final : public CoherenceMeasure {
 public:
  std::string_view id() const override { return "relent"; }
  double in_reference_basis(const Matrix& rho) const override {
    const RealVector diag = rho.diagonal().real();
    const double c = entropy_bits(diag) - entropy_bits(hermitian_eigenvalues(rho));
    return c > 0.0 ? c : 0.0;
  }
};

/// Von Neumann entropy in bits. Eigenvalues within PSD drift of zero are clipped.
inline double von_neumann_entropy(const Matrix& rho) { return entropy_bits(hermitian_eigenvalues(rho)); }
inline double von_neumann_entropy(const DensityMatrix& rho) { return von_neumann_entropy(rho.matrix()); }

inline double c_l1(const DensityMatrix& rho, const Basis& basis) { return L1Coherence{}.evaluate(rho, basis); }
inline double c_relent(const DensityMatrix& rho, const Basis& basis) {
  return RelativeEntropyCoherence{}.evaluate(rho, basis);
}

using MeasurePtr = std::shared_ptr<const CoherenceMeasure>;

namespace detail {
struct MeasureRegistry {
  std::mutex mutex;
  std::map<std::string, MeasurePtr, std::less<>> entries;

  static MeasureRegistry& instance() {
    static MeasureRegistry reg = [] {
      MeasureRegistry r;
      r.entries.emplace("l1", std::make_shared<L1Coherence>());
      r.entries.emplace("relent", std::make_shared<RelativeEntropyCoherence>());
      return r;
    }();
    return reg;
  }

  MeasureRegistry() = default;
  MeasureRegistry(MeasureRegistry&& other) noexcept : entries(std::move(other.entries)) {}
};
}  // namespace detail

/// Makes a measure selectable by id everywhere (including the CLI). Replaces an existing id.
inline void register_measure(MeasurePtr measure) {
  auto& reg = detail::MeasureRegistry::instance();
  std::lock_guard lock(reg.mutex);
  reg.entries[std::string(measure->id())] = std::move(measure);
}

inline MeasurePtr measure_by_id(std::string_view id) {
  auto& reg = detail::MeasureRegistry::instance();
  std::lock_guard lock(reg.mutex);
  const auto it = reg.entries.find(id);
  if (it == reg.entries.end()) throw ArgumentError("unknown coherence measure '" + std::string(id) + "'");
  return it->second;
}

inline std::vector<std::string> measure_ids() {
  auto& reg = detail::MeasureRegistry::instance();
  std::lock_guard lock(reg.mutex);
  std::vector<std::string> ids;
  for (const auto& [k, v] : reg.entries) ids.push_back(k);
  return ids;
}

}  // namespace corrcoh
