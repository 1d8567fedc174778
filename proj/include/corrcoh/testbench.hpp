#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "corrcoh/coherence.hpp"
#include "corrcoh/correlated.hpp"
#include "corrcoh/quantifiers.hpp"
#include "corrcoh/sampling.hpp"
#include "corrcoh/state.hpp"

namespace corrcoh {

// ---------------------------------------------------------------------------
// State families

/// sum_i sqrt(lambda_i) |i>_A |i>_B rotated by local unitaries.
inline Ket pure_from_schmidt(const RealVector& lambdas, const Matrix& u_a, const Matrix& u_b) {
  const int da = static_cast<int>(u_a.rows()), db = static_cast<int>(u_b.rows());
  if (lambdas.size() > std::min(da, db)) throw ArgumentError("more Schmidt coefficients than local dimension");
  Vector v = Vector::Zero(da * db);
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) v(i * db + i) = std::sqrt(std::max(lambdas(i), 0.0));
  return Ket::normalized(kron(u_a, u_b) * v, {da, db});
}

inline Ket pure_from_schmidt(const RealVector& lambdas) {
  const int d = static_cast<int>(lambdas.size());
  return pure_from_schmidt(lambdas, Matrix::Identity(d, d), Matrix::Identity(d, d));
}

inline Ket maximally_entangled(int d) { return pure_from_schmidt(RealVector::Constant(d, 1.0 / d)); }

inline Ket bell_state() { return maximally_entangled(2); }

/// p |Phi+><Phi+| + (1 - p) I/4.
inline DensityMatrix werner_state(double p) {
  if (p < 0.0 || p > 1.0) throw ArgumentError("Werner parameter must lie in [0, 1]");
  const Matrix m = p * bell_state().projector() + (1.0 - p) * Matrix::Identity(4, 4) / 4.0;
  return DensityMatrix(m, {2, 2});
}

struct DecompositionFit {
  Ensemble decomposition;
  double residual = 0.0;  // max-entry reconstruction error
  bool accepted = false;
};

namespace detail {

// Parameters per term: weight amplitude t, then real/imag parts of both local vectors.
struct ProductFitFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  Matrix target;
  int d_a, d_b, terms;

  int per_term() const { return 1 + 2 * d_a + 2 * d_b; }
  int inputs() const { return terms * per_term(); }
  int values() const { return std::max(2 * static_cast<int>(target.size()), inputs()); }

  Vector local(const Eigen::VectorXd& x, int offset, int d) const {
    Vector v(d);
    for (int i = 0; i < d; ++i) v(i) = Complex(x(offset + 2 * i), x(offset + 2 * i + 1));
    const double n = v.norm();
    return n > 1e-300 ? Vector(v / n) : v;
  }

  Matrix mixture(const Eigen::VectorXd& x) const {
    Matrix m = Matrix::Zero(target.rows(), target.cols());
    for (int k = 0; k < terms; ++k) {
      const int o = k * per_term();
      const Vector v = kron(local(x, o + 1, d_a), local(x, o + 1 + 2 * d_a, d_b));
      m += x(o) * x(o) * v * v.adjoint();
    }
    return m;
  }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    const Matrix r = mixture(x) - target;
    f.setZero();
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      f(2 * i) = r(i).real();
      f(2 * i + 1) = r(i).imag();
    }
    return 0;
  }
};

}  // namespace detail

/// Numerical product-state decomposition of a (presumed separable) bipartite state: least squares
/// over `terms` weighted product vectors with random restarts. Accepted when the reconstruction
/// error is at most `tol`.
inline DecompositionFit find_separable_decomposition(const DensityMatrix& rho, int terms = 6, std::uint64_t seed = 0,
                                                     double tol = 1e-7, int attempts = 12) {
  if (rho.factors() != 2) throw ArgumentError("decomposition fit needs a bipartite state");
  detail::ProductFitFunctor fn{rho.matrix(), rho.dims()[0], rho.dims()[1], terms};
  DecompositionFit best;
  best.residual = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x;
  for (int a = 0; a < attempts; ++a) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(a)));
    Eigen::VectorXd x(fn.inputs());
    for (int k = 0; k < terms; ++k) {
      const int o = k * fn.per_term();
      x(o) = std::sqrt(1.0 / terms);
      for (int i = 1; i < fn.per_term(); ++i) x(o + i) = rng.normal();
    }
    Eigen::NumericalDiff<detail::ProductFitFunctor> numdiff(fn);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<detail::ProductFitFunctor>> lm(numdiff);
    lm.parameters.maxfev = 4000;
    lm.parameters.ftol = 1e-15;
    lm.parameters.xtol = 1e-15;
    lm.minimize(x);
    const double res = max_abs(fn.mixture(x) - fn.target);
    if (res < best.residual) {
      best.residual = res;
      best_x = x;
    }
    if (best.residual <= tol * 1e-2) break;
  }
  double total = 0.0;
  for (int k = 0; k < terms; ++k) total += best_x(k * fn.per_term()) * best_x(k * fn.per_term());
  for (int k = 0; k < terms; ++k) {
    const int o = k * fn.per_term();
    const double w = best_x(o) * best_x(o);
    if (w / total <= 1e-14) continue;
    best.decomposition.weights.push_back(w / total);
    best.decomposition.states.emplace_back(
        kron(fn.local(best_x, o + 1, fn.d_a), fn.local(best_x, o + 1 + 2 * fn.d_a, fn.d_b)), rho.dims());
  }
  best.residual = max_abs(best.decomposition.mixture_matrix() - rho.matrix());
  best.accepted = best.residual <= tol;
  return best;
}

// ---------------------------------------------------------------------------
// Majorization

/// `target` majorizes `source` (source ≺ target): descending prefix sums of target dominate.
inline bool majorizes(std::vector<double> target, std::vector<double> source, double tolerance = 1e-12) {
  const std::size_t n = std::max(target.size(), source.size());
  target.resize(n, 0.0);
  source.resize(n, 0.0);
  std::sort(target.rbegin(), target.rend());
  std::sort(source.rbegin(), source.rend());
  double st = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    st += target[i];
    ss += source[i];
    if (st < ss - tolerance) return false;
  }
  return std::abs(st - ss) <= tolerance;
}

inline bool is_probability_vector(const std::vector<double>& p, double tolerance = 1e-12) {
  double s = 0.0;
  for (double x : p) {
    if (x < -tolerance) return false;
    s += x;
  }
  return std::abs(s - 1.0) <= tolerance;
}

class MajorizationPair {
 public:
  MajorizationPair(std::vector<double> source, std::vector<double> target)
      : source_(std::move(source)), target_(std::move(target)) {
    if (!is_probability_vector(source_) || !is_probability_vector(target_))
      throw ValidationError("majorization pair entries must be probability vectors");
    if (!majorizes(target_, source_)) throw ValidationError("source is not majorized by target");
  }

  const std::vector<double>& source() const { return source_; }
  const std::vector<double>& target() const { return target_; }

 private:
  std::vector<double> source_, target_;
};

/// Samples target spectrum lambda' on the simplex (sometimes a product or uniform edge case),
/// then applies random T-transforms, which can only move a spectrum down the majorization order.
inline MajorizationPair nielsen_pair_sampler(const Dims& dims, std::uint64_t seed) {
  if (dims.size() != 2 || dims[0] != dims[1] || dims[0] < 2 || dims[0] > 4)
    throw ArgumentError("nielsen_pair_sampler needs dims (d, d) with 2 <= d <= 4");
  const std::size_t d = static_cast<std::size_t>(dims[0]);
  Rng rng(seed);
  std::vector<double> target;
  const double u = rng.uniform();
  if (u < 0.05) {
    target.assign(d, 0.0);
    target[0] = 1.0;
  } else {
    target = random_simplex(d, rng);
  }
  std::sort(target.rbegin(), target.rend());
  std::vector<double> source = target;
  const int transforms = 1 + static_cast<int>(rng.index(2 * d));
  const bool identity = rng.uniform() < 0.05;
  for (int t = 0; t < transforms && !identity; ++t) {
    const std::size_t i = rng.index(d);
    std::size_t j = rng.index(d - 1);
    if (j >= i) ++j;
    const double s = rng.uniform();
    const double a = source[i], b = source[j];
    source[i] = s * a + (1.0 - s) * b;
    source[j] = (1.0 - s) * a + s * b;
  }
  std::sort(source.rbegin(), source.rend());
  return MajorizationPair(std::move(source), std::move(target));
}

// ---------------------------------------------------------------------------
// Property suites

struct Check {
  std::string name;
  /// "ge", "le", or "eq" between observed and required.
  std::string relation;
  double observed = 0.0;
  double required = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct TrialOutcome {
  std::string inputs;
  std::vector<Check> checks;
};

struct FailureRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  std::string inputs;
  Check check;
};

struct PropertySuiteReport {
  std::string suite;
  std::string measure;
  std::uint64_t seed = 0;
  int trials = 0;
  int checks = 0;
  std::vector<FailureRecord> failures;
  std::map<std::string, double> tolerances;
  double wall_time_s = 0.0;

  bool passed() const { return failures.empty(); }
};

using TrialFunction = std::function<TrialOutcome(const CoherenceMeasure&, int index, std::uint64_t seed)>;

struct SuiteDefinition {
  std::string id;
  TrialFunction trial;
  std::map<std::string, double> tolerances;
  /// Fixed trials appended after the n random ones (e.g. parameter scans).
  int extra_trials = 0;
  int default_n = 100;
};

namespace detail {

inline Check check_ge(std::string name, double observed, double required, double tolerance) {
  return {std::move(name), "ge", observed, required, tolerance, observed >= required - tolerance};
}
inline Check check_le(std::string name, double observed, double required, double tolerance) {
  return {std::move(name), "le", observed, required, tolerance, observed <= required + tolerance};
}
inline Check check_eq(std::string name, double observed, double required, double tolerance) {
  return {std::move(name), "eq", observed, required, tolerance, std::abs(observed - required) <= tolerance};
}
inline Check check_true(std::string name, bool value) {
  return {std::move(name), "eq", value ? 1.0 : 0.0, 1.0, 0.0, value};
}

inline std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + detail::fmt(v[i]);
  return s + "]";
}

inline std::vector<double> to_std(const RealVector& v) { return {v.data(), v.data() + v.size()}; }

/// Spectrum of the given cluster pattern with equal values inside each cluster.
inline RealVector degenerate_spectrum(const std::vector<int>& multiplicities, Rng& rng) {
  std::vector<double> w = random_simplex(multiplicities.size(), rng);
  for (double& x : w) x = 0.1 + 0.9 * x;
  double total = 0.0;
  for (std::size_t c = 0; c < w.size(); ++c) total += w[c];
  std::vector<double> values;
  for (std::size_t c = 0; c < w.size(); ++c)
    for (int k = 0; k < multiplicities[c]; ++k) values.push_back(w[c] / total / multiplicities[c]);
  std::sort(values.rbegin(), values.rend());
  return Eigen::Map<RealVector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace detail

/// Splits each degenerate cluster of a (descending) Schmidt spectrum by offsets eps*(c - j),
/// centred in the cluster (c the mean index offset) so the trace is kept.
inline RealVector perturb_spectrum(const RealVector& lambdas, double eps, double cluster_eps = 1e-9) {
  RealVector out = lambdas;
  const DegeneracyProfile p = cluster_spectrum(lambdas, cluster_eps);
  for (const auto& c : p.clusters) {
    const double centre = (c.multiplicity - 1) / 2.0;
    for (int j = 0; j < c.multiplicity; ++j) out(c.offset + j) += eps * (centre - j);
  }
  return out;
}

// Convexity: pure-ensemble slice of convexity, plus (C3) on the raw measure.
inline TrialOutcome convexity_trial(const CoherenceMeasure& measure, int index, std::uint64_t seed) {
  Rng rng(seed);
  TrialOutcome out;
  const int k = 2 + static_cast<int>(rng.index(2));
  Ensemble e;
  e.weights = random_simplex(static_cast<std::size_t>(k), rng);
  const bool identical = index % 10 == 0;
  for (int i = 0; i < k; ++i) e.states.push_back(identical && i > 0 ? e.states.front() : haar_ket({2, 2}, rng));
  double average = 0.0;
  for (int i = 0; i < k; ++i) average += e.weights[static_cast<std::size_t>(i)] * e_pure(measure, e.states[static_cast<std::size_t>(i)]).value;
  ExtensionOptions eo;
  eo.decomposition = e;
  eo.search = false;
  const BoundReport bound = e_upper_bound(measure, e.mixture(), eo);
  out.checks.push_back(detail::check_ge("ensemble_average_ge_bound", average, bound.value, 1e-6));
  if (identical) out.checks.push_back(detail::check_eq("identical_members", bound.value, average, 1e-8));
  const auto& cand = std::get<ExtensionCandidate>(bound.witness);
  out.checks.push_back(detail::check_le("extension_symmetry", *cand.symmetry_residual, 0.0, 1e-10));
  out.checks.push_back(detail::check_le("extension_marginal", cand.marginal_residual, 0.0, 1e-6));

  const int da = 2 + static_cast<int>(rng.index(2)), db = 2 + static_cast<int>(rng.index(2));
  const DensityMatrix rho = ginibre_mixed({da, db}, rng);
  const DensityMatrix sigma = ginibre_mixed({da, db}, rng);
  const double lam = rng.uniform();
  const Basis basis = random_product_basis(da, db, rng).product();
  const DensityMatrix mix(lam * rho.matrix() + (1.0 - lam) * sigma.matrix(), {da, db});
  const double lhs = measure.evaluate(mix, basis);
  const double rhs = lam * measure.evaluate(rho, basis) + (1.0 - lam) * measure.evaluate(sigma, basis);
  out.checks.push_back(detail::check_le("measure_convexity", lhs, rhs, 1e-6));
  out.inputs = "{\"members\":" + std::to_string(k) + ",\"weights\":" + detail::list(e.weights) +
               ",\"triple_dims\":[" + std::to_string(da) + "," + std::to_string(db) + "],\"lambda\":" + detail::fmt(lam) + "}";
  return out;
}

// Monotonicity on Nielsen pairs; the source converts to the target by LOCC.
inline TrialOutcome monotonicity_trial(const CoherenceMeasure& measure, int index, std::uint64_t seed) {
  const int d = index % 2 == 0 ? 2 : 3;
  const MajorizationPair pair = nielsen_pair_sampler({d, d}, seed);
  Rng rng(derive_seed(seed, 1));
  auto to_vec = [](const std::vector<double>& v) {
    return RealVector(Eigen::Map<const RealVector>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  const Ket src = pure_from_schmidt(to_vec(pair.source()), haar_unitary(d, rng), haar_unitary(d, rng));
  const Ket tgt = pure_from_schmidt(to_vec(pair.target()), haar_unitary(d, rng), haar_unitary(d, rng));
  TrialOutcome out;
  out.inputs = "{\"d\":" + std::to_string(d) + ",\"source\":" + detail::list(pair.source()) +
               ",\"target\":" + detail::list(pair.target()) + "}";
  out.checks.push_back(detail::check_true("majorization_valid", majorizes(pair.target(), pair.source())));
  out.checks.push_back(detail::check_ge("source_ge_target", e_pure(measure, src).value, e_pure(measure, tgt).value, 1e-8));
  return out;
}

inline TrialOutcome local_unitary_trial(const CoherenceMeasure& measure, int index, std::uint64_t seed) {
  Rng rng(seed);
  const int d = index % 2 == 0 ? 2 : 3;
  const Ket psi = haar_ket({d, d}, rng);
  const bool identity = index == 0;
  const Matrix ua = identity ? Matrix(Matrix::Identity(d, d)) : haar_unitary(d, rng);
  const Matrix ub = identity ? Matrix(Matrix::Identity(d, d)) : haar_unitary(d, rng);
  const Ket moved = apply_local_unitary(psi, ua, ub);
  CminOptions co;
  co.seed = derive_seed(seed, 1);
  TrialOutcome out;
  out.inputs = "{\"d\":" + std::to_string(d) + ",\"identity\":" + (identity ? "true" : "false") + "}";
  out.checks.push_back(detail::check_eq("c_min_invariant", c_min(measure, DensityMatrix(moved), co).value,
                                        c_min(measure, DensityMatrix(psi), co).value, 1e-5));
  out.checks.push_back(detail::check_eq("e_pure_invariant", e_pure(measure, moved).value, e_pure(measure, psi).value, 1e-5));
  return out;
}

inline const std::vector<double>& perturbation_sequence() {
  static const std::vector<double> eps{1e-2, 1e-3, 1e-4};
  return eps;
}

// Degenerate Schmidt spectra: optimizer vs. Schmidt-basis value, and the perturbation squeeze.
inline TrialOutcome degenerate_schmidt_trial(const CoherenceMeasure& measure, int index, std::uint64_t seed) {
  Rng rng(seed);
  RealVector lambdas;
  std::string family;
  switch (index % 4) {
    case 0:
      lambdas = RealVector::Constant(2, 0.5);
      family = "bell";
      break;
    case 1:
      lambdas = RealVector::Constant(3, 1.0 / 3.0);
      family = "max_entangled_3";
      break;
    case 2:
      lambdas = RealVector(3);
      lambdas << 0.5, 0.25, 0.25;
      family = "half_quarter_quarter";
      break;
    default:
      lambdas = detail::degenerate_spectrum(rng.uniform() < 0.5 ? std::vector<int>{1, 2} : std::vector<int>{2, 1}, rng);
      family = "random_degenerate";
  }
  const int d = static_cast<int>(lambdas.size());
  const bool rotate = index >= 4;
  const Matrix ua = rotate ? haar_unitary(d, rng) : Matrix(Matrix::Identity(d, d));
  const Matrix ub = rotate ? haar_unitary(d, rng) : Matrix(Matrix::Identity(d, d));
  const double target = e_pure(measure, pure_from_schmidt(lambdas)).value;
  CminOptions co;
  co.seed = derive_seed(seed, 1);
  const double optimized = c_min(measure, DensityMatrix(pure_from_schmidt(lambdas, ua, ub)), co).value;

  TrialOutcome out;
  out.inputs = "{\"family\":\"" + family + "\",\"lambda\":" + detail::list(detail::to_std(lambdas)) + "}";
  out.checks.push_back(detail::check_eq("optimizer_matches_schmidt_value", optimized, target, 1e-5));
  double previous = std::numeric_limits<double>::infinity();
  for (double eps : perturbation_sequence()) {
    const Ket perturbed = pure_from_schmidt(perturb_spectrum(lambdas, eps), ua, ub);
    const double gap = std::abs(c_min(measure, DensityMatrix(perturbed), co).value - target);
    out.checks.push_back(detail::check_le("perturbation_monotone_eps_" + detail::fmt(eps), gap, previous, 1e-12));
    previous = gap;
  }
  out.checks.push_back(detail::check_le("perturbation_converged", previous, 0.0, 1e-3));
  return out;
}

struct WernerPoint {
  double p;
  bool separable;
};

inline std::vector<WernerPoint> werner_scan_points() {
  std::vector<WernerPoint> pts;
  for (int i = 0; i <= 20; ++i) pts.push_back({i * 0.05, i * 0.05 <= 1.0 / 3.0});
  pts.push_back({1.0 / 3.0, true});
  return pts;
}

inline TrialOutcome werner_trial(const CoherenceMeasure& measure, double p, bool separable, std::uint64_t seed) {
  const DensityMatrix rho = werner_state(p);
  TrialOutcome out;
  out.inputs = "{\"family\":\"werner\",\"p\":" + detail::fmt(p) + "}";
  const double ppt = ppt_min_eigenvalue(rho);
  out.checks.push_back(detail::check_eq("ppt_min_eigenvalue", ppt, (1.0 - 3.0 * p) / 4.0, 1e-10));
  out.checks.push_back(detail::check_true("ppt_matches_threshold", is_separable_ppt(rho) == separable));
  if (separable) {
    const DecompositionFit fit = find_separable_decomposition(rho, 6, seed);
    out.checks.push_back(detail::check_le("decomposition_residual", fit.residual, 0.0, 1e-7));
    if (fit.accepted) {
      ExtensionOptions eo;
      eo.decomposition = fit.decomposition;
      eo.search = false;
      out.checks.push_back(detail::check_le("decomposition_bound_zero", e_upper_bound(measure, rho, eo).value, 0.0, 1e-8));
    }
  } else if (p == 1.0 && (measure.id() == "l1" || measure.id() == "relent")) {
    out.checks.push_back(detail::check_eq("bell_endpoint", e_pure(measure, rho).value, 1.0, 1e-9));
  }
  return out;
}

inline TrialOutcome faithfulness_trial(const CoherenceMeasure& measure, int index, std::uint64_t seed, int n) {
  if (index >= n) {
    const auto pts = werner_scan_points();
    const auto& pt = pts.at(static_cast<std::size_t>(index - n));
    return werner_trial(measure, pt.p, pt.separable, seed);
  }
  Rng rng(seed);
  TrialOutcome out;
  if (index % 2 == 0) {
    const int terms = 1 + static_cast<int>(rng.index(4));
    const SeparableSample s = random_separable({2, 2}, terms, rng);
    ExtensionOptions eo;
    eo.decomposition = s.decomposition;
    eo.search = false;
    const BoundReport r = e_upper_bound(measure, s.state, eo);
    out.inputs = "{\"family\":\"separable\",\"terms\":" + std::to_string(terms) + "}";
    out.checks.push_back(detail::check_le("separable_bound_zero", r.value, 0.0, 1e-8));
    if (terms == 1) out.checks.push_back(detail::check_le("product_e_pure_zero", e_pure(measure, s.decomposition.states[0]).value, 0.0, 1e-8));
  } else {
    Ket psi = haar_ket({2, 2}, rng);
    int draws = 1;
    while (concurrence_2q(psi) <= 0.05) {
      psi = haar_ket({2, 2}, rng);
      ++draws;
    }
    out.inputs = "{\"family\":\"entangled_pure\",\"draws\":" + std::to_string(draws) + ",\"concurrence\":" +
                 detail::fmt(concurrence_2q(psi)) + "}";
    out.checks.push_back(detail::check_ge("entangled_positive", e_pure(measure, psi).value, 1e-3, 0.0));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Running and replay

inline const std::vector<std::string>& suite_ids() {
  static const std::vector<std::string> ids{"convexity", "monotonicity", "local_unitary", "degenerate_schmidt",
                                            "faithfulness"};
  return ids;
}

inline SuiteDefinition suite_definition(const std::string& id, int n) {
  if (id == "convexity") return {id, convexity_trial, {{"convexity", 1e-6}, {"identical", 1e-8}}, 0, 200};
  if (id == "monotonicity") return {id, monotonicity_trial, {{"monotonicity", 1e-8}}, 0, 500};
  if (id == "local_unitary") return {id, local_unitary_trial, {{"invariance", 1e-5}}, 0, 200};
  if (id == "degenerate_schmidt")
    return {id, degenerate_schmidt_trial, {{"optimizer", 1e-5}, {"perturbation_final", 1e-3}}, 0, 20};
  if (id == "faithfulness")
    return {id,
            [n](const CoherenceMeasure& m, int index, std::uint64_t seed) { return faithfulness_trial(m, index, seed, n); },
            {{"zero", 1e-8}, {"positive", 1e-3}, {"decomposition", 1e-7}, {"ppt", 1e-10}},
            static_cast<int>(werner_scan_points().size()),
            200};
  throw ArgumentError("unknown suite '" + id + "'");
}

inline int default_trials(const std::string& id) { return suite_definition(id, 0).default_n; }

inline std::uint64_t trial_seed(std::uint64_t suite_seed, int index) {
  return derive_seed(suite_seed, static_cast<std::uint64_t>(index));
}

/// Seed of a suite within a validation run: independent of which other suites run.
inline std::uint64_t suite_seed(std::uint64_t run_seed, const std::string& id) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : id) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
  return derive_seed(run_seed, h);
}

/// Runs n random trials plus any fixed trials of the suite. Trial i uses trial_seed(seed, i).
inline PropertySuiteReport run_suite(const std::string& id, const CoherenceMeasure& measure, int n, std::uint64_t seed) {
  if (n < 1) throw ArgumentError("suite needs n >= 1");
  const SuiteDefinition def = suite_definition(id, n);
  const auto start = std::chrono::steady_clock::now();
  PropertySuiteReport rep;
  rep.suite = id;
  rep.measure = std::string(measure.id());
  rep.seed = seed;
  rep.tolerances = def.tolerances;
  rep.trials = n + def.extra_trials;
  for (int i = 0; i < rep.trials; ++i) {
    const std::uint64_t s = trial_seed(seed, i);
    const TrialOutcome t = def.trial(measure, i, s);
    for (const Check& c : t.checks) {
      ++rep.checks;
      if (!c.passed) rep.failures.push_back({i, s, t.inputs, c});
    }
  }
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

/// Re-runs one trial from a failure record.
inline TrialOutcome replay(const std::string& id, const CoherenceMeasure& measure, int n, const FailureRecord& f) {
  return suite_definition(id, n).trial(measure, f.trial, f.seed);
}

inline PropertySuiteReport suite_convexity(const CoherenceMeasure& m, int n, std::uint64_t seed) {
  return run_suite("convexity", m, n, seed);
}
inline PropertySuiteReport suite_monotonicity_pure(const CoherenceMeasure& m, int n, std::uint64_t seed) {
  return run_suite("monotonicity", m, n, seed);
}
inline PropertySuiteReport suite_local_unitary_invariance(const CoherenceMeasure& m, int n, std::uint64_t seed) {
  return run_suite("local_unitary", m, n, seed);
}
inline PropertySuiteReport suite_degenerate_schmidt(const CoherenceMeasure& m, int n, std::uint64_t seed) {
  return run_suite("degenerate_schmidt", m, n, seed);
}
inline PropertySuiteReport suite_faithfulness(const CoherenceMeasure& m, int n, std::uint64_t seed) {
  return run_suite("faithfulness", m, n, seed);
}

}  // namespace corrcoh
