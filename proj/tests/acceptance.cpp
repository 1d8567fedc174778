// Acceptance gate: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "corrcoh/corrcoh.hpp"

using namespace corrcoh;

namespace {

using Clock = std::chrono::steady_clock;

const L1Coherence kL1;
const RelativeEntropyCoherence kRel;
const std::array<const CoherenceMeasure*, 2> kMeasures{&kL1, &kRel};

struct Outcome {
  bool passed = true;
  std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << v;
  return s.str();
}

// Smallest relative gap between neighbouring Schmidt coefficients.
double min_relative_gap(const RealVector& l) {
  double g = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i + 1 < l.size(); ++i) g = std::min(g, (l(i) - l(i + 1)) / l(0));
  return g;
}

std::string suite_summary(const PropertySuiteReport& r) {
  return r.suite + "/" + r.measure + " " + std::to_string(r.trials) + " trials " + std::to_string(r.failures.size()) +
         " failures";
}

std::string first_failure(const PropertySuiteReport& r) {
  if (r.failures.empty()) return "";
  const FailureRecord& f = r.failures.front();
  return " [first: trial " + std::to_string(f.trial) + " seed " + std::to_string(f.seed) + " " + f.check.name +
         " observed " + num(f.check.observed) + " required " + num(f.check.required) + "]";
}

Outcome criterion1() {
  const Ket bell = bell_state();
  const auto t = Clock::now();
  const double l1 = e_pure(kL1, bell).value;
  const double rel = e_pure(kRel, bell).value;
  const double dt = seconds_since(t);
  const bool ok = std::abs(l1 - 1.0) <= 1e-9 && std::abs(rel - 1.0) <= 1e-9 && dt < 1e-3;
  return {ok, "l1 " + num(l1) + ", relent " + num(rel) + ", " + num(dt * 1e3) + " ms"};
}

Outcome criterion2() {
  Rng rng(2024);
  double worst = 0.0;
  int count = 0;
  auto run = [&](int d, int n) {
    for (int i = 0; i < n;) {
      const Ket psi = haar_ket({d, d}, rng);
      const SchmidtForm sf = schmidt_decompose(psi);
      if (min_relative_gap(sf.coefficients) < 1e-3) continue;
      const DensityMatrix rho(psi);
      for (const CoherenceMeasure* m : kMeasures) {
        const double schmidt_value = correlated_coherence(*m, rho, sf.bases());
        worst = std::max(worst, std::abs(c_min(*m, rho).value - schmidt_value));
      }
      ++i;
      ++count;
    }
  };
  const auto t = Clock::now();
  run(2, 500);
  run(3, 100);
  const double dt = seconds_since(t);
  return {worst <= 1e-6 && dt < 60.0, std::to_string(count) + " states, max deviation " + num(worst) + ", " + num(dt) + " s"};
}

Outcome criterion3() {
  const auto t = Clock::now();
  Outcome o;
  for (const CoherenceMeasure* m : kMeasures) {
    const PropertySuiteReport r = suite_degenerate_schmidt(*m, 50, suite_seed(42, "degenerate_schmidt"));
    o.passed = o.passed && r.passed();
    o.detail += suite_summary(r) + first_failure(r) + "; ";
  }
  const double dt = seconds_since(t);
  o.passed = o.passed && dt < 60.0;
  o.detail += num(dt) + " s";
  return o;
}

Outcome criterion4() {
  Rng rng(4);
  double dev_l1 = 0.0, dev_rel = 0.0;
  for (int i = 0; i < 500; ++i) {
    const Ket psi = haar_ket({2, 2}, rng);
    dev_l1 = std::max(dev_l1, std::abs(e_l1_pure_closed_form(schmidt_decompose(psi)) - concurrence_2q(psi)));
    dev_rel = std::max(dev_rel, std::abs(e_pure(kRel, psi).value - entropy_of_entanglement(psi)));
  }
  return {dev_l1 <= 1e-8 && dev_rel <= 1e-8, "l1 vs concurrence " + num(dev_l1) + ", relent vs entropy " + num(dev_rel)};
}

Outcome criterion5() {
  Outcome o;
  // 400 random trials: even indices separable with decomposition, odd indices entangled pure.
  for (const CoherenceMeasure* m : kMeasures) {
    const PropertySuiteReport r = suite_faithfulness(*m, 400, suite_seed(42, "faithfulness"));
    o.passed = o.passed && r.passed();
    o.detail += suite_summary(r) + first_failure(r) + "; ";
  }
  // PPT boundary of the Werner family sits at p = 1/3.
  bool boundary = is_separable_ppt(werner_state(1.0 / 3.0)) && !is_separable_ppt(werner_state(1.0 / 3.0 + 1e-6));
  for (const WernerPoint& w : werner_scan_points())
    boundary = boundary && (is_separable_ppt(werner_state(w.p)) == (w.p <= 1.0 / 3.0 + 1e-15));
  o.passed = o.passed && boundary;
  o.detail += std::string("PPT boundary ") + (boundary ? "at 1/3" : "misplaced");
  return o;
}

Outcome criterion6() {
  const auto t = Clock::now();
  Outcome o;
  for (const CoherenceMeasure* m : kMeasures) {
    const PropertySuiteReport r = suite_monotonicity_pure(*m, 1000, suite_seed(42, "monotonicity"));
    o.passed = o.passed && r.passed();
    o.detail += suite_summary(r) + first_failure(r) + "; ";
  }
  const double dt = seconds_since(t);
  o.passed = o.passed && dt < 30.0;
  o.detail += num(dt) + " s";
  return o;
}

Outcome criterion7() {
  Outcome o;
  for (const CoherenceMeasure* m : kMeasures) {
    const PropertySuiteReport r = suite_convexity(*m, 500, suite_seed(42, "convexity"));
    o.passed = o.passed && r.passed();
    o.detail += suite_summary(r) + first_failure(r) + "; ";
  }
  return o;
}

// Classical-classical: diagonal in a random product basis. Every fourth state has rho_A = I/2,
// so the product basis has to be found by search.
DensityMatrix make_cc(int i, int db, Rng& rng) {
  const LocalBasisPair b = random_product_basis(2, db, rng);
  const Matrix u = b.product().matrix();
  std::vector<double> w = random_simplex(static_cast<std::size_t>(2 * db), rng);
  if (i % 4 == 0) {
    const std::vector<double> w0 = random_simplex(static_cast<std::size_t>(db), rng);
    const std::vector<double> w1 = random_simplex(static_cast<std::size_t>(db), rng);
    for (int j = 0; j < db; ++j) {
      w[static_cast<std::size_t>(j)] = 0.5 * w0[static_cast<std::size_t>(j)];
      w[static_cast<std::size_t>(db + j)] = 0.5 * w1[static_cast<std::size_t>(j)];
    }
  }
  Matrix d = Matrix::Zero(2 * db, 2 * db);
  for (int k = 0; k < 2 * db; ++k) d(k, k) = w[static_cast<std::size_t>(k)];
  return DensityMatrix(u * d * u.adjoint(), {2, db});
}

// Classical-quantum with non-commuting conditional Bob states; every fourth has rho_A = I/2.
DensityMatrix make_cq(int i, int db, Rng& rng) {
  const Matrix ua = haar_unitary(2, rng);
  const double p = i % 4 == 0 ? 0.5 : 0.2 + 0.25 * rng.uniform();
  const DensityMatrix r0 = ginibre_mixed({db}, rng), r1 = ginibre_mixed({db}, rng);
  const Matrix a0 = ua.col(0) * ua.col(0).adjoint(), a1 = ua.col(1) * ua.col(1).adjoint();
  return DensityMatrix(p * kron(a0, r0.matrix()) + (1 - p) * kron(a1, r1.matrix()), {2, db});
}

// Entangled: Haar pure states, PPT-violating Ginibre states, and maximally entangled states.
DensityMatrix make_entangled(int i, Rng& rng) {
  if (i % 10 == 0) return DensityMatrix(apply_local_unitary(bell_state(), haar_unitary(2, rng), haar_unitary(2, rng)));
  for (;;) {
    if (i % 2 == 0) {
      const Ket psi = haar_ket({2, 2}, rng);
      if (concurrence_2q(psi) > 0.05) return DensityMatrix(psi);
    } else {
      const DensityMatrix rho = ginibre_mixed({2, 2}, rng, 2);
      if (ppt_min_eigenvalue(rho) < -1e-3) return rho;
    }
  }
}

Outcome criterion8() {
  Rng rng(8);
  int correct = 0, replayed = 0, total = 0;
  std::string wrong;
  auto check = [&](const DensityMatrix& rho, Correlation expected, const char* kind, int i) {
    ++total;
    ClassifierOptions opt;
    opt.seed = static_cast<std::uint64_t>(i);
    const Classification c = classify(rho, opt);
    if (c.label == expected) ++correct;
    else if (wrong.empty()) wrong = std::string(" [first miss: ") + kind + " #" + std::to_string(i) + " -> " + to_string(c.label) + "]";
    const double cc_replay = correlated_coherence(kL1, rho, c.cc.witness);
    const double cq_replay = cq_residual(rho, c.cq.witness);
    if (std::abs(cc_replay - c.cc.value) <= 1e-9 && std::abs(cq_replay - c.cq.residual) <= 1e-12) ++replayed;
  };
  for (int i = 0; i < 100; ++i) check(make_cc(i, 2 + i % 2, rng), Correlation::classical_classical, "CC", i);
  for (int i = 0; i < 100; ++i) check(make_cq(i, 2 + i % 2, rng), Correlation::classical_quantum, "CQ", i);
  for (int i = 0; i < 100; ++i) check(make_entangled(i, rng), Correlation::neither, "entangled", i);
  return {correct == total && replayed == total,
          std::to_string(correct) + "/" + std::to_string(total) + " labels, " + std::to_string(replayed) + "/" +
              std::to_string(total) + " witnesses replay" + wrong};
}

Outcome criterion9() {
  Rng rng(9);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Ket psi = haar_ket({2 + i % 2, 2 + (i / 2) % 2}, rng);
    const DensityMatrix rho(psi);
    for (const CoherenceMeasure* m : kMeasures) {
      const double c = c_min(*m, rho).value, d = d_c_upper_bound(*m, rho).value, e = e_pure(*m, psi).value;
      worst = std::max({worst, std::abs(c - d), std::abs(c - e), std::abs(d - e)});
    }
  }
  return {worst <= 1e-8, "100 states, max pairwise deviation " + num(worst)};
}

std::pair<int, std::string> capture(const std::string& cmd) {
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  std::array<char, 8192> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

Outcome criterion10() {
  const std::string cmd = std::string(CORRCOH_CLI) + " validate --seed 42";
  const auto a = capture(cmd), b = capture(cmd);
  const bool same = a.second == b.second && !a.second.empty();
  return {same && a.first == 0 && b.first == 0,
          std::string(same ? "identical" : "different") + " output (" + std::to_string(a.second.size()) + " bytes), exit " +
              std::to_string(a.first) + "/" + std::to_string(b.first)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Bell benchmark", criterion1},
      {"nondegenerate pure states", criterion2},
      {"degenerate Schmidt spectra", criterion3},
      {"oracle equivalence", criterion4},
      {"faithfulness", criterion5},
      {"monotonicity on majorization pairs", criterion6},
      {"convexity", criterion7},
      {"classifier accuracy", criterion8},
      {"pure-state convergence", criterion9},
      {"determinism of validate", criterion10},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.passed;
    std::cout << "criterion " << std::setw(2) << i + 1 << ": " << (o.passed ? "PASS" : "FAIL") << "  " << criteria[i].first
              << ": " << o.detail << " (" << num(seconds_since(t)) << " s)" << std::endl;
  }
  return all ? 0 : 1;
}
