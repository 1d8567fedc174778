#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corrcoh/corrcoh.hpp"
#include "corrcoh/json_io.hpp"

using namespace corrcoh;
using io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string measure = "l1";
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";

  std::string state_path;
  std::string basis_path;
  std::string decomposition_path;

  double eps_deg = 1e-7;
  int restarts = 16;
  int max_iters = 8000;
  double tol = 1e-9;
  int max_ancilla_dim = 4;
  int bound_restarts = 4;
  std::string method = "extension";
  double classify_tol = 1e-6;

  std::vector<std::string> suites;
  int n = 0;

  std::string kind;
  std::vector<int> dims{2, 2};
  int rank = 0;
  int terms = 3;
  double p = 0.2;
};

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out);
  if (!f) throw ArgumentError("cannot write '" + cfg.out + "'");
  f << text;
}

CminOptions cmin_options(const RunConfig& cfg) {
  CminOptions o;
  o.eps_deg = cfg.eps_deg;
  o.restarts = cfg.restarts;
  o.max_iters = cfg.max_iters;
  o.tol = cfg.tol;
  o.seed = cfg.seed;
  return o;
}

ExtensionOptions extension_options(const RunConfig& cfg) {
  ExtensionOptions o;
  o.max_ancilla_dim = cfg.max_ancilla_dim;
  o.restarts = cfg.bound_restarts;
  o.seed = cfg.seed;
  o.cmin = cmin_options(cfg);
  if (!cfg.decomposition_path.empty()) o.decomposition = io::ensemble_from_json(io::read_file(cfg.decomposition_path));
  return o;
}

DensityMatrix load_state(const RunConfig& cfg) { return io::state_from_json(io::read_file(cfg.state_path)); }

LocalBasisPair load_bases(const RunConfig& cfg, const BipartiteView& v) {
  if (cfg.basis_path.empty()) return LocalBasisPair::computational(v.dim_a, v.dim_b);
  return io::basis_pair_from_json(io::read_file(cfg.basis_path));
}

int cmd_coherence(const RunConfig& cfg, const CoherenceMeasure& m, bool correlated) {
  const DensityMatrix rho = load_state(cfg);
  json j{{"measure", m.id()}};
  if (rho.factors() == 1) {
    if (correlated) throw ArgumentError("correlated coherence needs a bipartite state");
    j["C"] = m.in_reference_basis(rho.matrix());
    emit(cfg, io::dump(j));
    return kExitOk;
  }
  const BipartiteView v = bipartite_view(rho);
  const LocalBasisPair b = load_bases(cfg, v);
  if (b.alice.dim() != v.dim_a || b.bob.dim() != v.dim_b) throw ArgumentError("basis dimensions do not match the state");
  const double c = m.evaluate(v.matrix, b.product().matrix());
  const double ca = m.evaluate(marginal_a(v), b.alice.matrix());
  const double cb = m.evaluate(marginal_b(v), b.bob.matrix());
  if (correlated) j["value"] = correlated_coherence(m, rho, b);
  j["C"] = c;
  j["C_A"] = ca;
  j["C_B"] = cb;
  emit(cfg, io::dump(j));
  return kExitOk;
}

int cmd_cmin(const RunConfig& cfg, const CoherenceMeasure& m) {
  const CminResult r = c_min(m, load_state(cfg), cmin_options(cfg));
  json j = io::to_json(r, cfg.seed);
  j["measure"] = m.id();
  emit(cfg, io::dump(j));
  return kExitOk;
}

int cmd_entanglement(const RunConfig& cfg, const CoherenceMeasure& m) {
  const DensityMatrix rho = load_state(cfg);
  BoundReport r;
  if (rho.factors() == 2 && is_pure(rho, 1e-10)) {
    r = e_pure(m, rho);
    r.diagnostics.seed = cfg.seed;
  } else if (cfg.method == "roof") {
    RoofOptions ro;
    ro.restarts = cfg.bound_restarts;
    ro.seed = cfg.seed;
    r = e_convex_roof_estimate(m, rho, ro);
  } else {
    r = e_upper_bound(m, rho, extension_options(cfg));
  }
  json j = io::to_json(r);
  j["measure"] = m.id();
  emit(cfg, io::dump(j));
  return kExitOk;
}

int cmd_discord(const RunConfig& cfg, const CoherenceMeasure& m) {
  json j = io::to_json(d_c_upper_bound(m, load_state(cfg), extension_options(cfg)));
  j["measure"] = m.id();
  emit(cfg, io::dump(j));
  return kExitOk;
}

int cmd_classify(const RunConfig& cfg) {
  ClassifierOptions o;
  o.tol = cfg.classify_tol;
  o.eps_deg = cfg.eps_deg;
  o.restarts = cfg.restarts;
  o.seed = cfg.seed;
  emit(cfg, io::dump(io::to_json(classify(load_state(cfg), o))));
  return kExitOk;
}

int cmd_validate(const RunConfig& cfg, const std::vector<MeasurePtr>& measures) {
  std::vector<std::string> suites = cfg.suites.empty() ? suite_ids() : cfg.suites;
  std::vector<PropertySuiteReport> reports;
  for (const auto& m : measures)
    for (const auto& id : suites) reports.push_back(run_suite(id, *m, cfg.n > 0 ? cfg.n : default_trials(id), suite_seed(cfg.seed, id)));

  bool passed = true;
  std::ostringstream table;
  table << std::left << std::setw(20) << "suite" << std::setw(8) << "measure" << std::right << std::setw(8) << "trials"
        << std::setw(8) << "checks" << std::setw(10) << "failures" << std::setw(10) << "time_s" << "\n";
  for (const auto& r : reports) {
    passed = passed && r.passed();
    table << std::left << std::setw(20) << r.suite << std::setw(8) << r.measure << std::right << std::setw(8) << r.trials
          << std::setw(8) << r.checks << std::setw(10) << r.failures.size() << std::setw(10) << std::fixed
          << std::setprecision(2) << r.wall_time_s << "\n";
  }
  std::cerr << table.str();

  if (cfg.format == "csv") {
    std::ostringstream csv;
    csv << "suite,measure,seed,trials,checks,failures,passed\n";
    for (const auto& r : reports)
      csv << r.suite << "," << r.measure << "," << r.seed << "," << r.trials << "," << r.checks << ","
          << r.failures.size() << "," << (r.passed() ? "true" : "false") << "\n";
    emit(cfg, csv.str());
  } else {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(io::to_json(r));
    emit(cfg, io::dump(json{{"seed", cfg.seed}, {"passed", passed}, {"reports", std::move(arr)}}));
  }
  return passed ? kExitOk : kExitFailure;
}

int cmd_sample(const RunConfig& cfg) {
  Rng rng(cfg.seed);
  json j;
  if (cfg.kind == "haar_ket") {
    j = io::to_json(haar_ket(cfg.dims, rng));
  } else if (cfg.kind == "ginibre_mixed") {
    j = io::to_json(ginibre_mixed(cfg.dims, rng, cfg.rank));
  } else if (cfg.kind == "random_product_basis") {
    if (cfg.dims.size() != 2) throw ArgumentError("random_product_basis needs two dims");
    j = io::to_json(random_product_basis(cfg.dims[0], cfg.dims[1], rng));
  } else if (cfg.kind == "random_separable") {
    const SeparableSample s = random_separable(cfg.dims, cfg.terms, rng);
    j = {{"state", io::to_json(s.state)}, {"decomposition", io::to_json(s.decomposition)}};
  } else {
    const DensityMatrix rho = werner_state(cfg.p);
    j = {{"state", io::to_json(rho)}};
    if (is_separable_ppt(rho)) {
      const DecompositionFit fit = find_separable_decomposition(rho, 6, cfg.seed);
      if (fit.accepted) j["decomposition"] = io::to_json(fit.decomposition);
      j["decomposition_residual"] = fit.residual;
    }
  }
  emit(cfg, io::dump(j));
  return kExitOk;
}

void add_search_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--eps-deg", cfg.eps_deg, "Relative eigenvalue gap treated as degenerate")->capture_default_str();
  cmd->add_option("--restarts", cfg.restarts, "Random restarts of the basis search")->capture_default_str();
  cmd->add_option("--max-iters", cfg.max_iters, "Objective evaluations per local search")->capture_default_str();
  cmd->add_option("--tol", cfg.tol, "Stall tolerance of the local search")->capture_default_str();
}

void add_bound_flags(CLI::App* cmd, RunConfig& cfg) {
  add_search_flags(cmd, cfg);
  cmd->add_option("--max-ancilla-dim", cfg.max_ancilla_dim, "Largest ancilla factor dimension searched")
      ->capture_default_str();
  cmd->add_option("--bound-restarts", cfg.bound_restarts, "Random restarts of the ensemble search")
      ->capture_default_str();
  cmd->add_option("--decomposition", cfg.decomposition_path, "Ensemble JSON decomposing the input state");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlated-coherence quantifiers for bipartite quantum states"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  app.add_option("--measure", cfg.measure, "Coherence measure id (l1, relent)")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  app.add_option("--out", cfg.out, "Write output to this file instead of stdout");
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  auto state_arg = [&](CLI::App* cmd) { cmd->add_option("state", cfg.state_path, "State JSON file")->required(); };

  CLI::App* coherence = app.add_subcommand("coherence", "Coherence of a state and its marginals");
  state_arg(coherence);
  coherence->add_option("--basis", cfg.basis_path, "Local basis pair JSON (default computational)");
  CLI::App* corr = app.add_subcommand("corrcoh", "Correlated coherence in a local basis pair");
  state_arg(corr);
  corr->add_option("--basis", cfg.basis_path, "Local basis pair JSON (default computational)");
  CLI::App* cmin = app.add_subcommand("cmin", "Minimum correlated coherence over marginal eigenbases");
  state_arg(cmin);
  add_search_flags(cmin, cfg);
  CLI::App* ent = app.add_subcommand("entanglement", "Coherence-based entanglement (exact for pure states)");
  state_arg(ent);
  add_bound_flags(ent, cfg);
  ent->add_option("--method", cfg.method, "Mixed-state bound: symmetric extensions or convex roof")
      ->check(CLI::IsMember({"extension", "roof"}))
      ->capture_default_str();
  CLI::App* disc = app.add_subcommand("discord", "Discord-like quantifier from Bob-side extensions");
  state_arg(disc);
  add_bound_flags(disc, cfg);
  CLI::App* cls = app.add_subcommand("classify", "Classical-classical / classical-quantum test");
  state_arg(cls);
  add_search_flags(cls, cfg);
  cls->add_option("--classify-tol", cfg.classify_tol, "Residual accepted as zero")->capture_default_str();
  CLI::App* val = app.add_subcommand("validate", "Run property suites");
  val->add_option("--suites", cfg.suites, "Suite ids (default all)")->delimiter(',');
  val->add_option("--n", cfg.n, "Random trials per suite (default: per-suite)");
  CLI::App* smp = app.add_subcommand("sample", "Draw a random state or basis");
  smp->add_option("kind", cfg.kind, "haar_ket | ginibre_mixed | random_product_basis | random_separable | werner")
      ->required()
      ->check(CLI::IsMember({"haar_ket", "ginibre_mixed", "random_product_basis", "random_separable", "werner"}));
  smp->add_option("--dims", cfg.dims, "Subsystem dimensions")->delimiter(',')->capture_default_str();
  smp->add_option("--rank", cfg.rank, "Ginibre rank (0 = full)")->capture_default_str();
  smp->add_option("--terms", cfg.terms, "Product terms of random_separable")->capture_default_str();
  smp->add_option("--p", cfg.p, "Werner parameter")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    std::vector<MeasurePtr> measures;
    try {
      if (val->parsed() && app.count("--measure") == 0) {
        for (const auto& id : measure_ids()) measures.push_back(measure_by_id(id));
      } else {
        measures.push_back(measure_by_id(cfg.measure));
      }
    } catch (const ArgumentError& e) {
      throw UsageError(e.what());
    }
    if (cfg.format == "csv" && !val->parsed()) throw UsageError("csv output is only available for validate");
    for (const auto& s : cfg.suites)
      if (std::find(suite_ids().begin(), suite_ids().end(), s) == suite_ids().end())
        throw UsageError("unknown suite '" + s + "'");
    if (val->parsed() && cfg.n < 0) throw UsageError("--n must be positive");

    const CoherenceMeasure& m = *measures.front();
    if (coherence->parsed()) return cmd_coherence(cfg, m, false);
    if (corr->parsed()) return cmd_coherence(cfg, m, true);
    if (cmin->parsed()) return cmd_cmin(cfg, m);
    if (ent->parsed()) return cmd_entanglement(cfg, m);
    if (disc->parsed()) return cmd_discord(cfg, m);
    if (cls->parsed()) return cmd_classify(cfg);
    if (val->parsed()) return cmd_validate(cfg, measures);
    return cmd_sample(cfg);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
  } catch (const SearchError& e) {
    std::cerr << "search error: " << e.what() << "\n";
  } catch (const SizeError& e) {
    std::cerr << "size error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitFailure;
}
