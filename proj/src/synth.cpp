#include "mvpc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mvpc/config.hpp"
#include "mvpc/rng.hpp"

namespace mvpc {

// --- model validation ---------------------------------------------------------

void SemSpec::validate() const {
  int p = dag.node_count();
  if (static_cast<int>(noise_sd.size()) != p)
    throw std::invalid_argument("one noise sd per node required");
  for (double sd : noise_sd)
    if (!(sd > 0.0)) throw std::invalid_argument("noise sd must be positive");
  for (const auto& [edge, coef] : coefficients) {
    if (!dag.has_edge(edge.first, edge.second))
      throw std::invalid_argument("coefficient on a non-edge");
    if (!std::isfinite(coef)) throw std::invalid_argument("non-finite coefficient");
  }
  for (const Edge& e : dag.edges())
    if (!coefficients.count({e.from, e.to}))
      throw std::invalid_argument("edge without coefficient");
}

void MissSpec::validate(int column_count) const {
  if (!(target_rate >= 0.0) || !(target_rate < 1.0))
    throw std::invalid_argument("target missing rate must lie in [0, 1)");
  std::set<int> seen;
  for (const MissIndicator& ind : indicators) {
    if (ind.var < 0 || ind.var >= column_count)
      throw std::invalid_argument("masked variable out of range");
    if (!seen.insert(ind.var).second)
      throw std::invalid_argument("variable masked twice");
    if (ind.parents.size() != ind.slopes.size())
      throw std::invalid_argument("one slope per indicator parent required");
    for (int q : ind.parents) {
      if (q < 0 || q >= column_count)
        throw std::invalid_argument("indicator parent out of range");
      if (q == ind.var)
        throw std::invalid_argument("self-masking rejected");
    }
  }
}

// --- generators -----------------------------------------------------------------

Dag random_dag(int p, double expected_degree, int min_colliders, std::uint64_t seed) {
  if (p < 2) throw std::invalid_argument("need at least two nodes");
  if (!(expected_degree > 0.0) || expected_degree > p - 1)
    throw std::invalid_argument("expected degree must lie in (0, p-1]");
  if (min_colliders < 0) throw std::invalid_argument("negative collider count");

  const double q = expected_degree / (p - 1);
  Rng rng(derive_seed(seed, "random_dag"));
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<int> order = rng.permutation(p);
    Dag g(p);
    for (int i = 0; i < p; ++i)
      for (int j = i + 1; j < p; ++j)
        if (rng.bernoulli(q)) g.add_edge(order[i], order[j]);
    if (static_cast<int>(g.unshielded_colliders().size()) >= min_colliders)
      return g;
  }
  throw std::runtime_error(
      "could not generate a DAG with the requested collider count");
}

SemSpec random_sem(Dag dag, double coef_lo, double coef_hi, std::uint64_t seed) {
  if (!(coef_lo > 0.0) || !(coef_hi >= coef_lo))
    throw std::invalid_argument("coefficient band must satisfy 0 < lo <= hi");
  SemSpec spec;
  spec.noise_sd.assign(dag.node_count(), 1.0);
  Rng rng(derive_seed(seed, "random_sem"));
  for (const Edge& e : dag.edges()) {
    double mag = rng.uniform(coef_lo, coef_hi);
    double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
    spec.coefficients[{e.from, e.to}] = sign * mag;
  }
  spec.dag = std::move(dag);
  return spec;
}

Dataset sample_sem(const SemSpec& spec, int n, std::uint64_t seed) {
  spec.validate();
  if (n < 0) throw std::invalid_argument("negative sample size");
  const int p = spec.dag.node_count();
  Dataset d(spec.dag.labels(), n);
  Rng rng(derive_seed(seed, "sample_sem"));
  std::vector<std::vector<double>> cols(p, std::vector<double>(n));
  for (int v : spec.dag.topological_order()) {
    const auto& parents = spec.dag.parents(v);
    std::vector<double> coefs(parents.size());
    for (size_t i = 0; i < parents.size(); ++i)
      coefs[i] = spec.coefficients.at({parents[i], v});
    const double sd = spec.noise_sd[v];
    for (int r = 0; r < n; ++r) {
      double val = sd * rng.normal();
      for (size_t i = 0; i < parents.size(); ++i)
        val += coefs[i] * cols[parents[i]][r];
      cols[v][r] = val;
    }
  }
  for (int c = 0; c < p; ++c)
    for (int r = 0; r < n; ++r) d.set_value(r, c, cols[c][r]);
  return d;
}

namespace {

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// Intercept such that the mean masking probability over the pilot scores
// matches the target rate. The mean is monotone in the intercept, so plain
// bisection converges.
double calibrate_intercept(const std::vector<double>& pilot_scores, double rate) {
  double lo = -40.0, hi = 40.0;
  for (int iter = 0; iter < 100; ++iter) {
    double mid = 0.5 * (lo + hi);
    double mean = 0.0;
    for (double s : pilot_scores) mean += logistic(mid + s);
    mean /= static_cast<double>(pilot_scores.size());
    if (std::fabs(mean - rate) < 1e-4) return mid;
    (mean < rate ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Dataset inject_missingness(const Dataset& d, const MissSpec& spec, std::uint64_t seed) {
  spec.validate(d.cols());
  for (int c = 0; c < d.cols(); ++c)
    if (d.column_has_missing(c))
      throw std::invalid_argument("missingness injection needs fully observed data");

  Dataset out = d;
  const int n = d.rows();
  const int pilot = std::min(n, 10000);

  // Sorted by masked variable so the draw order is reproducible.
  std::vector<const MissIndicator*> order;
  for (const MissIndicator& ind : spec.indicators) order.push_back(&ind);
  std::sort(order.begin(), order.end(),
            [](const MissIndicator* a, const MissIndicator* b) { return a->var < b->var; });

  for (const MissIndicator* ind : order) {
    if (spec.target_rate == 0.0 && std::isnan(ind->intercept)) continue;

    std::vector<double> score(n, 0.0);
    for (size_t j = 0; j < ind->parents.size(); ++j) {
      const double* col = d.column_data(ind->parents[j]);
      const double slope = ind->slopes[j];
      for (int r = 0; r < n; ++r) score[r] += slope * col[r];
    }
    double intercept = ind->intercept;
    if (std::isnan(intercept)) {
      std::vector<double> pilot_scores(score.begin(), score.begin() + pilot);
      intercept = calibrate_intercept(pilot_scores, spec.target_rate);
    }

    Rng rng(derive_seed(seed, "inject", static_cast<std::uint64_t>(ind->var)));
    for (int r = 0; r < n; ++r)
      if (rng.uniform01() <= logistic(intercept + score[r])) out.set_missing(r, ind->var);
  }
  return out;
}

MGraph mgraph_of(const Dag& dag, const MissSpec& miss) {
  miss.validate(dag.node_count());
  std::map<int, std::vector<int>> parents;
  for (const MissIndicator& ind : miss.indicators) parents[ind.var] = ind.parents;
  return MGraph(dag, std::move(parents));
}

// --- suite generation -----------------------------------------------------------

int SuiteConfig::effective_vm_min() const {
  if (vm_min >= 0) return vm_min;
  if (p == 20) return 6;
  if (p == 50) return 10;
  return std::max(1, (3 * p + 9) / 10);
}

int SuiteConfig::effective_vm_max() const {
  if (vm_max >= 0) return vm_max;
  if (p == 20) return 10;
  if (p == 50) return 14;
  return std::max(1, p / 2);
}

void SuiteConfig::validate() const {
  if (p < 4) throw std::invalid_argument("suite needs at least 4 variables");
  if (sample_sizes.empty()) throw std::invalid_argument("no sample sizes given");
  for (int n : sample_sizes)
    if (n < 10) throw std::invalid_argument("sample size too small");
  if (mechanisms.empty()) throw std::invalid_argument("no mechanisms given");
  if (replicates < 1) throw std::invalid_argument("need at least one replicate");
  int lo = effective_vm_min(), hi = effective_vm_max();
  if (lo < 1 || hi < lo || hi >= p)
    throw std::invalid_argument("partially observed count range invalid");
  if (!(missing_rate >= 0.0) || !(missing_rate < 1.0))
    throw std::invalid_argument("missing rate must lie in [0, 1)");
  if (!(coef_lo > 0.0) || !(coef_hi >= coef_lo))
    throw std::invalid_argument("coefficient band invalid");
  if (!(slope > 0.0)) throw std::invalid_argument("indicator slope must be positive");
}

namespace {

// Missingness wiring for one replicate. The masked-variable set is chosen so
// that deletion bias actually arises: for several unshielded colliders
// a -> c <- b, one leg becomes partially observed with the collider as the
// direct cause of its missingness (the canonical bias pattern). Under MAR the
// collider stays fully observed; under MNAR it is masked as well, with its
// own missingness caused by its collider parents. Remaining masked variables
// are filled in at random with mechanism-appropriate parents.
MissSpec design_missingness(const Dag& dag, MGraph::Mechanism mech, int vm_count,
                            double rate, double slope, Rng& rng) {
  const int p = dag.node_count();
  MissSpec spec;
  spec.target_rate = rate;
  if (vm_count == 0) return spec;

  std::set<int> vm;
  std::set<int> forced_observed;
  std::map<int, std::vector<int>> parent_of;

  if (mech != MGraph::Mechanism::MCAR) {
    auto colliders = dag.unshielded_colliders();
    std::vector<int> idx(colliders.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    rng.shuffle(idx);

    int want = mech == MGraph::Mechanism::MAR ? std::max(1, vm_count / 2)
                                              : std::max(1, vm_count / 3);
    int wired = 0;
    for (int i : idx) {
      if (wired >= want) break;
      auto [a, c, b] = colliders[i];
      if (mech == MGraph::Mechanism::MAR) {
        if (vm.count(c) || static_cast<int>(vm.size()) >= vm_count) continue;
        int leg = rng.bernoulli(0.5) ? a : b;
        int alt = leg == a ? b : a;
        if (vm.count(leg) || forced_observed.count(leg)) std::swap(leg, alt);
        if (vm.count(leg) || forced_observed.count(leg)) continue;
        vm.insert(leg);
        forced_observed.insert(c);
        parent_of[leg] = {c};
      } else {  // MNAR: both the leg and the collider get masked
        if (static_cast<int>(vm.size()) + 2 > vm_count) break;
        if (forced_observed.count(c)) continue;
        int leg = rng.bernoulli(0.5) ? a : b;
        int alt = leg == a ? b : a;
        if (vm.count(leg)) std::swap(leg, alt);
        if (vm.count(leg)) continue;
        bool c_fresh = !vm.count(c);
        if (!c_fresh && static_cast<int>(vm.size()) + 1 > vm_count) continue;
        vm.insert(leg);
        vm.insert(c);
        parent_of[leg] = {c};
        if (!parent_of.count(c)) parent_of[c] = {a, b};
      }
      ++wired;
    }
  }

  // Fill the remaining slots at random.
  std::vector<int> pool;
  for (int v = 0; v < p; ++v)
    if (!vm.count(v) && !forced_observed.count(v)) pool.push_back(v);
  rng.shuffle(pool);
  for (int v : pool) {
    if (static_cast<int>(vm.size()) >= vm_count) break;
    vm.insert(v);
  }

  // Parents for the unwired masked variables.
  for (int v : vm) {
    if (parent_of.count(v)) continue;
    if (mech == MGraph::Mechanism::MCAR) {
      parent_of[v] = {};
      continue;
    }
    std::vector<int> eligible;
    if (mech == MGraph::Mechanism::MAR) {
      for (int u = 0; u < p; ++u)
        if (!vm.count(u)) eligible.push_back(u);
    } else {
      for (int u : vm)
        if (u != v) eligible.push_back(u);
    }
    if (eligible.empty()) {
      parent_of[v] = {};
    } else {
      parent_of[v] = {eligible[rng.uniform_int(0, static_cast<int>(eligible.size()) - 1)]};
    }
  }

  for (int v : vm) {
    MissIndicator ind;
    ind.var = v;
    ind.parents = parent_of[v];
    std::sort(ind.parents.begin(), ind.parents.end());
    for (size_t j = 0; j < ind.parents.size(); ++j)
      ind.slopes.push_back(rng.bernoulli(0.5) ? slope : -slope);
    spec.indicators.push_back(std::move(ind));
  }
  return spec;
}

}  // namespace

Suite make_benchmark_suite(const SuiteConfig& config) {
  config.validate();
  Suite suite;
  suite.config = config;

  for (size_t mi = 0; mi < config.mechanisms.size(); ++mi) {
    MGraph::Mechanism mech = config.mechanisms[mi];
    for (int rep = 0; rep < config.replicates; ++rep) {
      std::uint64_t cell_seed =
          derive_seed(config.seed, "cell", static_cast<std::uint64_t>(mech),
                      static_cast<std::uint64_t>(rep));

      // Rejection loop: the wiring can occasionally fail to realize the
      // requested mechanism (e.g. too few usable colliders); redraw the graph.
      Dag dag;
      SemSpec sem;
      MissSpec miss;
      bool ok = false;
      for (int attempt = 0; attempt < 200 && !ok; ++attempt) {
        std::uint64_t try_seed = derive_seed(cell_seed, "attempt",
                                             static_cast<std::uint64_t>(attempt));
        dag = random_dag(config.p, config.expected_degree, config.min_colliders,
                         try_seed);
        sem = random_sem(dag, config.coef_lo, config.coef_hi, try_seed);
        Rng wiring_rng(derive_seed(try_seed, "wiring"));
        int vm_count = static_cast<int>(Rng(derive_seed(try_seed, "vm_count"))
                                            .uniform_int(config.effective_vm_min(),
                                                         config.effective_vm_max()));
        if (config.missing_rate == 0.0) {
          // A zero rate makes the mechanism vacuous: fully observed suite.
          miss = MissSpec{};
          miss.target_rate = 0.0;
          ok = true;
          continue;
        }
        miss = design_missingness(dag, mech, vm_count, config.missing_rate,
                                  config.slope, wiring_rng);
        if (static_cast<int>(miss.indicators.size()) != vm_count) continue;
        ok = mgraph_of(dag, miss).classify() == mech;
      }
      if (!ok)
        throw std::runtime_error("could not realize the requested missingness "
                                 "mechanism; try a different seed");

      for (int n : config.sample_sizes) {
        SuiteInstance inst;
        inst.mechanism = mech;
        inst.p = config.p;
        inst.n = n;
        inst.replicate = rep;
        inst.truth = mgraph_of(dag, miss);
        std::uint64_t data_seed =
            derive_seed(cell_seed, "data", static_cast<std::uint64_t>(n));
        inst.complete = sample_sem(sem, n, data_seed);
        inst.masked = inject_missingness(inst.complete, miss,
                                         derive_seed(cell_seed, "mask",
                                                     static_cast<std::uint64_t>(n)));
        std::ostringstream name;
        name << "inst_" << mechanism_name(mech) << "_n" << n << "_r" << rep;
        inst.name = name.str();
        suite.instances.push_back(std::move(inst));
      }
    }
  }
  return suite;
}

MGraph::Mechanism mechanism_from_name(const std::string& name) {
  if (name == "MCAR" || name == "mcar") return MGraph::Mechanism::MCAR;
  if (name == "MAR" || name == "mar") return MGraph::Mechanism::MAR;
  if (name == "MNAR" || name == "mnar") return MGraph::Mechanism::MNAR;
  throw std::invalid_argument("unknown missingness mechanism: " + name);
}

// --- suite files ------------------------------------------------------------------

void write_suite(const Suite& suite, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  std::ostringstream man;
  man << suite_config_text(suite.config, "suite.");
  man << "suite.instance_count = " << suite.instances.size() << "\n";
  for (size_t i = 0; i < suite.instances.size(); ++i) {
    const SuiteInstance& inst = suite.instances[i];
    std::string base = inst.name;
    man << "instance." << i << ".name = " << base << "\n";
    man << "instance." << i << ".mechanism = " << mechanism_name(inst.mechanism) << "\n";
    man << "instance." << i << ".p = " << inst.p << "\n";
    man << "instance." << i << ".n = " << inst.n << "\n";
    man << "instance." << i << ".replicate = " << inst.replicate << "\n";
    man << "instance." << i << ".masked = " << base << ".csv\n";
    man << "instance." << i << ".complete = " << base << "_complete.csv\n";
    man << "instance." << i << ".truth = " << base << "_truth.txt\n";

    std::ostringstream masked_list, parents_list;
    bool first = true;
    for (int v : inst.truth.partially_observed()) {
      if (!first) masked_list << ",";
      masked_list << inst.truth.dag().label(v);
      if (!first) parents_list << "|";
      parents_list << inst.truth.dag().label(v) << ":";
      const auto& pa = inst.truth.indicator_parents(v);
      for (size_t j = 0; j < pa.size(); ++j) {
        if (j) parents_list << ",";
        parents_list << inst.truth.dag().label(pa[j]);
      }
      first = false;
    }
    man << "instance." << i << ".partially_observed = " << masked_list.str() << "\n";
    man << "instance." << i << ".indicator_parents = " << parents_list.str() << "\n";

    fs::path root(dir);
    write_csv(inst.masked, (root / (base + ".csv")).string());
    write_csv(inst.complete, (root / (base + "_complete.csv")).string());
    write_text_file((root / (base + "_truth.txt")).string(),
                    to_edge_list(inst.truth.dag()));
  }
  write_text_file((fs::path(dir) / "manifest.txt").string(), man.str());
}

Suite load_suite(const std::string& dir) {
  namespace fs = std::filesystem;
  const std::string man_path = (fs::path(dir) / "manifest.txt").string();
  KeyValues kv = parse_config(read_text_file(man_path), man_path);

  std::vector<std::string> known{"suite.instance_count", "instance."};
  for (const std::string& key : suite_config_keys())
    known.push_back("suite." + key);
  require_known_keys(kv, known);

  Suite suite;
  suite.config = suite_config_from(kv, "suite.");
  int count = config_int(kv, "suite.instance_count", -1);
  if (count < 0) throw std::runtime_error(man_path + ": missing suite.instance_count");

  for (int i = 0; i < count; ++i) {
    std::string pre = "instance." + std::to_string(i) + ".";
    SuiteInstance inst;
    inst.name = config_string(kv, pre + "name", "");
    if (inst.name.empty())
      throw std::runtime_error(man_path + ": missing " + pre + "name");
    inst.mechanism = mechanism_from_name(config_string(kv, pre + "mechanism", ""));
    inst.p = config_int(kv, pre + "p", 0);
    inst.n = config_int(kv, pre + "n", 0);
    inst.replicate = config_int(kv, pre + "replicate", 0);

    fs::path root(dir);
    inst.masked = load_csv((root / config_string(kv, pre + "masked", "")).string());
    inst.complete =
        load_csv((root / config_string(kv, pre + "complete", "")).string());
    Dag dag = dag_from_edge_list(
        read_text_file((root / config_string(kv, pre + "truth", "")).string()),
        inst.masked.labels());

    std::map<int, std::vector<int>> ind_parents;
    std::string parents_text = config_string(kv, pre + "indicator_parents", "");
    std::istringstream ps(parents_text);
    std::string entry;
    while (std::getline(ps, entry, '|')) {
      if (entry.empty()) continue;
      size_t colon = entry.find(':');
      if (colon == std::string::npos)
        throw std::runtime_error(man_path + ": malformed " + pre + "indicator_parents");
      int var = dag.index_of(entry.substr(0, colon));
      if (var < 0) throw std::runtime_error(man_path + ": unknown masked variable");
      std::vector<int> parents;
      std::string rest = entry.substr(colon + 1);
      std::istringstream rs(rest);
      std::string tok;
      while (std::getline(rs, tok, ',')) {
        if (tok.empty()) continue;
        int q = dag.index_of(tok);
        if (q < 0) throw std::runtime_error(man_path + ": unknown indicator parent");
        parents.push_back(q);
      }
      ind_parents[var] = std::move(parents);
    }
    inst.truth = MGraph(std::move(dag), std::move(ind_parents));
    suite.instances.push_back(std::move(inst));
  }
  return suite;
}

}  // namespace mvpc
