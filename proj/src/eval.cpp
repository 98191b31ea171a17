#include "mvpc/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "mvpc/pipeline.hpp"
#include "mvpc/rng.hpp"

namespace mvpc {

namespace {

void check_same_nodes(const Cpdag& a, const Cpdag& b) {
  if (a.node_count() != b.node_count())
    throw std::invalid_argument("graphs must share the node set");
}

}  // namespace

int shd(const Cpdag& estimate, const Cpdag& truth) {
  check_same_nodes(estimate, truth);
  const int n = estimate.node_count();
  int count = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (estimate.mark(i, j) != truth.mark(i, j)) ++count;
  return count;
}

PrecisionRecall adjacency_pr(const Cpdag& estimate, const Cpdag& truth) {
  check_same_nodes(estimate, truth);
  const int n = estimate.node_count();
  int est = 0, tru = 0, shared = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const bool e = estimate.adjacent(i, j);
      const bool t = truth.adjacent(i, j);
      est += e;
      tru += t;
      shared += e && t;
    }
  PrecisionRecall pr;
  pr.precision = est > 0 ? static_cast<double>(shared) / est : (tru == 0 ? 1.0 : 0.0);
  pr.recall = tru > 0 ? static_cast<double>(shared) / tru : 1.0;
  return pr;
}

PrecisionRecall orientation_pr(const Cpdag& estimate, const Cpdag& truth) {
  check_same_nodes(estimate, truth);
  const int n = estimate.node_count();
  int est = 0, tru = 0, correct = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool e = estimate.has_directed(i, j);
      const bool t = truth.has_directed(i, j);
      est += e;
      tru += t;
      correct += e && t;
    }
  PrecisionRecall pr;
  pr.precision = est > 0 ? static_cast<double>(correct) / est : (tru == 0 ? 1.0 : 0.0);
  pr.recall = tru > 0 ? static_cast<double>(correct) / tru : 1.0;
  return pr;
}

int missing_adjacencies(const Cpdag& estimate, const Cpdag& truth) {
  check_same_nodes(estimate, truth);
  const int n = estimate.node_count();
  int count = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (truth.adjacent(i, j) && !estimate.adjacent(i, j)) ++count;
  return count;
}

int extra_adjacencies(const Cpdag& estimate, const Cpdag& truth) {
  return missing_adjacencies(truth, estimate);
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "method,mechanism,p,n,replicate,shd,adj_prec,adj_rec,ori_prec,ori_rec\n";
  char buf[128];
  for (const EvalRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f", r.adj_prec, r.adj_rec,
                  r.ori_prec, r.ori_rec);
    out << r.method << ',' << r.mechanism << ',' << r.p << ',' << r.n << ','
        << r.replicate << ',' << r.shd << ',' << buf << '\n';
  }
  return out.str();
}

std::vector<EvalSummary> EvalReport::summaries() const {
  std::vector<EvalSummary> out;
  // rows are sorted, so equal cells are contiguous
  for (size_t i = 0; i < rows.size();) {
    size_t j = i;
    while (j < rows.size() && rows[j].method == rows[i].method &&
           rows[j].mechanism == rows[i].mechanism && rows[j].p == rows[i].p &&
           rows[j].n == rows[i].n)
      ++j;
    EvalSummary s;
    s.method = rows[i].method;
    s.mechanism = rows[i].mechanism;
    s.p = rows[i].p;
    s.n = rows[i].n;
    s.replicates = static_cast<int>(j - i);
    double sum = 0.0, sum2 = 0.0;
    for (size_t t = i; t < j; ++t) {
      sum += rows[t].shd;
      s.mean_adj_prec += rows[t].adj_prec;
      s.mean_adj_rec += rows[t].adj_rec;
      s.mean_ori_prec += rows[t].ori_prec;
      s.mean_ori_rec += rows[t].ori_rec;
    }
    const double k = static_cast<double>(s.replicates);
    s.mean_shd = sum / k;
    for (size_t t = i; t < j; ++t) {
      const double dev = rows[t].shd - s.mean_shd;
      sum2 += dev * dev;
    }
    s.sd_shd = s.replicates > 1 ? std::sqrt(sum2 / (k - 1.0)) : 0.0;
    s.mean_adj_prec /= k;
    s.mean_adj_rec /= k;
    s.mean_ori_prec /= k;
    s.mean_ori_rec /= k;
    out.push_back(std::move(s));
    i = j;
  }
  return out;
}

std::string EvalReport::summary_table() const {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-8s %-9s %5s %7s %4s %9s %8s %9s %8s %9s %8s",
                "method", "mechanism", "p", "n", "reps", "mean_shd", "sd_shd",
                "adj_prec", "adj_rec", "ori_prec", "ori_rec");
  out << buf << '\n';
  for (const EvalSummary& s : summaries()) {
    std::snprintf(buf, sizeof(buf),
                  "%-8s %-9s %5d %7d %4d %9.2f %8.2f %9.3f %8.3f %9.3f %8.3f",
                  s.method.c_str(), s.mechanism.c_str(), s.p, s.n, s.replicates,
                  s.mean_shd, s.sd_shd, s.mean_adj_prec, s.mean_adj_rec,
                  s.mean_ori_prec, s.mean_ori_rec);
    out << buf << '\n';
  }
  return out.str();
}

EvalReport run_benchmark(const Suite& suite, const std::vector<Method>& methods,
                         double alpha, int max_cond, std::uint64_t seed, int jobs,
                         std::vector<BenchGraph>* graphs,
                         std::vector<std::string>* failures) {
  if (methods.empty()) throw std::invalid_argument("no methods selected");
  if (jobs < 1) jobs = 1;

  struct Task {
    int instance;
    Method method;
  };
  std::vector<Task> tasks;
  for (int i = 0; i < static_cast<int>(suite.instances.size()); ++i)
    for (Method m : methods) tasks.push_back({i, m});

  struct Slot {
    bool ok = false;
    EvalRow row;
    Cpdag graph;
    std::string failure;
  };
  std::vector<Slot> slots(tasks.size());

  // The true pattern per instance, shared by that instance's tasks.
  std::vector<Cpdag> truths;
  truths.reserve(suite.instances.size());
  for (const SuiteInstance& inst : suite.instances)
    truths.push_back(dag_to_cpdag(inst.truth.dag()));

  auto run_task = [&](size_t t) {
    const Task& task = tasks[t];
    const SuiteInstance& inst = suite.instances[task.instance];
    Slot& slot = slots[t];
    try {
      DiscoverOptions opts;
      opts.method = task.method;
      opts.alpha = alpha;
      opts.max_cond = max_cond;
      opts.correction = CorrectionMode::Auto;
      opts.complete = &inst.complete;
      opts.seed = derive_seed(
          derive_seed(seed, "inst", static_cast<std::uint64_t>(inst.mechanism),
                      static_cast<std::uint64_t>(inst.n),
                      static_cast<std::uint64_t>(inst.replicate)),
          method_name(task.method));
      DiscoverResult res = discover(inst.masked, opts);

      slot.row.method = method_name(task.method);
      slot.row.mechanism = mechanism_name(inst.mechanism);
      slot.row.p = inst.p;
      slot.row.n = inst.n;
      slot.row.replicate = inst.replicate;
      slot.row.shd = shd(res.graph, truths[task.instance]);
      PrecisionRecall adj = adjacency_pr(res.graph, truths[task.instance]);
      PrecisionRecall ori = orientation_pr(res.graph, truths[task.instance]);
      slot.row.adj_prec = adj.precision;
      slot.row.adj_rec = adj.recall;
      slot.row.ori_prec = ori.precision;
      slot.row.ori_rec = ori.recall;
      slot.graph = std::move(res.graph);
      slot.ok = true;
    } catch (const std::exception& e) {
      slot.failure = "instance " + inst.name + " method " +
                     method_name(task.method) + ": " + e.what();
    }
  };

  if (jobs == 1 || tasks.size() <= 1) {
    for (size_t t = 0; t < tasks.size(); ++t) run_task(t);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      for (size_t t = next.fetch_add(1); t < tasks.size(); t = next.fetch_add(1))
        run_task(t);
    };
    std::vector<std::thread> pool;
    const int width = std::min<int>(jobs, static_cast<int>(tasks.size()));
    pool.reserve(width);
    for (int i = 0; i < width; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  EvalReport report;
  for (size_t t = 0; t < tasks.size(); ++t) {
    Slot& slot = slots[t];
    if (!slot.ok) {
      if (failures && !slot.failure.empty()) failures->push_back(slot.failure);
      continue;
    }
    report.rows.push_back(std::move(slot.row));
    if (graphs)
      graphs->push_back(
          {method_name(tasks[t].method), tasks[t].instance, std::move(slot.graph)});
  }
  std::sort(report.rows.begin(), report.rows.end(),
            [](const EvalRow& a, const EvalRow& b) {
              return std::tie(a.method, a.mechanism, a.p, a.n, a.replicate) <
                     std::tie(b.method, b.mechanism, b.p, b.n, b.replicate);
            });
  return report;
}

}  // namespace mvpc
