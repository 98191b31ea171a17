#include "mvpc/mvpc.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mvpc/config.hpp"
#include "mvpc/dataset.hpp"
#include "mvpc/eval.hpp"
#include "mvpc/pipeline.hpp"
#include "mvpc/synth.hpp"

struct mvpc_dataset {
  mvpc::Dataset d;
};

struct mvpc_graph {
  mvpc::Cpdag g;
};

namespace {

thread_local std::string t_error;
thread_local std::string t_warnings;

int fail(int code, const std::string& msg) {
  t_error = msg;
  return code;
}

// Comma split that keeps empty segments (the empty string is a valid
// missing-value token).
std::vector<std::string> split_keep_empty(const std::string& s) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t comma = s.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string format_ci_line(const mvpc::Dataset& d, const std::string& x_name,
                           const mvpc::CiTestLogEntry& e) {
  std::ostringstream out;
  out << " x=" << x_name << " y=" << d.label(e.query.y) << " z=";
  if (e.query.z.empty()) out << "-";
  for (size_t i = 0; i < e.query.z.size(); ++i)
    out << (i ? "," : "") << d.label(e.query.z[i]);
  char buf[64];
  std::snprintf(buf, sizeof(buf), " n_eff=%lld stat=%.6g p=%.6g",
                e.result.effective_n, e.result.statistic, e.result.p_value);
  out << buf << " independent=" << (e.result.independent ? 1 : 0)
      << " degenerate=" << (e.result.degenerate ? 1 : 0);
  return out.str();
}

std::string tests_dump(const mvpc::Dataset& d, const mvpc::DiscoverResult& res) {
  std::ostringstream out;
  for (const mvpc::CiTestLogEntry& e : res.skeleton.test_log)
    out << "skeleton" << format_ci_line(d, d.label(e.query.x), e) << "\n";
  for (const mvpc::CiTestLogEntry& e : res.rparents.test_log)
    out << "rparents" << format_ci_line(d, "R_" + d.label(e.query.x), e) << "\n";
  return out.str();
}

std::string corrections_dump(const mvpc::Dataset& d,
                             const mvpc::DiscoverResult& res) {
  std::ostringstream out;
  for (const mvpc::CorrectionRecord& c : res.corrections) {
    out << "pair=" << d.label(c.query.x) << "," << d.label(c.query.y) << " z=";
    if (c.query.z.empty()) out << "-";
    for (size_t i = 0; i < c.query.z.size(); ++i)
      out << (i ? "," : "") << d.label(c.query.z[i]);
    out << " w=";
    if (c.w_set.empty()) out << "-";
    for (size_t i = 0; i < c.w_set.size(); ++i)
      out << (i ? "," : "") << d.label(c.w_set[i]);
    char buf[64];
    std::snprintf(buf, sizeof(buf), " n_eff=%lld p=%.6g", c.result.effective_n,
                  c.result.p_value);
    out << " method=" << mvpc::correction_method_name(c.method) << buf
        << " independent=" << (c.result.independent ? 1 : 0)
        << " removed=" << (c.removed ? 1 : 0) << "\n";
  }
  return out.str();
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* mvpc_version(void) { return "0.1.0"; }

const char* mvpc_strerror(int code) {
  switch (code) {
    case MVPC_OK: return "ok";
    case MVPC_ERR_IO: return "i/o error";
    case MVPC_ERR_PARSE: return "parse error";
    case MVPC_ERR_ARG: return "invalid argument";
    case MVPC_ERR_INTERNAL: return "internal error";
  }
  return "unknown error code";
}

const char* mvpc_last_error(void) { return t_error.c_str(); }
const char* mvpc_last_warnings(void) { return t_warnings.c_str(); }

int mvpc_dataset_load_csv(const char* path, const char* na_tokens,
                          mvpc_dataset** out) {
  if (!path || !out) return fail(MVPC_ERR_ARG, "path and out are required");
  *out = nullptr;
  std::string text;
  try {
    text = mvpc::read_text_file(path);
  } catch (const std::exception& e) {
    return fail(MVPC_ERR_IO, e.what());
  }
  try {
    t_error.clear();
    std::vector<std::string> tokens =
        na_tokens ? split_keep_empty(na_tokens) : mvpc::default_na_tokens();
    *out = new mvpc_dataset{mvpc::parse_csv(text, path, tokens)};
    return MVPC_OK;
  } catch (const std::invalid_argument& e) {
    return fail(MVPC_ERR_ARG, e.what());
  } catch (const std::exception& e) {
    return fail(MVPC_ERR_PARSE, e.what());
  }
}

void mvpc_dataset_free(mvpc_dataset* d) { delete d; }

int mvpc_dataset_rows(const mvpc_dataset* d) { return d ? d->d.rows() : -1; }
int mvpc_dataset_cols(const mvpc_dataset* d) { return d ? d->d.cols() : -1; }

const char* mvpc_dataset_label(const mvpc_dataset* d, int col) {
  if (!d || col < 0 || col >= d->d.cols()) return nullptr;
  return d->d.label(col).c_str();
}

void mvpc_discover_options_init(mvpc_discover_options* opts) {
  if (!opts) return;
  opts->method = "mvpc";
  opts->alpha = 0.05;
  opts->max_cond = -1;
  opts->seed = 1;
  opts->correction = "auto";
  opts->complete = nullptr;
  opts->dump_tests_path = nullptr;
  opts->dump_corrections_path = nullptr;
}

int mvpc_discover(const mvpc_dataset* data, const mvpc_discover_options* opts,
                  mvpc_graph** out, mvpc_discover_stats* stats) {
  if (!data || !opts || !out)
    return fail(MVPC_ERR_ARG, "data, opts, and out are required");
  *out = nullptr;
  t_warnings.clear();

  mvpc::DiscoverResult res;
  try {
    t_error.clear();
    mvpc::DiscoverOptions o;
    o.method = mvpc::method_from_name(opts->method ? opts->method : "mvpc");
    o.alpha = opts->alpha;
    o.max_cond = opts->max_cond;
    o.seed = opts->seed;
    o.correction = mvpc::correction_mode_from_name(
        opts->correction ? opts->correction : "auto");
    o.complete = opts->complete ? &opts->complete->d : nullptr;
    res = mvpc::discover(data->d, o);
  } catch (const std::invalid_argument& e) {
    return fail(MVPC_ERR_ARG, e.what());
  } catch (const std::exception& e) {
    return fail(MVPC_ERR_INTERNAL, e.what());
  }

  try {
    if (opts->dump_tests_path)
      mvpc::write_text_file(opts->dump_tests_path, tests_dump(data->d, res));
    if (opts->dump_corrections_path)
      mvpc::write_text_file(opts->dump_corrections_path,
                            corrections_dump(data->d, res));
  } catch (const std::exception& e) {
    return fail(MVPC_ERR_IO, e.what());
  }

  std::ostringstream warn;
  for (size_t i = 0; i < res.warnings.size(); ++i)
    warn << (i ? "\n" : "") << res.warnings[i];
  t_warnings = warn.str();

  if (stats) {
    stats->nodes = res.graph.node_count();
    stats->edges = res.graph.edge_count();
    stats->candidates = static_cast<int>(res.candidates.size());
    int removed = 0;
    for (const mvpc::CorrectionRecord& c : res.corrections) removed += c.removed;
    stats->removed = removed;
    stats->tests_run =
        static_cast<long long>(res.skeleton.test_log.size()) +
        static_cast<long long>(res.rparents.test_log.size()) +
        static_cast<long long>(res.corrections.size());
  }

  *out = new mvpc_graph{std::move(res.graph)};
  return MVPC_OK;
}

int mvpc_graph_node_count(const mvpc_graph* g) {
  return g ? g->g.node_count() : -1;
}

int mvpc_graph_edge_count(const mvpc_graph* g) {
  return g ? g->g.edge_count() : -1;
}

const char* mvpc_graph_label(const mvpc_graph* g, int v) {
  if (!g || v < 0 || v >= g->g.node_count()) return nullptr;
  return g->g.label(v).c_str();
}

int mvpc_graph_mark(const mvpc_graph* g, int a, int b) {
  if (!g || a < 0 || b < 0 || a >= g->g.node_count() || b >= g->g.node_count() ||
      a == b)
    return -1;
  switch (g->g.mark(a, b)) {
    case mvpc::EdgeMark::None: return MVPC_MARK_NONE;
    case mvpc::EdgeMark::Forward: return MVPC_MARK_FORWARD;
    case mvpc::EdgeMark::Backward: return MVPC_MARK_BACKWARD;
    case mvpc::EdgeMark::Undirected: return MVPC_MARK_UNDIRECTED;
  }
  return -1;
}

int mvpc_graph_write_edgelist(const mvpc_graph* g, const char* path) {
  if (!g || !path) return fail(MVPC_ERR_ARG, "graph and path are required");
  try {
    t_error.clear();
    mvpc::write_text_file(path, mvpc::to_edge_list(g->g));
    return MVPC_OK;
  } catch (const std::exception& e) {
    return fail(MVPC_ERR_IO, e.what());
  }
}

int mvpc_graph_write_dot(const mvpc_graph* g, const char* path) {
  if (!g || !path) return fail(MVPC_ERR_ARG, "graph and path are required");
  try {
    t_error.clear();
    mvpc::write_text_file(path, mvpc::to_dot(g->g));
    return MVPC_OK;
  } catch (const std::exception& e) {
    return fail(MVPC_ERR_IO, e.what());
  }
}

void mvpc_graph_free(mvpc_graph* g) { delete g; }

int mvpc_synth(const char* config_path, const char* overrides,
               const char* out_dir) {
  if (!out_dir) return fail(MVPC_ERR_ARG, "out_dir is required");
  t_error.clear();

  mvpc::KeyValues kv;
  kv.origin = config_path ? config_path : "<defaults>";
  if (config_path) {
    std::string text;
    try {
      text = mvpc::read_text_file(config_path);
    } catch (const std::exception& e) {
      return fail(MVPC_ERR_IO, e.what());
    }
    try {
      kv = mvpc::parse_config(text, config_path);
    } catch (const std::exception& e) {
      return fail(MVPC_ERR_PARSE, e.what());
    }
  }
  if (overrides) {
    try {
      mvpc::KeyValues ov = mvpc::parse_config(overrides, "<overrides>");
      for (const auto& [key, value] : ov.values) kv.values[key] = value;
    } catch (const std::exception& e) {
      return fail(MVPC_ERR_PARSE, e.what());
    }
  }

  mvpc::Suite suite;
  try {
    mvpc::require_known_keys(kv, mvpc::suite_config_keys());
    mvpc::SuiteConfig cfg = mvpc::suite_config_from(kv);
    suite = mvpc::make_benchmark_suite(cfg);
  } catch (const std::invalid_argument& e) {
    return fail(MVPC_ERR_ARG, e.what());
  } catch (const std::exception& e) {
    return fail(MVPC_ERR_PARSE, e.what());
  }
  try {
    mvpc::write_suite(suite, out_dir);
  } catch (const std::exception& e) {
    return fail(MVPC_ERR_IO, e.what());
  }
  return MVPC_OK;
}

int mvpc_bench(const char* suite_dir, const char* methods, double alpha,
               int max_cond, uint64_t seed, int jobs, const char* report_path,
               char** summary_out) {
  if (!suite_dir || !report_path)
    return fail(MVPC_ERR_ARG, "suite_dir and report_path are required");
  if (summary_out) *summary_out = nullptr;
  t_error.clear();
  t_warnings.clear();

  mvpc::Suite suite;
  try {
    suite = mvpc::load_suite(suite_dir);
  } catch (const std::exception& e) {
    const std::string what = e.what();
    const bool io = what.find("cannot open") != std::string::npos;
    return fail(io ? MVPC_ERR_IO : MVPC_ERR_PARSE, what);
  }

  std::vector<mvpc::Method> method_list;
  try {
    for (const std::string& name :
         split_keep_empty(methods ? methods : "mvpc,td-pc,ld-pc,ideal,target"))
      method_list.push_back(mvpc::method_from_name(name));
  } catch (const std::exception& e) {
    return fail(MVPC_ERR_ARG, e.what());
  }

  if (jobs < 1) {
    unsigned hc = std::thread::hardware_concurrency();
    jobs = hc > 0 ? static_cast<int>(hc) : 1;
  }

  mvpc::EvalReport report;
  std::vector<std::string> failures;
  try {
    report = mvpc::run_benchmark(suite, method_list, alpha, max_cond, seed,
                                 jobs, nullptr, &failures);
  } catch (const std::invalid_argument& e) {
    return fail(MVPC_ERR_ARG, e.what());
  } catch (const std::exception& e) {
    return fail(MVPC_ERR_INTERNAL, e.what());
  }

  std::ostringstream warn;
  for (size_t i = 0; i < failures.size(); ++i)
    warn << (i ? "\n" : "") << failures[i];
  t_warnings = warn.str();

  try {
    mvpc::write_text_file(report_path, report.to_csv());
  } catch (const std::exception& e) {
    return fail(MVPC_ERR_IO, e.what());
  }

  if (summary_out) {
    *summary_out = dup_string(report.summary_table());
    if (!*summary_out) return fail(MVPC_ERR_INTERNAL, "out of memory");
  }
  return MVPC_OK;
}

void mvpc_string_free(char* s) { std::free(s); }

}  // extern "C"
