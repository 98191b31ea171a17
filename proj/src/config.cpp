#include "mvpc/config.hpp"

#include <cctype>
#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "mvpc/dataset.hpp"

namespace mvpc {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void bad_value(const KeyValues& kv, const std::string& key,
                            const std::string& raw, const char* expected) {
  throw std::runtime_error(kv.origin + ": key '" + key + "': cannot parse '" +
                           raw + "' as " + expected);
}

std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> out;
  std::istringstream in(raw);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

// Shortest decimal form that parses back to the same double.
std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

KeyValues parse_config(const std::string& text, const std::string& origin) {
  KeyValues kv;
  kv.origin = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (size_t hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(origin + ": line " + std::to_string(lineno) +
                               ": expected 'key = value'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error(origin + ": line " + std::to_string(lineno) +
                               ": empty key");
    if (!kv.values.emplace(std::move(key), std::move(value)).second)
      throw std::runtime_error(origin + ": line " + std::to_string(lineno) +
                               ": duplicate key '" + trim(t.substr(0, eq)) + "'");
  }
  return kv;
}

KeyValues load_config(const std::string& path) {
  return parse_config(read_text_file(path), path);
}

std::string config_string(const KeyValues& kv, const std::string& key,
                          const std::string& def) {
  auto it = kv.values.find(key);
  return it == kv.values.end() ? def : it->second;
}

int config_int(const KeyValues& kv, const std::string& key, int def) {
  auto it = kv.values.find(key);
  if (it == kv.values.end()) return def;
  const std::string& raw = it->second;
  int out = 0;
  auto res = std::from_chars(raw.data(), raw.data() + raw.size(), out);
  if (res.ec != std::errc{} || res.ptr != raw.data() + raw.size())
    bad_value(kv, key, raw, "an integer");
  return out;
}

std::uint64_t config_uint64(const KeyValues& kv, const std::string& key,
                            std::uint64_t def) {
  auto it = kv.values.find(key);
  if (it == kv.values.end()) return def;
  const std::string& raw = it->second;
  std::uint64_t out = 0;
  auto res = std::from_chars(raw.data(), raw.data() + raw.size(), out);
  if (res.ec != std::errc{} || res.ptr != raw.data() + raw.size())
    bad_value(kv, key, raw, "an unsigned integer");
  return out;
}

double config_double(const KeyValues& kv, const std::string& key, double def) {
  auto it = kv.values.find(key);
  if (it == kv.values.end()) return def;
  const std::string& raw = it->second;
  errno = 0;
  char* end = nullptr;
  double out = std::strtod(raw.c_str(), &end);
  if (end != raw.c_str() + raw.size() || raw.empty() || errno == ERANGE)
    bad_value(kv, key, raw, "a number");
  return out;
}

bool config_bool(const KeyValues& kv, const std::string& key, bool def) {
  auto it = kv.values.find(key);
  if (it == kv.values.end()) return def;
  const std::string& raw = it->second;
  if (raw == "true" || raw == "1") return true;
  if (raw == "false" || raw == "0") return false;
  bad_value(kv, key, raw, "a boolean (true/false/1/0)");
}

std::vector<int> config_int_list(const KeyValues& kv, const std::string& key,
                                 const std::vector<int>& def) {
  auto it = kv.values.find(key);
  if (it == kv.values.end()) return def;
  std::vector<int> out;
  for (const std::string& tok : split_list(it->second)) {
    int v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
      bad_value(kv, key, it->second, "a comma-separated integer list");
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> config_string_list(const KeyValues& kv,
                                            const std::string& key,
                                            const std::vector<std::string>& def) {
  auto it = kv.values.find(key);
  if (it == kv.values.end()) return def;
  return split_list(it->second);
}

void require_known_keys(const KeyValues& kv,
                        const std::vector<std::string>& known) {
  for (const auto& [key, value] : kv.values) {
    bool ok = false;
    for (const std::string& k : known) {
      if (!k.empty() && k.back() == '.') {
        if (key.size() > k.size() && key.compare(0, k.size(), k) == 0) ok = true;
      } else if (key == k) {
        ok = true;
      }
      if (ok) break;
    }
    if (!ok)
      throw std::runtime_error(kv.origin + ": unknown config key '" + key + "'");
  }
}

const std::vector<std::string>& suite_config_keys() {
  static const std::vector<std::string> keys = {
      "p",          "sample_sizes",    "mechanisms", "replicates",
      "vm_min",     "vm_max",          "missing_rate", "coef_lo",
      "coef_hi",    "expected_degree", "min_colliders", "slope",
      "seed"};
  return keys;
}

SuiteConfig suite_config_from(const KeyValues& kv, const std::string& key_prefix) {
  auto k = [&](const char* name) { return key_prefix + name; };
  SuiteConfig c;
  c.p = config_int(kv, k("p"), c.p);
  c.sample_sizes = config_int_list(kv, k("sample_sizes"), c.sample_sizes);
  if (kv.has(k("mechanisms"))) {
    c.mechanisms.clear();
    for (const std::string& name : config_string_list(kv, k("mechanisms"), {}))
      c.mechanisms.push_back(mechanism_from_name(name));
  }
  c.replicates = config_int(kv, k("replicates"), c.replicates);
  c.vm_min = config_int(kv, k("vm_min"), c.vm_min);
  c.vm_max = config_int(kv, k("vm_max"), c.vm_max);
  c.missing_rate = config_double(kv, k("missing_rate"), c.missing_rate);
  c.coef_lo = config_double(kv, k("coef_lo"), c.coef_lo);
  c.coef_hi = config_double(kv, k("coef_hi"), c.coef_hi);
  c.expected_degree = config_double(kv, k("expected_degree"), c.expected_degree);
  c.min_colliders = config_int(kv, k("min_colliders"), c.min_colliders);
  c.slope = config_double(kv, k("slope"), c.slope);
  c.seed = config_uint64(kv, k("seed"), c.seed);
  c.validate();
  return c;
}

std::string suite_config_text(const SuiteConfig& c, const std::string& key_prefix) {
  std::ostringstream out;
  auto k = [&](const char* name) -> std::ostringstream& {
    out << key_prefix << name << " = ";
    return out;
  };
  k("p") << c.p << "\n";
  {
    k("sample_sizes");
    for (size_t i = 0; i < c.sample_sizes.size(); ++i)
      out << (i ? "," : "") << c.sample_sizes[i];
    out << "\n";
  }
  {
    k("mechanisms");
    for (size_t i = 0; i < c.mechanisms.size(); ++i)
      out << (i ? "," : "") << mechanism_name(c.mechanisms[i]);
    out << "\n";
  }
  k("replicates") << c.replicates << "\n";
  k("vm_min") << c.vm_min << "\n";
  k("vm_max") << c.vm_max << "\n";
  k("missing_rate") << format_double(c.missing_rate) << "\n";
  k("coef_lo") << format_double(c.coef_lo) << "\n";
  k("coef_hi") << format_double(c.coef_hi) << "\n";
  k("expected_degree") << format_double(c.expected_degree) << "\n";
  k("min_colliders") << c.min_colliders << "\n";
  k("slope") << format_double(c.slope) << "\n";
  k("seed") << c.seed << "\n";
  return out.str();
}

}  // namespace mvpc
