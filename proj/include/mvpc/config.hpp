#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mvpc/synth.hpp"

namespace mvpc {

// Flat "key = value" text. Lines may carry '#' comments; blank lines are
// skipped; duplicate keys are an error. `origin` (usually the file name) is
// kept for error messages.
struct KeyValues {
  std::string origin;
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const { return values.count(key) > 0; }
};

KeyValues parse_config(const std::string& text, const std::string& origin);
KeyValues load_config(const std::string& path);

// Typed accessors. The default is returned only when the key is absent; a
// present-but-malformed value throws std::runtime_error naming the origin
// and key.
std::string config_string(const KeyValues& kv, const std::string& key,
                          const std::string& def);
int config_int(const KeyValues& kv, const std::string& key, int def);
std::uint64_t config_uint64(const KeyValues& kv, const std::string& key,
                            std::uint64_t def);
double config_double(const KeyValues& kv, const std::string& key, double def);
bool config_bool(const KeyValues& kv, const std::string& key, bool def);
std::vector<int> config_int_list(const KeyValues& kv, const std::string& key,
                                 const std::vector<int>& def);
std::vector<std::string> config_string_list(const KeyValues& kv,
                                            const std::string& key,
                                            const std::vector<std::string>& def);

// Throws std::runtime_error naming the first key not in `known` (prefix keys
// like "instance." cover numbered families).
void require_known_keys(const KeyValues& kv,
                        const std::vector<std::string>& known);

// Suite-generation settings as config keys (optionally prefixed, e.g.
// "suite."). Doubles are written in shortest round-trip form, so a parsed
// config regenerates the identical suite.
const std::vector<std::string>& suite_config_keys();
SuiteConfig suite_config_from(const KeyValues& kv,
                              const std::string& key_prefix = "");
std::string suite_config_text(const SuiteConfig& c,
                              const std::string& key_prefix = "");

}  // namespace mvpc
