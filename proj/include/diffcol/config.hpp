#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace diffcol {

/// Flat TOML subset: `key = value` lines, `[section]` headers (keys become
/// `section.key`), `#` comments. Values are numbers, booleans, "strings" or
/// one-line arrays of those.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::vector<std::string> keys() const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key,
                                    const std::vector<std::string>& fallback) const;

  void set(const std::string& key, std::vector<std::string> items, bool is_list);

 private:
  struct Value {
    std::vector<std::string> items;
    bool is_list = false;
  };
  const Value* find_scalar(const std::string& key) const;

  std::map<std::string, Value> values_;
};

}  // namespace diffcol
