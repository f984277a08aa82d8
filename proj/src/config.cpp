#include "diffcol/config.hpp"

#include "diffcol/errors.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace diffcol {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg);
}

// Reads one scalar starting at `pos`; quoted strings keep their content.
std::string read_scalar(const std::string& s, std::size_t& pos, int line) {
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos < s.size() && s[pos] == '"') {
    std::string out;
    ++pos;
    while (pos < s.size() && s[pos] != '"') {
      if (s[pos] == '\\' && pos + 1 < s.size()) ++pos;
      out += s[pos++];
    }
    if (pos >= s.size()) fail(line, "unterminated string");
    ++pos;
    return out;
  }
  std::size_t start = pos;
  while (pos < s.size() && s[pos] != ',' && s[pos] != ']' && s[pos] != '#') ++pos;
  std::string out = trim(s.substr(start, pos - start));
  if (out.empty()) fail(line, "missing value");
  return out;
}

std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "bad section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) fail(line, "empty section name");
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    std::string key = trim(s.substr(0, eq));
    if (key.empty()) fail(line, "empty key");
    for (char c : key) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) {
        fail(line, "bad key '" + key + "'");
      }
    }
    if (!section.empty()) key = section + "." + key;
    if (cfg.has(key)) fail(line, "duplicate key '" + key + "'");

    const std::string rhs = trim(s.substr(eq + 1));
    std::size_t pos = 0;
    if (!rhs.empty() && rhs.front() == '[') {
      std::vector<std::string> items;
      pos = 1;
      for (;;) {
        while (pos < rhs.size() && std::isspace(static_cast<unsigned char>(rhs[pos]))) ++pos;
        if (pos < rhs.size() && rhs[pos] == ']') break;
        items.push_back(read_scalar(rhs, pos, line));
        while (pos < rhs.size() && std::isspace(static_cast<unsigned char>(rhs[pos]))) ++pos;
        if (pos < rhs.size() && rhs[pos] == ',') {
          ++pos;
          continue;
        }
        if (pos < rhs.size() && rhs[pos] == ']') break;
        fail(line, "unterminated array");
      }
      if (trim(rhs.substr(pos + 1)) != "") fail(line, "trailing text after array");
      cfg.set(key, std::move(items), true);
    } else {
      std::string v = read_scalar(rhs, pos, line);
      if (trim(rhs.substr(pos)) != "") fail(line, "trailing text after value");
      cfg.set(key, {v}, false);
    }
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::vector<std::string> KeyValueConfig::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) out.push_back(k);
  return out;
}

void KeyValueConfig::set(const std::string& key, std::vector<std::string> items, bool is_list) {
  values_[key] = Value{std::move(items), is_list};
}

const KeyValueConfig::Value* KeyValueConfig::find_scalar(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  if (it->second.is_list) throw Error(ErrorCode::ParseError, "'" + key + "' must be a scalar");
  return &it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  const Value* v = find_scalar(key);
  return v ? v->items.front() : fallback;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const Value* v = find_scalar(key);
  if (!v) return fallback;
  const std::string& s = v->items.front();
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(out)) {
    throw Error(ErrorCode::ParseError, "'" + key + "' expects a number, got '" + s + "'");
  }
  return out;
}

long KeyValueConfig::get_int(const std::string& key, long fallback) const {
  const Value* v = find_scalar(key);
  if (!v) return fallback;
  const std::string& s = v->items.front();
  std::size_t used = 0;
  long out = 0;
  try {
    out = std::stol(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw Error(ErrorCode::ParseError, "'" + key + "' expects an integer, got '" + s + "'");
  }
  return out;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  const Value* v = find_scalar(key);
  if (!v) return fallback;
  const std::string& s = v->items.front();
  std::size_t used = 0;
  unsigned long long out = 0;
  try {
    if (!s.empty() && s[0] != '-') out = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw Error(ErrorCode::ParseError, "'" + key + "' expects an unsigned integer, got '" + s + "'");
  }
  return out;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const Value* v = find_scalar(key);
  if (!v) return fallback;
  const std::string& s = v->items.front();
  if (s == "true") return true;
  if (s == "false") return false;
  throw Error(ErrorCode::ParseError, "'" + key + "' expects true or false, got '" + s + "'");
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& key,
                                                  const std::vector<std::string>& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second.items;
}

}  // namespace diffcol
