#pragma once

// Minimal TOML-subset reader for the experiment configs: [table] headers
// (dotted allowed), bare/dotted keys, strings, integers, floats, booleans,
// and single-line arrays of scalars. Comments start with '#'. This covers
// every construct the bundled configs use; anything else is a ParseError
// with a line number. Tables are std::map so iteration order is stable.

#include <cctype>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace echosim::toml {

class Value;
using Table = std::map<std::string, Value>;
using Array = std::vector<Value>;

class Value {
 public:
  enum class Kind { String, Int, Float, Bool, Array, Table };

  Value() : data_(Table{}) {}
  explicit Value(std::string s) : data_(std::move(s)) {}
  explicit Value(std::int64_t i) : data_(i) {}
  explicit Value(double d) : data_(d) {}
  explicit Value(bool b) : data_(b) {}
  explicit Value(Array a) : data_(std::move(a)) {}
  explicit Value(Table t) : data_(std::move(t)) {}

  Kind kind() const { return static_cast<Kind>(data_.index()); }
  bool is_table() const { return kind() == Kind::Table; }

  const std::string& as_string() const { return expect<std::string>("string"); }
  std::int64_t as_int() const { return expect<std::int64_t>("integer"); }
  bool as_bool() const { return expect<bool>("boolean"); }
  double as_double() const {
    if (kind() == Kind::Int) return static_cast<double>(std::get<std::int64_t>(data_));
    return expect<double>("float");
  }
  const Array& as_array() const { return expect<Array>("array"); }
  const Table& as_table() const { return expect<Table>("table"); }
  Table& as_table() { return std::get<Table>(data_); }

  // Dotted-path lookup into nested tables; nullptr when absent.
  const Value* find(const std::string& dotted_path) const {
    const Value* node = this;
    std::size_t start = 0;
    for (;;) {
      const std::size_t dot = dotted_path.find('.', start);
      const std::string key = dotted_path.substr(start, dot == std::string::npos ? dot : dot - start);
      if (!node->is_table()) return nullptr;
      const auto& tab = std::get<Table>(node->data_);
      const auto it = tab.find(key);
      if (it == tab.end()) return nullptr;
      node = &it->second;
      if (dot == std::string::npos) return node;
      start = dot + 1;
    }
  }

  // All dotted paths of non-table leaves, in map order.
  std::vector<std::string> leaf_paths() const {
    std::vector<std::string> out;
    collect_leaves("", out);
    return out;
  }

 private:
  template <typename T>
  const T& expect(const char* what) const {
    if (!std::holds_alternative<T>(data_)) throw ParseError(std::string("expected a ") + what + " value");
    return std::get<T>(data_);
  }

  void collect_leaves(const std::string& prefix, std::vector<std::string>& out) const {
    if (!is_table()) {
      out.push_back(prefix);
      return;
    }
    for (const auto& [key, val] : std::get<Table>(data_)) {
      val.collect_leaves(prefix.empty() ? key : prefix + "." + key, out);
    }
  }

  std::variant<std::string, std::int64_t, double, bool, Array, Table> data_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Removes a trailing comment, honoring quoted strings.
inline std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

inline std::vector<std::string> split_dotted_key(const std::string& key, int line_no) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : key) {
    if (c == '.') {
      if (cur.empty()) throw ParseError("empty key segment at line " + std::to_string(line_no));
      parts.push_back(cur);
      cur.clear();
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
      cur += c;
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      throw ParseError(std::string("bad key character '") + c + "' at line " + std::to_string(line_no));
    }
  }
  if (cur.empty()) throw ParseError("empty key segment at line " + std::to_string(line_no));
  parts.push_back(cur);
  return parts;
}

inline Value parse_scalar(const std::string& text, int line_no) {
  const std::string t = trim(text);
  if (t.empty()) throw ParseError("missing value at line " + std::to_string(line_no));
  if (t.front() == '"') {
    if (t.size() < 2 || t.back() != '"') throw ParseError("unterminated string at line " + std::to_string(line_no));
    std::string out;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
      if (t[i] == '\\' && i + 2 < t.size()) {
        ++i;
        switch (t[i]) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: throw ParseError("unsupported escape at line " + std::to_string(line_no));
        }
      } else {
        out += t[i];
      }
    }
    return Value(out);
  }
  if (t == "true") return Value(true);
  if (t == "false") return Value(false);
  const bool looks_float = t.find_first_of(".eE") != std::string::npos &&
                           t.find_first_not_of("+-0123456789.eE") == std::string::npos;
  try {
    std::size_t used = 0;
    if (looks_float) {
      const double d = std::stod(t, &used);
      if (used == t.size()) return Value(d);
    } else {
      const std::int64_t i = std::stoll(t, &used, 10);
      if (used == t.size()) return Value(i);
      const double d = std::stod(t, &used);
      if (used == t.size()) return Value(d);
    }
  } catch (const std::exception&) {
    // fall through to the ParseError below
  }
  throw ParseError("unrecognized value '" + t + "' at line " + std::to_string(line_no));
}

inline Value parse_value(const std::string& text, int line_no) {
  const std::string t = trim(text);
  if (!t.empty() && t.front() == '[') {
    if (t.back() != ']') throw ParseError("unterminated array at line " + std::to_string(line_no));
    Array arr;
    std::string body = t.substr(1, t.size() - 2);
    std::string cur;
    bool in_string = false;
    for (char c : body) {
      if (c == '"') in_string = !in_string;
      if (c == ',' && !in_string) {
        if (!trim(cur).empty()) arr.push_back(parse_scalar(cur, line_no));
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!trim(cur).empty()) arr.push_back(parse_scalar(cur, line_no));
    return Value(std::move(arr));
  }
  return parse_scalar(t, line_no);
}

inline Table* descend(Table& root, const std::vector<std::string>& path, int line_no) {
  Table* tab = &root;
  for (const auto& part : path) {
    auto [it, inserted] = tab->try_emplace(part, Value(Table{}));
    if (!it->second.is_table()) {
      throw ParseError("key '" + part + "' redefined as a table at line " + std::to_string(line_no));
    }
    tab = &it->second.as_table();
  }
  return tab;
}

}  // namespace detail

inline Value parse(const std::string& text) {
  Table root;
  std::vector<std::string> current_path;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string line = text.substr(pos, eol == std::string::npos ? eol : eol - pos);
    pos = (eol == std::string::npos) ? text.size() + 1 : eol + 1;
    ++line_no;
    line = detail::trim(detail::strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated table header at line " + std::to_string(line_no));
      current_path = detail::split_dotted_key(line.substr(1, line.size() - 2), line_no);
      detail::descend(root, current_path, line_no);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value' at line " + std::to_string(line_no));
    auto key_parts = detail::split_dotted_key(line.substr(0, eq), line_no);
    const std::string leaf = key_parts.back();
    key_parts.pop_back();
    std::vector<std::string> full = current_path;
    full.insert(full.end(), key_parts.begin(), key_parts.end());
    Table* tab = detail::descend(root, full, line_no);
    if (tab->count(leaf)) throw ParseError("duplicate key '" + leaf + "' at line " + std::to_string(line_no));
    tab->emplace(leaf, detail::parse_value(line.substr(eq + 1), line_no));
  }
  return Value(std::move(root));
}

}  // namespace echosim::toml
