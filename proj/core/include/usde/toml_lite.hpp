#ifndef USDE_TOML_LITE_HPP_
#define USDE_TOML_LITE_HPP_

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace usde::toml {

/// Minimal TOML-style reader covering what the scenario files use:
/// `[section]` headers, `key = value` pairs, numbers, booleans, quoted
/// strings, and (nested) arrays that may span lines. Comments start with
/// `#`. Unsupported TOML constructs raise ParseError.
struct Value {
  enum class Kind { Number, Bool, String, Array };
  Kind kind = Kind::Number;
  double num = 0.0;
  bool boolean = false;
  std::string str;
  std::vector<Value> array;

  bool is_number() const { return kind == Kind::Number; }
  bool is_array() const { return kind == Kind::Array; }
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

using Table = std::map<std::string, Value>;

struct Document {
  std::map<std::string, Table> sections;

  bool has(const std::string& section, const std::string& key) const;
  const Value* find(const std::string& section, const std::string& key) const;
};

Document parse_string(const std::string& text, const std::string& origin = "");
Document parse_file(const std::string& path);

}  // namespace usde::toml

#endif  // USDE_TOML_LITE_HPP_
