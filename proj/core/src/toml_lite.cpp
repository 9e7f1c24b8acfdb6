#include "usde/toml_lite.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace usde::toml {

namespace {

struct Cursor {
  const std::string& s;
  size_t pos = 0;
  const std::string& where;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(where + ": " + msg);
  }

  void skip_ws() {
    while (pos < s.size()) {
      const char c = s[pos];
      if (c == '#') {
        while (pos < s.size() && s[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        break;
      }
    }
  }

  bool eof() {
    skip_ws();
    return pos >= s.size();
  }

  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
};

Value parse_value(Cursor& c);

Value parse_array(Cursor& c) {
  Value v;
  v.kind = Value::Kind::Array;
  ++c.pos;  // consume '['
  while (true) {
    if (c.peek() == ']') {
      ++c.pos;
      break;
    }
    v.array.push_back(parse_value(c));
    const char ch = c.peek();
    if (ch == ',') {
      ++c.pos;
    } else if (ch == ']') {
      ++c.pos;
      break;
    } else {
      c.fail("expected ',' or ']' in array");
    }
  }
  return v;
}

Value parse_value(Cursor& c) {
  const char ch = c.peek();
  if (ch == '[') return parse_array(c);
  Value v;
  if (ch == '"') {
    v.kind = Value::Kind::String;
    ++c.pos;
    while (c.pos < c.s.size() && c.s[c.pos] != '"') v.str += c.s[c.pos++];
    if (c.pos >= c.s.size()) c.fail("unterminated string");
    ++c.pos;
    return v;
  }
  // bare token: number, true/false, or inf/nan spellings
  std::string tok;
  while (c.pos < c.s.size()) {
    const char t = c.s[c.pos];
    if (std::isspace(static_cast<unsigned char>(t)) || t == ',' || t == ']' ||
        t == '#') {
      break;
    }
    tok += t;
    ++c.pos;
  }
  if (tok.empty()) c.fail("expected a value");
  if (tok == "true" || tok == "false") {
    v.kind = Value::Kind::Bool;
    v.boolean = (tok == "true");
    return v;
  }
  char* end = nullptr;
  v.num = std::strtod(tok.c_str(), &end);
  if (end == nullptr || *end != '\0') {
    c.fail("malformed value '" + tok + "'");
  }
  v.kind = Value::Kind::Number;
  return v;
}

}  // namespace

bool Document::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

const Value* Document::find(const std::string& section,
                            const std::string& key) const {
  const auto sit = sections.find(section);
  if (sit == sections.end()) return nullptr;
  const auto kit = sit->second.find(key);
  return kit == sit->second.end() ? nullptr : &kit->second;
}

Document parse_string(const std::string& text, const std::string& origin) {
  Document doc;
  const std::string where = origin.empty() ? "<string>" : origin;
  Cursor c{text, 0, where};
  std::string section;
  while (!c.eof()) {
    if (c.peek() == '[') {
      ++c.pos;
      section.clear();
      while (c.pos < c.s.size() && c.s[c.pos] != ']') section += c.s[c.pos++];
      if (c.pos >= c.s.size()) c.fail("unterminated section header");
      ++c.pos;
      doc.sections[section];
      continue;
    }
    std::string key;
    while (c.pos < c.s.size()) {
      const char ch = c.s[c.pos];
      if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' ||
          ch == '.' || ch == '-') {
        key += ch;
        ++c.pos;
      } else {
        break;
      }
    }
    if (key.empty()) c.fail("expected a key");
    if (c.peek() != '=') c.fail("expected '=' after key '" + key + "'");
    ++c.pos;
    doc.sections[section][key] = parse_value(c);
  }
  return doc;
}

Document parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

}  // namespace usde::toml
