#include "cr/value.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <system_error>

namespace cr {

std::string_view type_name(TypeTag tag) {
  switch (tag) {
    case TypeTag::Bool: return "bool";
    case TypeTag::Int: return "int";
    case TypeTag::Float: return "float";
    case TypeTag::Str: return "str";
  }
  return "?";
}

std::optional<TypeTag> parse_type_name(std::string_view name) {
  if (name == "bool") return TypeTag::Bool;
  if (name == "int") return TypeTag::Int;
  if (name == "float") return TypeTag::Float;
  if (name == "str") return TypeTag::Str;
  return std::nullopt;
}

Value::Value(double d) : payload_(d) {
  if (!std::isfinite(d)) {
    throw std::invalid_argument("float value must be finite");
  }
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (a.payload_.index() != b.payload_.index()) {
    return a.payload_.index() <=> b.payload_.index();
  }
  switch (a.tag()) {
    case Value::Tag::Null:
      return std::strong_ordering::equal;
    case Value::Tag::Bool:
      return a.as_bool() <=> b.as_bool();
    case Value::Tag::Int:
      return a.as_int() <=> b.as_int();
    case Value::Tag::Float: {
      double x = a.as_float();
      double y = b.as_float();
      if (x < y) return std::strong_ordering::less;
      if (x > y) return std::strong_ordering::greater;
      // Numerically equal: only the sign of zero can still differ.
      return std::signbit(y) <=> std::signbit(x);
    }
    case Value::Tag::Str: {
      int c = a.as_str().compare(b.as_str());
      return c <=> 0;
    }
  }
  return std::strong_ordering::equal;
}

std::strong_ordering compare_values(const Value& a, const Value& b) {
  return a <=> b;
}

bool values_equal(const Value& a, const Value& b) { return a == b; }

std::strong_ordering compare_tuples(const Tuple& a, const Tuple& b) {
  return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(),
                                                b.end());
}

bool type_check(const Value& v, TypeTag t) {
  switch (v.tag()) {
    case Value::Tag::Null: return true;
    case Value::Tag::Bool: return t == TypeTag::Bool;
    case Value::Tag::Int: return t == TypeTag::Int;
    case Value::Tag::Float: return t == TypeTag::Float;
    case Value::Tag::Str: return t == TypeTag::Str;
  }
  return false;
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += '"';
  return out;
}

std::string float_text(double d) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, end);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::optional<std::string> unquote(std::string_view text) {
  if (text.size() < 2 || text.front() != '"' || text.back() != '"') {
    return std::nullopt;
  }
  std::string_view body = text.substr(1, text.size() - 2);
  std::string out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c == '"') return std::nullopt;
    if (c != '\\') {
      out += c;
      continue;
    }
    if (++i == body.size()) return std::nullopt;
    switch (body[i]) {
      case '"': out += '"'; break;
      case '\\': out += '\\'; break;
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case 'r': out += '\r'; break;
      case 'u': {
        if (body.size() - i < 5) return std::nullopt;
        unsigned code = 0;
        auto hex = body.substr(i + 1, 4);
        auto [p, ec] = std::from_chars(hex.data(), hex.data() + hex.size(),
                                       code, 16);
        if (ec != std::errc{} || p != hex.data() + hex.size() || code > 0x7f) {
          return std::nullopt;
        }
        out += static_cast<char>(code);
        i += 4;
        break;
      }
      default:
        return std::nullopt;
    }
  }
  return out;
}

}  // namespace

std::string to_text(const Value& v) {
  switch (v.tag()) {
    case Value::Tag::Null: return "null";
    case Value::Tag::Bool: return v.as_bool() ? "true" : "false";
    case Value::Tag::Int: return std::to_string(v.as_int());
    case Value::Tag::Float: return float_text(v.as_float());
    case Value::Tag::Str: return quote(v.as_str());
  }
  return {};
}

std::string to_text(const Tuple& t) {
  std::string out = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ", ";
    out += to_text(t[i]);
  }
  out += ')';
  return out;
}

std::optional<Value> parse_value(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (text == "null") return Value{};
  if (text == "true") return Value{true};
  if (text == "false") return Value{false};
  if (text.front() == '"') {
    auto s = unquote(text);
    if (!s) return std::nullopt;
    return Value{std::move(*s)};
  }
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (text.find_first_of(".eE") == std::string_view::npos) {
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(first, last, i);
    if (ec != std::errc{} || p != last) return std::nullopt;
    return Value{i};
  }
  double d = 0;
  auto [p, ec] = std::from_chars(first, last, d);
  if (ec != std::errc{} || p != last || !std::isfinite(d)) return std::nullopt;
  return Value{d};
}

}  // namespace cr
