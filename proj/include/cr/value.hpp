#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cr {

enum class TypeTag { Bool, Int, Float, Str };

std::string_view type_name(TypeTag tag);
std::optional<TypeTag> parse_type_name(std::string_view name);

/// Scalar contents of key and data fields: null, bool, int64, finite double
/// or a UTF-8 string. Values are immutable once built.
class Value {
 public:
  enum class Tag { Null, Bool, Int, Float, Str };

  Value() = default;
  Value(std::nullptr_t) {}
  Value(bool b) : payload_(b) {}
  Value(std::int64_t i) : payload_(i) {}
  Value(int i) : payload_(std::int64_t{i}) {}
  Value(long long i) : payload_(static_cast<std::int64_t>(i)) {}
  Value(const char* s) : payload_(std::string{s}) {}
  Value(std::string s) : payload_(std::move(s)) {}
  Value(std::string_view s) : payload_(std::string{s}) {}
  /// Throws std::invalid_argument for NaN and infinities.
  Value(double d);

  Tag tag() const { return static_cast<Tag>(payload_.index()); }
  bool is_null() const { return tag() == Tag::Null; }

  bool as_bool() const { return std::get<bool>(payload_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(payload_); }
  double as_float() const { return std::get<double>(payload_); }
  const std::string& as_str() const { return std::get<std::string>(payload_); }

  friend std::strong_ordering operator<=>(const Value& a, const Value& b);
  friend bool operator==(const Value& a, const Value& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }

 private:
  std::variant<std::monostate, bool, std::int64_t, double, std::string>
      payload_;
};

using Tuple = std::vector<Value>;
using KeyTuple = Tuple;
using DataTuple = Tuple;

/// Total order: Null < Bool < Int < Float < Str, natural order within a tag.
std::strong_ordering compare_values(const Value& a, const Value& b);
bool values_equal(const Value& a, const Value& b);
std::strong_ordering compare_tuples(const Tuple& a, const Tuple& b);

/// True when v is null or carries the tag t.
bool type_check(const Value& v, TypeTag t);

/// Canonical text: null, true/false, decimal ints, floats with '.' or an
/// exponent, double-quoted strings with backslash escapes.
std::string to_text(const Value& v);
std::string to_text(const Tuple& t);

/// Parses one canonical literal; returns nullopt on malformed input.
std::optional<Value> parse_value(std::string_view text);

}  // namespace cr
