#pragma once

#include <compare>
#include <cstdint>
#include <functional>

#include "cr/value.hpp"

namespace cr {

struct ConstraintId {
  std::uint32_t value = 0;
  auto operator<=>(const ConstraintId&) const = default;
};

/// Id 0 is always the predefined nullary `fail` constraint.
inline constexpr ConstraintId kFailConstraint{0};

/// One defined point c : key -> data of a constraint's partial function.
struct Fact {
  ConstraintId constraint;
  KeyTuple key;
  DataTuple data;

  bool operator==(const Fact&) const = default;
};

/// Orders facts by constraint, then key, then data.
inline std::strong_ordering compare_facts(const Fact& a, const Fact& b) {
  if (auto c = a.constraint <=> b.constraint; c != 0) return c;
  if (auto c = compare_tuples(a.key, b.key); c != 0) return c;
  return compare_tuples(a.data, b.data);
}

/// Transparent key comparator so a shorter tuple can probe for its prefix.
struct KeyLess {
  using is_transparent = void;
  bool operator()(const Tuple& a, const Tuple& b) const {
    return compare_tuples(a, b) < 0;
  }
};

}  // namespace cr
