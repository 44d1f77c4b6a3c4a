#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cr/handler.hpp"
#include "cr/rule_model.hpp"

namespace cr::solvers {

/// Order and interval handler over string-named variables:
///   leq, lt, eq, neq : (str, str) -> ()
///   dom              : (str) -> (int, int)
/// with guards lessOrEqual, includes and isect alongside the builtin equals.
/// Rules, in order:
///    1 leq(X,X) is trivially true             7 eq is symmetric
///    2 eq(X,X) is trivially true              8 equal variables swap domains
///    3 lt(X,Y) => leq(X,Y), neq(X,Y)          9 an empty domain fails
///    4 neq(X,X) fails                        10 a wider new domain is dropped
///    5 leq(X,Y), leq(Y,X) => eq(X,Y)         11 otherwise domains intersect
///    6 a known eq(X,Y) absorbs a new copy
Program order_interval_program();
Handler build_order_interval_handler();

/// Names accepted by make_program.
std::vector<std::string> handler_names();
std::optional<Program> make_program(std::string_view name);

using Bounds = std::pair<std::int64_t, std::int64_t>;

/// Closed form the dom rules must reach for one variable: the intersection
/// of all told intervals, or nullopt when it is empty.
std::optional<Bounds> interval_fixpoint_bounds(const std::vector<Bounds>& told);

}  // namespace cr::solvers
