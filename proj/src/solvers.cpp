#include "cr/solvers.hpp"

#include <algorithm>
#include <stdexcept>

namespace cr::solvers {

Program order_interval_program() {
  Program p{"order-interval"};
  Symbol leq = p.symbol("leq");
  Symbol lt = p.symbol("lt");
  Symbol eq = p.symbol("eq");
  Symbol neq = p.symbol("neq");
  Symbol dom = p.symbol("dom");
  Symbol X = p.symbol("X"), Y = p.symbol("Y");
  Symbol A = p.symbol("A"), B = p.symbol("B");
  Symbol C = p.symbol("C"), D = p.symbol("D");
  Symbol E = p.symbol("E"), F = p.symbol("F");
  const Symbol& fail = p.fail();

  p.constraint(leq, TypeTag::Str, TypeTag::Str);
  p.constraint(lt, TypeTag::Str, TypeTag::Str);
  p.constraint(eq, TypeTag::Str, TypeTag::Str);
  p.constraint(neq, TypeTag::Str, TypeTag::Str);
  p.constraint(dom, TypeTag::Str).with(TypeTag::Int, TypeTag::Int);

  p.guard({"lessOrEqual", {in(TypeTag::Int), in(TypeTag::Int)}, std::nullopt, true},
          [](GuardCall& c) { return c.int_arg(0) <= c.int_arg(1); });
  p.guard({"includes", {in(TypeTag::Int), in(TypeTag::Int), in(TypeTag::Int),
                        in(TypeTag::Int)},
           std::nullopt,
           true},
          [](GuardCall& c) {
            return c.int_arg(0) <= c.int_arg(2) && c.int_arg(3) <= c.int_arg(1);
          });
  p.guard({"isect",
           {in(TypeTag::Int), in(TypeTag::Int), in(TypeTag::Int), in(TypeTag::Int),
            out(), out()},
           std::nullopt,
           false},
          [](GuardCall& c) {
            c.set(4, std::max(c.int_arg(0), c.int_arg(2)));
            c.set(5, std::min(c.int_arg(1), c.int_arg(3)));
            return true;
          });

  p.when(leq, X, X).label("leq-reflexive");
  p.when(eq, X, X).label("eq-reflexive");
  p.when(lt, X, Y).then(leq, X, Y).and_(neq, X, Y).label("lt-split");
  p.when(neq, X, X).then(fail).label("neq-irreflexive");
  p.when(leq, X, Y)
      .and_(leq, Y, X).passive()
      .then(eq, X, Y)
      .label("leq-antisymmetric");
  p.when(eq, X, Y)
      .and_(eq, X, Y).passive().keep()
      .label("eq-duplicate");
  p.when(eq, X, Y).keep()
      .then(eq, Y, X)
      .label("eq-symmetric");
  p.when(eq, X, Y).keep()
      .and_(dom, X).with(A, B).keep()
      .and_(dom, Y).with(C, D).keep()
      .where("!equals", X, Y)
      .then(dom, X).with(C, D)
      .and_(dom, Y).with(A, B)
      .label("eq-dom-propagate");
  p.when(dom, X).with(A, B)
      .and_("!lessOrEqual", A, B)
      .then(fail)
      .label("dom-empty");
  p.when(dom, X).with(A, B)
      .and_(dom, X).with(C, D).passive().keep()
      .where("includes", A, B, C, D)
      .label("dom-redundant");
  p.when(dom, X).with(A, B)
      .and_(dom, X).with(C, D).passive()
      .where("!includes", A, B, C, D)
      .and_("isect", A, B, C, D, E, F)
      .then(dom, X).with(E, F)
      .label("dom-intersect");
  return p;
}

Handler build_order_interval_handler() {
  return Handler{order_interval_program()};
}

std::vector<std::string> handler_names() { return {"order-interval"}; }

std::optional<Program> make_program(std::string_view name) {
  if (name == "order-interval") return order_interval_program();
  return std::nullopt;
}

std::optional<Bounds> interval_fixpoint_bounds(const std::vector<Bounds>& told) {
  if (told.empty()) throw std::invalid_argument("no bounds told");
  Bounds acc = told.front();
  for (const auto& [lo, hi] : told) {
    acc.first = std::max(acc.first, lo);
    acc.second = std::min(acc.second, hi);
  }
  if (acc.first > acc.second) return std::nullopt;
  return acc;
}

}  // namespace cr::solvers
