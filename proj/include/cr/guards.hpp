#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cr/value.hpp"

namespace cr {

/// An input parameter. An empty type admits any tag.
struct InParam {
  std::optional<TypeTag> type;
  bool nullable = false;
};

/// An output parameter: receives a writable cell for an unbound symbol.
struct OutParam {};

using ParamSpec = std::variant<InParam, OutParam>;

inline ParamSpec in(TypeTag t, bool nullable = false) {
  return InParam{t, nullable};
}
inline ParamSpec in_any(bool nullable = true) {
  return InParam{std::nullopt, nullable};
}
inline ParamSpec out() { return OutParam{}; }

inline bool is_out(const ParamSpec& p) {
  return std::holds_alternative<OutParam>(p);
}

struct GuardSpec {
  std::string name;
  std::vector<ParamSpec> params;
  std::optional<ParamSpec> variadic_tail;
  /// When false the function's return value is ignored and success is
  /// decided by the argument check alone.
  bool returns_truth = true;

  bool accepts_arity(std::size_t n) const;
  /// Parameter governing argument position i; requires accepts_arity(i + 1)
  /// or a variadic tail.
  const ParamSpec& param_at(std::size_t i) const;
};

/// Marker for an argument position that receives an out-binding.
struct OutSlot {};
using GuardArg = std::variant<Value, OutSlot>;

/// The view a guard function gets of its invocation.
class GuardCall {
 public:
  GuardCall(std::span<const GuardArg> args,
            std::vector<std::optional<Value>>& outputs,
            const std::function<void()>* exit_hook)
      : args_(args), outputs_(outputs), exit_hook_(exit_hook) {}

  std::size_t size() const { return args_.size(); }
  const Value& arg(std::size_t i) const;
  std::int64_t int_arg(std::size_t i) const { return arg(i).as_int(); }
  /// Writes the out-parameter at position i.
  void set(std::size_t i, Value v);
  /// Asks the running main loop to stop after the current firing pass.
  void force_exit() const;

 private:
  std::span<const GuardArg> args_;
  std::vector<std::optional<Value>>& outputs_;
  const std::function<void()>* exit_hook_;
};

using GuardFn = std::function<bool(GuardCall&)>;

struct GuardOutcome {
  bool success = false;
  /// (argument position, value) for every out-parameter the guard wrote.
  std::vector<std::pair<std::size_t, Value>> outputs;
};

class GuardRegistry {
 public:
  struct Entry {
    GuardSpec spec;
    GuardFn fn;
  };

  /// Starts with the builtin nullable `equals` guard.
  GuardRegistry();

  void register_guard(GuardSpec spec, GuardFn fn);
  const Entry* find(std::string_view name) const;
  std::vector<std::string> names() const;

  /// Runs a guard. Arguments failing the type or null check make the plain
  /// invocation fail without calling the function; a negated invocation
  /// succeeds exactly when the plain one fails and never yields outputs.
  /// Exceptions from the function surface as EngineFault.
  GuardOutcome invoke(std::string_view name, bool negated,
                      std::span<const GuardArg> args,
                      const std::function<void()>* exit_hook = nullptr) const;

 private:
  std::map<std::string, Entry, std::less<>> entries_;
};

}  // namespace cr
