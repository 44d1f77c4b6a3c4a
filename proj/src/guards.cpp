#include "cr/guards.hpp"

#include <exception>

#include "cr/error.hpp"

namespace cr {

bool GuardSpec::accepts_arity(std::size_t n) const {
  return variadic_tail ? n >= params.size() : n == params.size();
}

const ParamSpec& GuardSpec::param_at(std::size_t i) const {
  return i < params.size() ? params[i] : *variadic_tail;
}

const Value& GuardCall::arg(std::size_t i) const {
  const auto* v = std::get_if<Value>(&args_[i]);
  if (v == nullptr) {
    throw HandlerError(ErrorCode::EngineFault,
                       "guard read out-parameter " + std::to_string(i));
  }
  return *v;
}

void GuardCall::set(std::size_t i, Value v) {
  if (i >= args_.size() || !std::holds_alternative<OutSlot>(args_[i])) {
    throw HandlerError(ErrorCode::EngineFault,
                       "guard wrote non-out parameter " + std::to_string(i));
  }
  outputs_[i] = std::move(v);
}

void GuardCall::force_exit() const {
  if (exit_hook_ != nullptr && *exit_hook_) (*exit_hook_)();
}

GuardRegistry::GuardRegistry() {
  register_guard({"equals", {in_any(), in_any()}, std::nullopt, true},
                 [](GuardCall& call) { return call.arg(0) == call.arg(1); });
}

void GuardRegistry::register_guard(GuardSpec spec, GuardFn fn) {
  if (spec.name.empty() || spec.name.front() == '!') {
    throw HandlerError(ErrorCode::ReservedName,
                       "invalid guard name '" + spec.name + "'");
  }
  if (entries_.contains(spec.name)) {
    throw HandlerError(ErrorCode::DuplicateGuard,
                       "guard '" + spec.name + "' already registered");
  }
  auto name = spec.name;
  entries_.emplace(std::move(name), Entry{std::move(spec), std::move(fn)});
}

const GuardRegistry::Entry* GuardRegistry::find(std::string_view name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> GuardRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, entry] : entries_) out.push_back(name);
  return out;
}

namespace {

bool arguments_admissible(const GuardSpec& spec,
                          std::span<const GuardArg> args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto* param = std::get_if<InParam>(&spec.param_at(i));
    if (param == nullptr) continue;
    const auto& v = std::get<Value>(args[i]);
    if (v.is_null()) {
      if (!param->nullable) return false;
    } else if (param->type && !type_check(v, *param->type)) {
      return false;
    }
  }
  return true;
}

}  // namespace

GuardOutcome GuardRegistry::invoke(std::string_view name, bool negated,
                                   std::span<const GuardArg> args,
                                   const std::function<void()>* exit_hook) const {
  const Entry* entry = find(name);
  if (entry == nullptr) {
    throw HandlerError(ErrorCode::UnknownGuard,
                       "guard '" + std::string{name} + "' is not registered");
  }
  const GuardSpec& spec = entry->spec;
  if (!spec.accepts_arity(args.size())) {
    throw HandlerError(ErrorCode::GuardArityMismatch,
                       "guard '" + spec.name + "' called with " +
                           std::to_string(args.size()) + " arguments");
  }
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (is_out(spec.param_at(i)) != std::holds_alternative<OutSlot>(args[i])) {
      throw HandlerError(ErrorCode::EngineFault,
                         "guard '" + spec.name + "' argument " +
                             std::to_string(i) + " has the wrong kind");
    }
  }

  GuardOutcome plain;
  if (arguments_admissible(spec, args)) {
    std::vector<std::optional<Value>> outputs(args.size());
    GuardCall call{args, outputs, exit_hook};
    bool truth = false;
    try {
      truth = entry->fn(call);
    } catch (const HandlerError&) {
      throw;
    } catch (const std::exception& e) {
      throw HandlerError(ErrorCode::EngineFault,
                         "guard '" + spec.name + "' raised: " + e.what());
    }
    plain.success = truth || !spec.returns_truth;
    if (plain.success) {
      for (std::size_t i = 0; i < outputs.size(); ++i) {
        if (outputs[i]) plain.outputs.emplace_back(i, std::move(*outputs[i]));
      }
    }
  }

  if (!negated) return plain;
  return GuardOutcome{!plain.success, {}};
}

}  // namespace cr
