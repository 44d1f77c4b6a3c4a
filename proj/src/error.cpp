#include "cr/error.hpp"

namespace cr {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateConstraint: return "duplicate-constraint";
    case ErrorCode::ReservedName: return "reserved-name";
    case ErrorCode::DeclarationAfterSetup: return "declaration-after-setup";
    case ErrorCode::DuplicateGuard: return "duplicate-guard";
    case ErrorCode::UnknownConstraint: return "unknown-constraint";
    case ErrorCode::ArityMismatch: return "arity-mismatch";
    case ErrorCode::ModifierOnBody: return "modifier-on-body";
    case ErrorCode::MalformedRule: return "malformed-rule";
    case ErrorCode::EmptyHead: return "empty-head";
    case ErrorCode::AllHeadsPassive: return "all-heads-passive";
    case ErrorCode::UnknownGuard: return "unknown-guard";
    case ErrorCode::GuardArityMismatch: return "guard-arity-mismatch";
    case ErrorCode::GuardParamKind: return "guard-param-kind";
    case ErrorCode::UnboundBodySymbol: return "unbound-body-symbol";
    case ErrorCode::UnboundGuardSymbol: return "unbound-guard-symbol";
    case ErrorCode::NegatedGuardWithOutParam:
      return "negated-guard-with-out-param";
    case ErrorCode::PatternTypeMismatch: return "pattern-type-mismatch";
    case ErrorCode::TypeError: return "type-error";
    case ErrorCode::TellOnFailed: return "tell-on-failed";
    case ErrorCode::ResumeNotSuspended: return "resume-not-suspended";
    case ErrorCode::NotCompiled: return "not-compiled";
    case ErrorCode::Busy: return "busy";
    case ErrorCode::BeginDuringRun: return "begin-during-run";
    case ErrorCode::NoOpenTransaction: return "no-open-transaction";
    case ErrorCode::EngineFault: return "engine-fault";
    case ErrorCode::UnknownSubscription: return "unknown-subscription";
    case ErrorCode::UnknownRule: return "unknown-rule";
    case ErrorCode::UnknownBreakpoint: return "unknown-breakpoint";
  }
  return "unknown";
}

namespace {

std::string format_what(ErrorCode code, const std::string& description,
                        std::optional<std::size_t> rule,
                        std::optional<std::size_t> atom) {
  std::string out{error_name(code)};
  if (rule) {
    out += " (rule " + std::to_string(*rule);
    if (atom) out += ", atom " + std::to_string(*atom);
    out += ')';
  }
  if (!description.empty()) out += ": " + description;
  return out;
}

}  // namespace

HandlerError::HandlerError(ErrorCode code, std::string description,
                           std::optional<std::size_t> rule,
                           std::optional<std::size_t> atom)
    : std::runtime_error(format_what(code, description, rule, atom)),
      code_(code),
      description_(std::move(description)),
      rule_(rule),
      atom_(atom) {}

}  // namespace cr
