#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cr {

enum class ErrorCode {
  // declarations
  DuplicateConstraint,
  ReservedName,
  DeclarationAfterSetup,
  DuplicateGuard,
  // rule structure and compilation faults
  UnknownConstraint,
  ArityMismatch,
  ModifierOnBody,
  MalformedRule,
  EmptyHead,
  AllHeadsPassive,
  UnknownGuard,
  GuardArityMismatch,
  GuardParamKind,
  UnboundBodySymbol,
  UnboundGuardSymbol,
  NegatedGuardWithOutParam,
  PatternTypeMismatch,
  // runtime
  TypeError,
  TellOnFailed,
  ResumeNotSuspended,
  NotCompiled,
  Busy,
  BeginDuringRun,
  NoOpenTransaction,
  EngineFault,
  UnknownSubscription,
  UnknownRule,
  UnknownBreakpoint,
};

/// Stable kebab-case name used by the CLI and the wire protocol.
std::string_view error_name(ErrorCode code);

/// The single exception type thrown by the library. Compilation faults also
/// carry the 1-based rule index and the 0-based atom position within the rule
/// (heads, then guards, then body atoms).
class HandlerError : public std::runtime_error {
 public:
  HandlerError(ErrorCode code, std::string description,
               std::optional<std::size_t> rule = std::nullopt,
               std::optional<std::size_t> atom = std::nullopt);

  ErrorCode code() const { return code_; }
  const std::string& description() const { return description_; }
  std::optional<std::size_t> rule() const { return rule_; }
  std::optional<std::size_t> atom() const { return atom_; }

 private:
  ErrorCode code_;
  std::string description_;
  std::optional<std::size_t> rule_;
  std::optional<std::size_t> atom_;
};

}  // namespace cr
