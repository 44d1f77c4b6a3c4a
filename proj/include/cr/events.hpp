#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cr/fact.hpp"
#include "cr/rule_model.hpp"

namespace cr {

enum class EventKind {
  Told,
  Dequeued,
  RuleFired,
  FactStored,
  FactRemoved,
  Failure,
  Suspended,
  Fixpoint,
  TxBegin,
  TxCommit,
  TxPartialCommit,
  TxRollback,
};

std::string_view event_kind_name(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view name);

enum class SuspendReason { Forced, LimitExceeded };

std::string_view suspend_reason_name(SuspendReason reason);

/// Everything one active occurrence did during a firing pass, aggregated over
/// all of its successful match combinations.
struct RuleFiring {
  std::size_t rule = 0;
  Fact active;
  std::vector<Fact> partners;
  std::vector<Fact> consumed;
  std::vector<Fact> body;

  bool operator==(const RuleFiring&) const = default;
};

struct Event {
  using Payload =
      std::variant<std::monostate, Fact, RuleFiring, SuspendReason, std::size_t>;

  std::uint64_t seq = 0;
  EventKind kind = EventKind::Fixpoint;
  Payload payload;

  const Fact& fact() const { return std::get<Fact>(payload); }
  const RuleFiring& firing() const { return std::get<RuleFiring>(payload); }
  SuspendReason reason() const { return std::get<SuspendReason>(payload); }
  std::size_t depth() const { return std::get<std::size_t>(payload); }

  bool operator==(const Event&) const = default;

  static Event told(Fact f) { return {0, EventKind::Told, std::move(f)}; }
  static Event dequeued(Fact f) { return {0, EventKind::Dequeued, std::move(f)}; }
  static Event stored(Fact f) { return {0, EventKind::FactStored, std::move(f)}; }
  static Event removed(Fact f) { return {0, EventKind::FactRemoved, std::move(f)}; }
  static Event fired(RuleFiring r) { return {0, EventKind::RuleFired, std::move(r)}; }
  static Event failure() { return {0, EventKind::Failure, {}}; }
  static Event fixpoint() { return {0, EventKind::Fixpoint, {}}; }
  static Event suspended(SuspendReason r) { return {0, EventKind::Suspended, r}; }
  static Event transaction(EventKind k, std::size_t depth) { return {0, k, depth}; }
};

/// One line of human-readable trace output, e.g. `#4 stored leq("a", "b")`.
std::string render_event(const CompiledProgram& program, const Event& event);

using Listener = std::function<void(const Event&)>;
using SubscriptionId = std::uint64_t;

/// Synchronous publish-subscribe. Listeners run on the emitting thread in
/// subscription order; a listener added or removed during dispatch takes
/// effect from the next event. A throwing listener turns into EngineFault.
class EventBus {
 public:
  SubscriptionId subscribe(Listener listener);
  void unsubscribe(SubscriptionId id);
  std::size_t listener_count() const { return listeners_.size(); }

  /// Stamps the next sequence number and dispatches.
  void emit(Event event);
  std::uint64_t last_seq() const { return seq_; }

 private:
  std::vector<std::pair<SubscriptionId, std::shared_ptr<Listener>>> listeners_;
  SubscriptionId next_id_ = 1;
  std::uint64_t seq_ = 0;
};

struct Breakpoint {
  enum class Kind { Rule, Constraint, Step };
  Kind kind = Kind::Step;
  std::size_t rule = 0;
  ConstraintId constraint;

  static Breakpoint on_rule(std::size_t index) { return {Kind::Rule, index, {}}; }
  static Breakpoint on_constraint(ConstraintId c) { return {Kind::Constraint, 0, c}; }
  static Breakpoint step_mode() { return {Kind::Step, 0, {}}; }
  bool operator==(const Breakpoint&) const = default;
};

enum class ResumeAction { Continue, Step };

/// Breakpoint matching and the pause hook. check_pause is meant to be called
/// from a listener; when an event matches, it hands control to the waiter,
/// which blocks until the user continues or steps. Stepping pauses again at
/// the next Dequeued event.
class Debugger {
 public:
  using Waiter = std::function<ResumeAction(const Event&)>;

  Debugger(std::shared_ptr<const CompiledProgram> program, Waiter waiter);

  std::uint64_t add(Breakpoint bp);
  void remove(std::uint64_t id);
  const std::vector<std::pair<std::uint64_t, Breakpoint>>& breakpoints() const {
    return breakpoints_;
  }

  bool matches(const Event& event) const;
  void check_pause(const Event& event);
  bool paused() const { return paused_at_.has_value(); }
  const std::optional<Event>& paused_at() const { return paused_at_; }

 private:
  std::shared_ptr<const CompiledProgram> program_;
  Waiter waiter_;
  std::vector<std::pair<std::uint64_t, Breakpoint>> breakpoints_;
  std::uint64_t next_id_ = 1;
  bool step_armed_ = false;
  std::optional<Event> paused_at_;
};

}  // namespace cr
