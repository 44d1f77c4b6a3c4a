#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "cr/error.hpp"
#include "cr/events.hpp"
#include "cr/fact.hpp"
#include "cr/rule_model.hpp"

namespace cr {

enum class RunOutcome { Fixpoint, Suspended, Failed };
enum class Status { Fixpoint, Suspended, Failed, Running };

std::string_view outcome_name(RunOutcome outcome);
std::string_view status_name(Status status);

/// Known facts: one ordered map KeyTuple -> DataTuple per constraint, so each
/// constraint is a partial function and iteration is in key order.
class Store {
 public:
  using Table = std::map<KeyTuple, DataTuple, KeyLess>;

  explicit Store(std::size_t constraint_count = 0) : tables_(constraint_count) {}

  const Table& table(ConstraintId c) const { return tables_.at(c.value); }
  const DataTuple* find(ConstraintId c, const KeyTuple& key) const;
  /// Inserts or replaces; returns the displaced fact, if any.
  std::optional<Fact> upsert(const Fact& fact);
  bool erase(ConstraintId c, const KeyTuple& key);

  std::vector<Fact> facts(ConstraintId c) const;
  std::vector<Fact> all_facts() const;
  std::size_t size() const;

  bool operator==(const Store&) const = default;

 private:
  std::vector<Table> tables_;
};

/// The unit transactions save and restore.
struct HandlerState {
  std::deque<Fact> goal;
  Store store;
  Status status = Status::Fixpoint;
  std::optional<SuspendReason> suspend_reason;

  bool operator==(const HandlerState&) const = default;
};

/// Select pattern: one entry per key position, nullopt matches anything.
using KeyPattern = std::vector<std::optional<Value>>;

/// A compiled handler with its private goal and store. Single-threaded: all
/// calls must come from one thread at a time, listeners included.
class Handler {
 public:
  /// Compiles the program; throws HandlerError if compilation fails.
  explicit Handler(Program program);
  explicit Handler(std::shared_ptr<const CompiledProgram> program);

  const CompiledProgram& program() const { return *program_; }
  const std::shared_ptr<const CompiledProgram>& shared_program() const {
    return program_;
  }

  /// Validates the fact against its signature, appends it to the goal and
  /// runs the main loop.
  RunOutcome tell(Fact fact);
  RunOutcome tell(std::string_view constraint, Tuple key, Tuple data = {});

  /// Runs the main loop on the current goal.
  RunOutcome run();
  /// Continues a suspended computation.
  RunOutcome resume();
  /// From a guard or listener during a run: stop once the current firing pass
  /// finishes. No-op otherwise.
  void force_exit();

  std::vector<Fact> select(ConstraintId constraint,
                           const std::optional<KeyPattern>& key = std::nullopt) const;
  std::vector<Fact> select(std::string_view constraint,
                           const std::optional<KeyPattern>& key = std::nullopt) const;

  void set_goal_limit(std::optional<std::size_t> limit) { goal_limit_ = limit; }
  std::optional<std::size_t> goal_limit() const { return goal_limit_; }

  Status status() const { return state_.status; }
  std::optional<SuspendReason> suspend_reason() const { return state_.suspend_reason; }
  const HandlerState& state() const { return state_; }
  const std::deque<Fact>& goal() const { return state_.goal; }
  const Store& store() const { return state_.store; }
  bool running() const { return running_; }

  /// Nested savepoints over (goal, store, status).
  std::size_t begin();
  std::size_t commit();
  std::size_t partial_commit();
  std::size_t rollback();
  std::size_t depth() const { return savepoints_.size(); }

  SubscriptionId subscribe(Listener listener) { return bus_.subscribe(std::move(listener)); }
  void unsubscribe(SubscriptionId id) { bus_.unsubscribe(id); }
  std::uint64_t last_seq() const { return bus_.last_seq(); }

  /// Checks arity and per-position types against the declared signature.
  void check_fact(const Fact& fact) const;
  Fact make_fact(std::string_view constraint, Tuple key, Tuple data) const;

 private:
  class Firing;

  RunOutcome main_loop();
  void fire_all_rules(const Fact& active);
  void require_idle() const;

  std::shared_ptr<const CompiledProgram> program_;
  HandlerState state_;
  std::vector<HandlerState> savepoints_;
  EventBus bus_;
  std::optional<std::size_t> goal_limit_;
  bool running_ = false;
  bool exit_requested_ = false;
};

}  // namespace cr
