#include "cr/events.hpp"

#include <algorithm>
#include <exception>

#include "cr/error.hpp"

namespace cr {

namespace {

constexpr std::pair<EventKind, std::string_view> kKindNames[] = {
    {EventKind::Told, "told"},
    {EventKind::Dequeued, "dequeued"},
    {EventKind::RuleFired, "rule_fired"},
    {EventKind::FactStored, "stored"},
    {EventKind::FactRemoved, "removed"},
    {EventKind::Failure, "failure"},
    {EventKind::Suspended, "suspended"},
    {EventKind::Fixpoint, "fixpoint"},
    {EventKind::TxBegin, "tx_begin"},
    {EventKind::TxCommit, "tx_commit"},
    {EventKind::TxPartialCommit, "tx_partial_commit"},
    {EventKind::TxRollback, "tx_rollback"},
};

std::string render_facts(const CompiledProgram& program,
                         const std::vector<Fact>& facts) {
  std::string out = "[";
  for (std::size_t i = 0; i < facts.size(); ++i) {
    if (i) out += ", ";
    out += program.render(facts[i]);
  }
  return out + "]";
}

bool involves(const Event& event, ConstraintId c) {
  auto is_c = [c](const Fact& f) { return f.constraint == c; };
  if (const auto* f = std::get_if<Fact>(&event.payload)) return is_c(*f);
  if (const auto* r = std::get_if<RuleFiring>(&event.payload)) {
    return is_c(r->active) || std::any_of(r->partners.begin(), r->partners.end(), is_c) ||
           std::any_of(r->body.begin(), r->body.end(), is_c);
  }
  return false;
}

}  // namespace

std::string_view event_kind_name(EventKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::string_view suspend_reason_name(SuspendReason reason) {
  return reason == SuspendReason::Forced ? "forced" : "limit";
}

std::string render_event(const CompiledProgram& program, const Event& event) {
  std::string out = "#" + std::to_string(event.seq) + " ";
  out += event_kind_name(event.kind);
  switch (event.kind) {
    case EventKind::Told:
    case EventKind::Dequeued:
    case EventKind::FactStored:
    case EventKind::FactRemoved:
      out += " " + program.render(event.fact());
      break;
    case EventKind::RuleFired: {
      const RuleFiring& r = event.firing();
      out += " " + std::to_string(r.rule) + " (" + program.rule_label(r.rule) +
             ") on " + program.render(r.active);
      out += " partners=" + render_facts(program, r.partners);
      out += " consumed=" + render_facts(program, r.consumed);
      out += " body=" + render_facts(program, r.body);
      break;
    }
    case EventKind::Suspended:
      out += " ";
      out += suspend_reason_name(event.reason());
      break;
    case EventKind::TxBegin:
    case EventKind::TxCommit:
    case EventKind::TxPartialCommit:
    case EventKind::TxRollback:
      out += " depth=" + std::to_string(event.depth());
      break;
    case EventKind::Failure:
    case EventKind::Fixpoint:
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------

SubscriptionId EventBus::subscribe(Listener listener) {
  SubscriptionId id = next_id_++;
  listeners_.emplace_back(id, std::make_shared<Listener>(std::move(listener)));
  return id;
}

void EventBus::unsubscribe(SubscriptionId id) {
  auto it = std::find_if(listeners_.begin(), listeners_.end(),
                         [id](const auto& e) { return e.first == id; });
  if (it == listeners_.end()) {
    throw HandlerError(ErrorCode::UnknownSubscription,
                       "no subscription " + std::to_string(id));
  }
  listeners_.erase(it);
}

void EventBus::emit(Event event) {
  event.seq = ++seq_;
  if (listeners_.empty()) return;
  auto snapshot = listeners_;
  for (const auto& [id, listener] : snapshot) {
    try {
      (*listener)(event);
    } catch (const std::exception& e) {
      throw HandlerError(ErrorCode::EngineFault,
                         std::string{"listener failed: "} + e.what());
    }
  }
}

// ---------------------------------------------------------------------------

Debugger::Debugger(std::shared_ptr<const CompiledProgram> program, Waiter waiter)
    : program_(std::move(program)), waiter_(std::move(waiter)) {}

std::uint64_t Debugger::add(Breakpoint bp) {
  if (bp.kind == Breakpoint::Kind::Rule &&
      (bp.rule == 0 || bp.rule > program_->rules().size())) {
    throw HandlerError(ErrorCode::UnknownRule,
                       "no rule " + std::to_string(bp.rule));
  }
  if (bp.kind == Breakpoint::Kind::Constraint &&
      bp.constraint.value >= program_->constraints().size()) {
    throw HandlerError(ErrorCode::UnknownConstraint, "no such constraint");
  }
  std::uint64_t id = next_id_++;
  breakpoints_.emplace_back(id, bp);
  return id;
}

void Debugger::remove(std::uint64_t id) {
  auto it = std::find_if(breakpoints_.begin(), breakpoints_.end(),
                         [id](const auto& e) { return e.first == id; });
  if (it == breakpoints_.end()) {
    throw HandlerError(ErrorCode::UnknownBreakpoint,
                       "no breakpoint " + std::to_string(id));
  }
  breakpoints_.erase(it);
}

bool Debugger::matches(const Event& event) const {
  for (const auto& [id, bp] : breakpoints_) {
    switch (bp.kind) {
      case Breakpoint::Kind::Rule:
        if (event.kind == EventKind::RuleFired && event.firing().rule == bp.rule) {
          return true;
        }
        break;
      case Breakpoint::Kind::Constraint:
        if (involves(event, bp.constraint)) return true;
        break;
      case Breakpoint::Kind::Step:
        if (event.kind == EventKind::Dequeued) return true;
        break;
    }
  }
  return false;
}

void Debugger::check_pause(const Event& event) {
  bool step_hit = step_armed_ && event.kind == EventKind::Dequeued;
  if (!step_hit && !matches(event)) return;
  step_armed_ = false;
  paused_at_ = event;
  ResumeAction action = ResumeAction::Continue;
  try {
    action = waiter_(event);
  } catch (...) {
    paused_at_.reset();
    throw;
  }
  paused_at_.reset();
  step_armed_ = action == ResumeAction::Step;
}

}  // namespace cr
