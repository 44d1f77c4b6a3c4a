// Main loop and rule firing.
//
// A dequeued fact is tried against every active occurrence of its constraint
// in (rule, head) order. Partners come from the store only; facts consumed by
// a firing are collected and removed when the pass ends, so every rule that
// fires in one pass sees the same store. The first firing occurrence whose
// head is not kept consumes the active fact and ends the pass; otherwise the
// fact is stored.

#include <algorithm>
#include <set>
#include <utility>

#include "cr/handler.hpp"

namespace cr {

namespace {

using FactKey = std::pair<ConstraintId, KeyTuple>;

void append_unique(std::vector<Fact>& facts, const Fact& f) {
  for (const Fact& existing : facts) {
    if (existing.constraint == f.constraint && existing.key == f.key) return;
  }
  facts.push_back(f);
}

}  // namespace

class Handler::Firing {
 public:
  Firing(Handler& handler, const Rule& rule, std::size_t active_head,
         std::set<FactKey>& removal, RuleFiring& record)
      : handler_(handler),
        store_(handler.state_.store),
        rule_(rule),
        removal_(removal),
        record_(record),
        exit_hook_([&handler] { handler.force_exit(); }) {
    for (std::size_t i = 0; i < rule.heads.size(); ++i) {
      if (i != active_head) partner_heads_.push_back(i);
    }
    chosen_.resize(partner_heads_.size());
  }

  /// Tries every combination of pairwise-distinct partners; returns whether
  /// any combination passed the guards.
  bool run(const BindingFrame& frame) {
    enumerate(0, frame);
    return fired_;
  }

 private:
  struct Chosen {
    ConstraintId constraint;
    const KeyTuple* key = nullptr;
    const DataTuple* data = nullptr;
  };

  void enumerate(std::size_t depth, const BindingFrame& frame) {
    if (depth == partner_heads_.size()) {
      try_fire(frame);
      return;
    }
    const HeadElement& head = rule_.heads[partner_heads_[depth]];
    const Store::Table& table = store_.table(head.constraint);

    KeyTuple prefix;
    for (const Pattern& p : head.key) {
      if (p.kind() == Pattern::Kind::Literal) {
        prefix.push_back(p.value());
      } else if (const Value* v = p.kind() == Pattern::Kind::Bind
                                      ? frame.find(p.symbol().id)
                                      : nullptr) {
        prefix.push_back(*v);
      } else {
        break;
      }
    }

    auto it = prefix.empty() ? table.begin() : table.lower_bound(prefix);
    for (; it != table.end(); ++it) {
      const KeyTuple& key = it->first;
      if (!std::equal(prefix.begin(), prefix.end(), key.begin())) break;
      if (taken(head.constraint, &key, depth)) continue;
      auto extended = match_head(head, head.constraint, key, it->second, frame);
      if (!extended) continue;
      chosen_[depth] = {head.constraint, &key, &it->second};
      enumerate(depth + 1, *extended);
    }
  }

  bool taken(ConstraintId c, const KeyTuple* key, std::size_t depth) const {
    for (std::size_t i = 0; i < depth; ++i) {
      if (chosen_[i].constraint == c && chosen_[i].key == key) return true;
    }
    return false;
  }

  void try_fire(BindingFrame frame) {
    const GuardRegistry& guards = handler_.program_->guards();
    for (const GuardAtom& g : rule_.guards) {
      const GuardSpec& spec = guards.find(g.name)->spec;
      std::vector<GuardArg> args;
      args.reserve(g.args.size());
      for (std::size_t i = 0; i < g.args.size(); ++i) {
        const Pattern& p = g.args[i];
        if (is_out(spec.param_at(i))) {
          args.emplace_back(OutSlot{});
        } else if (p.kind() == Pattern::Kind::Literal) {
          args.emplace_back(p.value());
        } else {
          args.emplace_back(*frame.find(p.symbol().id));
        }
      }
      GuardOutcome outcome =
          guards.invoke(g.name, g.negated, args, &exit_hook_);
      if (!outcome.success) return;
      for (auto& [pos, value] : outcome.outputs) {
        const Symbol& target = g.args[pos].symbol();
        if (!frame.bind(target.id, std::move(value))) {
          throw HandlerError(ErrorCode::EngineFault,
                             "guard '" + g.name + "' overwrote bound symbol '" +
                                 target.name + "'",
                             rule_.index);
        }
      }
    }

    fired_ = true;
    for (const BodyAtom& atom : rule_.body) {
      Fact f = instantiate(atom, frame);
      record_.body.push_back(f);
      handler_.state_.goal.push_back(std::move(f));
    }
    for (std::size_t i = 0; i < partner_heads_.size(); ++i) {
      const Chosen& c = chosen_[i];
      Fact partner{c.constraint, *c.key, *c.data};
      append_unique(record_.partners, partner);
      if (!rule_.heads[partner_heads_[i]].keep) {
        removal_.emplace(c.constraint, *c.key);
        append_unique(record_.consumed, partner);
      }
    }
  }

  Fact instantiate(const BodyAtom& atom, const BindingFrame& frame) const {
    auto fill = [&](const std::vector<Pattern>& patterns) {
      Tuple out;
      out.reserve(patterns.size());
      for (const Pattern& p : patterns) {
        if (p.kind() == Pattern::Kind::Literal) {
          out.push_back(p.value());
          continue;
        }
        const Value* v = frame.find(p.symbol().id);
        if (v == nullptr) {
          throw HandlerError(ErrorCode::EngineFault,
                             "symbol '" + p.symbol().name +
                                 "' was never set before the body",
                             rule_.index);
        }
        out.push_back(*v);
      }
      return out;
    };
    Fact f{atom.constraint, fill(atom.key), fill(atom.data)};
    try {
      handler_.check_fact(f);
    } catch (const HandlerError& e) {
      throw HandlerError(ErrorCode::EngineFault,
                         "body fact rejected: " + e.description(), rule_.index);
    }
    return f;
  }

  Handler& handler_;
  const Store& store_;
  const Rule& rule_;
  std::set<FactKey>& removal_;
  RuleFiring& record_;
  std::function<void()> exit_hook_;
  std::vector<std::size_t> partner_heads_;
  std::vector<Chosen> chosen_;
  bool fired_ = false;
};

void Handler::fire_all_rules(const Fact& active) {
  std::set<FactKey> removal;

  auto remove_marked = [&] {
    for (const auto& [c, key] : removal) {
      const DataTuple* data = state_.store.find(c, key);
      if (data == nullptr) continue;
      Fact gone{c, key, *data};
      state_.store.erase(c, key);
      bus_.emit(Event::removed(std::move(gone)));
    }
  };

  for (const Occurrence& occ : program_->occurrences_of(active.constraint)) {
    const Rule& rule = program_->rule(occ.rule);
    const HeadElement& head = rule.heads[occ.head];
    auto frame = match_head(head, active, BindingFrame{});
    if (!frame) continue;

    RuleFiring record{rule.index, active, {}, {}, {}};
    Firing firing{*this, rule, occ.head, removal, record};
    if (!firing.run(*frame)) continue;

    if (!head.keep) record.consumed.insert(record.consumed.begin(), active);
    bus_.emit(Event::fired(std::move(record)));
    if (!head.keep) {
      remove_marked();
      return;
    }
  }

  remove_marked();
  if (auto displaced = state_.store.upsert(active)) {
    bus_.emit(Event::removed(std::move(*displaced)));
  }
  bus_.emit(Event::stored(active));
}

RunOutcome Handler::main_loop() {
  running_ = true;
  exit_requested_ = false;
  bool limit_hit = false;
  state_.status = Status::Running;
  state_.suspend_reason.reset();

  try {
    while (!exit_requested_ && !limit_hit && !state_.goal.empty()) {
      Fact active = std::move(state_.goal.front());
      state_.goal.pop_front();
      bus_.emit(Event::dequeued(active));

      if (active.constraint == kFailConstraint) {
        state_.status = Status::Failed;
        bus_.emit(Event::failure());
        running_ = false;
        exit_requested_ = false;
        return RunOutcome::Failed;
      }

      fire_all_rules(active);
      if (goal_limit_ && state_.goal.size() > *goal_limit_) limit_hit = true;
    }

    RunOutcome outcome;
    if (state_.goal.empty()) {
      state_.status = Status::Fixpoint;
      outcome = RunOutcome::Fixpoint;
      bus_.emit(Event::fixpoint());
    } else {
      auto reason = exit_requested_ ? SuspendReason::Forced
                                    : SuspendReason::LimitExceeded;
      state_.status = Status::Suspended;
      state_.suspend_reason = reason;
      outcome = RunOutcome::Suspended;
      bus_.emit(Event::suspended(reason));
    }
    running_ = false;
    exit_requested_ = false;
    return outcome;
  } catch (...) {
    state_.status = Status::Failed;
    state_.suspend_reason.reset();
    running_ = false;
    exit_requested_ = false;
    throw;
  }
}

}  // namespace cr
