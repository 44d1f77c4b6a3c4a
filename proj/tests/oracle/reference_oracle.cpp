#include "reference_oracle.hpp"

#include <algorithm>
#include <map>

namespace cr::oracle {

namespace {

using Env = std::map<std::uint32_t, Value>;

bool same_slot(const Fact& a, const Fact& b) {
  return a.constraint == b.constraint && compare_tuples(a.key, b.key) == 0;
}

bool slot_less(const Fact& a, const Fact& b) {
  if (a.constraint != b.constraint) return a.constraint < b.constraint;
  return compare_tuples(a.key, b.key) < 0;
}

bool match_one(const Pattern& p, const Value& v, Env& env) {
  switch (p.kind()) {
    case Pattern::Kind::Wildcard:
      return true;
    case Pattern::Kind::Literal:
      return values_equal(p.value(), v);
    case Pattern::Kind::Bind: {
      auto it = env.find(p.symbol().id.value);
      if (it == env.end()) {
        env.emplace(p.symbol().id.value, v);
        return true;
      }
      return values_equal(it->second, v);
    }
  }
  return false;
}

bool match(const HeadElement& h, const Fact& f, Env& env) {
  if (h.constraint != f.constraint) return false;
  if (h.key.size() != f.key.size() || h.data.size() != f.data.size()) return false;
  for (std::size_t i = 0; i < h.key.size(); ++i) {
    if (!match_one(h.key[i], f.key[i], env)) return false;
  }
  for (std::size_t i = 0; i < h.data.size(); ++i) {
    if (!match_one(h.data[i], f.data[i], env)) return false;
  }
  return true;
}

class Machine {
 public:
  Machine(const CompiledProgram& p, std::optional<std::size_t> limit,
          std::optional<std::size_t> budget)
      : p_(p), limit_(limit), budget_(budget) {}

  void tell(const Fact& f) {
    r_.goal.push_back(f);
    emit(Event::told(f));
    main_loop();
  }

  OracleResult finish() {
    std::sort(store_.begin(), store_.end(), slot_less);
    r_.store = store_;
    return std::move(r_);
  }

  Status status() const { return r_.status; }

 private:
  void emit(Event e) {
    e.seq = r_.events.size() + 1;
    r_.events.push_back(std::move(e));
  }

  void main_loop() {
    bool exit = false;
    r_.suspend_reason.reset();
    r_.status = Status::Running;
    bool over = false;
    while (!exit && !over && !r_.goal.empty()) {
      Fact f = r_.goal.front();
      r_.goal.pop_front();
      emit(Event::dequeued(f));
      ++dequeues_;
      if (budget_ && dequeues_ >= *budget_) {
        exit = true;
        r_.budget_tripped = true;
      }
      if (f.constraint == kFailConstraint) {
        r_.status = Status::Failed;
        emit(Event::failure());
        return;
      }
      fire_all(f);
      if (limit_ && r_.goal.size() > *limit_) over = true;
    }
    if (r_.goal.empty()) {
      r_.status = Status::Fixpoint;
      emit(Event::fixpoint());
    } else {
      r_.status = Status::Suspended;
      r_.suspend_reason = exit ? SuspendReason::Forced : SuspendReason::LimitExceeded;
      emit(Event::suspended(*r_.suspend_reason));
    }
  }

  std::vector<Fact> candidates(ConstraintId c) const {
    std::vector<Fact> out;
    for (const Fact& f : store_) {
      if (f.constraint == c) out.push_back(f);
    }
    std::sort(out.begin(), out.end(), slot_less);
    return out;
  }

  // Every combination of distinct store facts for the non-active heads, in
  // key order per head, first head varying slowest.
  void combos(const Rule& rule, std::size_t active_head, std::size_t i,
              std::vector<Fact>& chosen, const Env& env,
              std::vector<std::pair<std::vector<Fact>, Env>>& out) const {
    if (i == rule.heads.size()) {
      out.emplace_back(chosen, env);
      return;
    }
    if (i == active_head) {
      combos(rule, active_head, i + 1, chosen, env, out);
      return;
    }
    for (const Fact& f : candidates(rule.heads[i].constraint)) {
      bool dup = false;
      for (const Fact& c : chosen) dup = dup || same_slot(c, f);
      if (dup) continue;
      Env e = env;
      if (!match(rule.heads[i], f, e)) continue;
      chosen.push_back(f);
      combos(rule, active_head, i + 1, chosen, e, out);
      chosen.pop_back();
    }
  }

  bool guards_pass(const Rule& rule, Env& env) {
    for (const GuardAtom& g : rule.guards) {
      const GuardSpec& spec = p_.guards().find(g.name)->spec;
      std::vector<GuardArg> args;
      for (std::size_t i = 0; i < g.args.size(); ++i) {
        const Pattern& a = g.args[i];
        if (is_out(spec.param_at(i))) {
          args.emplace_back(OutSlot{});
        } else if (a.kind() == Pattern::Kind::Literal) {
          args.emplace_back(a.value());
        } else {
          args.emplace_back(env.at(a.symbol().id.value));
        }
      }
      GuardOutcome o = p_.guards().invoke(g.name, g.negated, args);
      if (!o.success) return false;
      for (auto& [pos, v] : o.outputs) {
        auto [it, fresh] = env.emplace(g.args[pos].symbol().id.value, v);
        if (!fresh) throw HandlerError(ErrorCode::EngineFault, "rebound", rule.index);
      }
    }
    return true;
  }

  Fact build(const BodyAtom& b, const Env& env) const {
    auto fill = [&](const std::vector<Pattern>& ps) {
      Tuple t;
      for (const Pattern& p : ps) {
        if (p.kind() == Pattern::Kind::Literal) {
          t.push_back(p.value());
        } else {
          auto it = env.find(p.symbol().id.value);
          if (it == env.end()) throw HandlerError(ErrorCode::EngineFault, "unset");
          t.push_back(it->second);
        }
      }
      return t;
    };
    return Fact{b.constraint, fill(b.key), fill(b.data)};
  }

  void fire_all(const Fact& active) {
    std::vector<Fact> doomed;
    auto add = [](std::vector<Fact>& v, const Fact& f) {
      for (const Fact& x : v) {
        if (same_slot(x, f)) return;
      }
      v.push_back(f);
    };
    auto remove_doomed = [&] {
      std::sort(doomed.begin(), doomed.end(), slot_less);
      for (const Fact& d : doomed) {
        auto it = std::find_if(store_.begin(), store_.end(),
                               [&](const Fact& f) { return same_slot(f, d); });
        if (it == store_.end()) continue;
        Fact gone = *it;
        store_.erase(it);
        emit(Event::removed(gone));
      }
    };

    for (const Rule& rule : p_.rules()) {
      for (std::size_t h = 0; h < rule.heads.size(); ++h) {
        const HeadElement& head = rule.heads[h];
        if (head.passive || head.constraint != active.constraint) continue;
        Env env;
        if (!match(head, active, env)) continue;

        std::vector<std::pair<std::vector<Fact>, Env>> all;
        std::vector<Fact> chosen;
        combos(rule, h, 0, chosen, env, all);

        RuleFiring rec{rule.index, active, {}, {}, {}};
        bool fired = false;
        for (auto& [partners, e] : all) {
          if (!guards_pass(rule, e)) continue;
          fired = true;
          for (const BodyAtom& b : rule.body) {
            Fact f = build(b, e);
            rec.body.push_back(f);
            r_.goal.push_back(f);
          }
          std::size_t k = 0;
          for (std::size_t i = 0; i < rule.heads.size(); ++i) {
            if (i == h) continue;
            const Fact& pf = partners[k++];
            add(rec.partners, pf);
            if (!rule.heads[i].keep) {
              add(doomed, pf);
              add(rec.consumed, pf);
            }
          }
        }
        if (!fired) continue;
        if (!head.keep) rec.consumed.insert(rec.consumed.begin(), active);
        emit(Event::fired(rec));
        if (!head.keep) {
          remove_doomed();
          return;
        }
      }
    }
    remove_doomed();
    auto it = std::find_if(store_.begin(), store_.end(),
                           [&](const Fact& f) { return same_slot(f, active); });
    if (it != store_.end()) {
      Fact old = *it;
      *it = active;
      emit(Event::removed(old));
    } else {
      store_.push_back(active);
    }
    emit(Event::stored(active));
  }

  const CompiledProgram& p_;
  std::optional<std::size_t> limit_;
  std::optional<std::size_t> budget_;
  std::vector<Fact> store_;
  OracleResult r_;
  std::size_t dequeues_ = 0;
};

}  // namespace

OracleResult oracle_run(const CompiledProgram& program,
                        const std::vector<Fact>& tells,
                        std::optional<std::size_t> goal_limit,
                        std::optional<std::size_t> dequeue_budget) {
  Machine m{program, goal_limit, dequeue_budget};
  for (const Fact& f : tells) {
    if (m.status() == Status::Failed) break;
    m.tell(f);
  }
  return m.finish();
}

std::vector<EventKind> kinds(const std::vector<Event>& events) {
  std::vector<EventKind> out;
  out.reserve(events.size());
  for (const Event& e : events) out.push_back(e.kind);
  return out;
}

}  // namespace cr::oracle
