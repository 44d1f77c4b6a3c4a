#include "cr/handler.hpp"

#include <algorithm>

namespace cr {

std::string_view outcome_name(RunOutcome outcome) {
  switch (outcome) {
    case RunOutcome::Fixpoint: return "fixpoint";
    case RunOutcome::Suspended: return "suspended";
    case RunOutcome::Failed: return "failed";
  }
  return "?";
}

std::string_view status_name(Status status) {
  switch (status) {
    case Status::Fixpoint: return "fixpoint";
    case Status::Suspended: return "suspended";
    case Status::Failed: return "failed";
    case Status::Running: return "running";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Store

const DataTuple* Store::find(ConstraintId c, const KeyTuple& key) const {
  const Table& t = tables_.at(c.value);
  auto it = t.find(key);
  return it == t.end() ? nullptr : &it->second;
}

std::optional<Fact> Store::upsert(const Fact& fact) {
  Table& t = tables_.at(fact.constraint.value);
  auto [it, inserted] = t.try_emplace(fact.key, fact.data);
  if (inserted) return std::nullopt;
  Fact displaced{fact.constraint, it->first, std::move(it->second)};
  it->second = fact.data;
  return displaced;
}

bool Store::erase(ConstraintId c, const KeyTuple& key) {
  return tables_.at(c.value).erase(key) > 0;
}

std::vector<Fact> Store::facts(ConstraintId c) const {
  std::vector<Fact> out;
  for (const auto& [key, data] : tables_.at(c.value)) out.push_back({c, key, data});
  return out;
}

std::vector<Fact> Store::all_facts() const {
  std::vector<Fact> out;
  for (std::uint32_t c = 0; c < tables_.size(); ++c) {
    auto part = facts(ConstraintId{c});
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::size_t Store::size() const {
  std::size_t n = 0;
  for (const auto& t : tables_) n += t.size();
  return n;
}

// ---------------------------------------------------------------------------
// Handler

Handler::Handler(Program program) : Handler(program.compile()) {}

Handler::Handler(std::shared_ptr<const CompiledProgram> program)
    : program_(std::move(program)) {
  if (!program_) throw HandlerError(ErrorCode::NotCompiled, "no program");
  state_.store = Store{program_->constraints().size()};
}

void Handler::require_idle() const {
  if (running_) {
    throw HandlerError(ErrorCode::Busy, "the handler is running");
  }
}

void Handler::check_fact(const Fact& fact) const {
  if (fact.constraint.value >= program_->constraints().size()) {
    throw HandlerError(ErrorCode::UnknownConstraint, "no such constraint");
  }
  const ConstraintSignature& sig = program_->signature(fact.constraint);
  if (fact.key.size() != sig.key_tags.size() ||
      fact.data.size() != sig.data_tags.size()) {
    throw HandlerError(ErrorCode::TypeError,
                       "'" + sig.name + "' takes " +
                           std::to_string(sig.key_tags.size()) + " key and " +
                           std::to_string(sig.data_tags.size()) +
                           " data fields");
  }
  for (std::size_t i = 0; i < fact.key.size(); ++i) {
    if (!type_check(fact.key[i], sig.key_tags[i])) {
      throw HandlerError(ErrorCode::TypeError,
                         "key " + std::to_string(i) + " of '" + sig.name +
                             "' must be " + std::string{type_name(sig.key_tags[i])});
    }
  }
  for (std::size_t i = 0; i < fact.data.size(); ++i) {
    if (!type_check(fact.data[i], sig.data_tags[i])) {
      throw HandlerError(ErrorCode::TypeError,
                         "data " + std::to_string(i) + " of '" + sig.name +
                             "' must be " + std::string{type_name(sig.data_tags[i])});
    }
  }
}

Fact Handler::make_fact(std::string_view constraint, Tuple key, Tuple data) const {
  auto id = program_->find_constraint(constraint);
  if (!id) {
    throw HandlerError(ErrorCode::UnknownConstraint,
                       "constraint '" + std::string{constraint} + "' is not declared");
  }
  return Fact{*id, std::move(key), std::move(data)};
}

RunOutcome Handler::tell(Fact fact) {
  require_idle();
  if (state_.status == Status::Failed) {
    throw HandlerError(ErrorCode::TellOnFailed, "the handler has failed");
  }
  check_fact(fact);
  state_.goal.push_back(fact);
  bus_.emit(Event::told(std::move(fact)));
  return main_loop();
}

RunOutcome Handler::tell(std::string_view constraint, Tuple key, Tuple data) {
  return tell(make_fact(constraint, std::move(key), std::move(data)));
}

RunOutcome Handler::run() {
  require_idle();
  if (state_.status == Status::Failed) {
    throw HandlerError(ErrorCode::TellOnFailed, "the handler has failed");
  }
  return main_loop();
}

RunOutcome Handler::resume() {
  require_idle();
  if (state_.status != Status::Suspended) {
    throw HandlerError(ErrorCode::ResumeNotSuspended,
                       "status is " + std::string{status_name(state_.status)});
  }
  return main_loop();
}

void Handler::force_exit() {
  if (running_) exit_requested_ = true;
}

std::vector<Fact> Handler::select(ConstraintId constraint,
                                  const std::optional<KeyPattern>& key) const {
  if (constraint.value >= program_->constraints().size()) {
    throw HandlerError(ErrorCode::UnknownConstraint, "no such constraint");
  }
  const ConstraintSignature& sig = program_->signature(constraint);
  if (key && key->size() != sig.key_tags.size()) {
    throw HandlerError(ErrorCode::ArityMismatch,
                       "'" + sig.name + "' has " +
                           std::to_string(sig.key_tags.size()) + " key fields");
  }
  std::vector<Fact> out;
  for (const auto& [k, data] : state_.store.table(constraint)) {
    bool ok = true;
    if (key) {
      for (std::size_t i = 0; i < k.size() && ok; ++i) {
        ok = !(*key)[i] || values_equal(*(*key)[i], k[i]);
      }
    }
    if (ok) out.push_back({constraint, k, data});
  }
  return out;
}

std::vector<Fact> Handler::select(std::string_view constraint,
                                  const std::optional<KeyPattern>& key) const {
  auto id = program_->find_constraint(constraint);
  if (!id) {
    throw HandlerError(ErrorCode::UnknownConstraint,
                       "constraint '" + std::string{constraint} + "' is not declared");
  }
  return select(*id, key);
}

}  // namespace cr
