// Savepoints hold full copies of (goal, store, status). Listeners, breakpoints
// and the goal limit are configuration and are never saved.

#include "cr/handler.hpp"

namespace cr {

std::size_t Handler::begin() {
  if (running_) {
    throw HandlerError(ErrorCode::BeginDuringRun,
                       "begin() called while the handler is running");
  }
  savepoints_.push_back(state_);
  bus_.emit(Event::transaction(EventKind::TxBegin, depth()));
  return depth();
}

std::size_t Handler::commit() {
  require_idle();
  if (savepoints_.empty()) {
    throw HandlerError(ErrorCode::NoOpenTransaction, "commit() at depth 0");
  }
  savepoints_.pop_back();
  bus_.emit(Event::transaction(EventKind::TxCommit, depth()));
  return depth();
}

std::size_t Handler::partial_commit() {
  require_idle();
  if (savepoints_.empty()) {
    throw HandlerError(ErrorCode::NoOpenTransaction, "partialCommit() at depth 0");
  }
  savepoints_.back() = state_;
  bus_.emit(Event::transaction(EventKind::TxPartialCommit, depth()));
  return depth();
}

std::size_t Handler::rollback() {
  require_idle();
  if (savepoints_.empty()) {
    throw HandlerError(ErrorCode::NoOpenTransaction, "rollback() at depth 0");
  }
  state_ = std::move(savepoints_.back());
  savepoints_.pop_back();
  bus_.emit(Event::transaction(EventKind::TxRollback, depth()));
  return depth();
}

}  // namespace cr
