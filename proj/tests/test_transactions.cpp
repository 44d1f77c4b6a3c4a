#include <gtest/gtest.h>

#include "cr/handler.hpp"
#include "cr/solvers.hpp"
#include "fixtures.hpp"
#include "test_support.hpp"

namespace cr {
namespace {

using test::fact;
using test::Recorder;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const HandlerError& e) {
    return e.code();
  }
  return ErrorCode::EngineFault;
}

TEST(Transactions, DepthZeroErrors) {
  Handler h = solvers::build_order_interval_handler();
  EXPECT_EQ(code_of([&] { h.commit(); }), ErrorCode::NoOpenTransaction);
  EXPECT_EQ(code_of([&] { h.partial_commit(); }), ErrorCode::NoOpenTransaction);
  EXPECT_EQ(code_of([&] { h.rollback(); }), ErrorCode::NoOpenTransaction);
  EXPECT_EQ(h.last_seq(), 0u);
}

TEST(Transactions, RollbackRestores) {
  Handler h = solvers::build_order_interval_handler();
  h.tell("leq", {"a", "b"});
  HandlerState before = h.state();
  EXPECT_EQ(h.begin(), 1u);
  h.tell("leq", {"b", "a"});
  h.tell("dom", {"x"}, {1, 5});
  EXPECT_NE(h.state(), before);
  EXPECT_EQ(h.rollback(), 0u);
  EXPECT_EQ(h.state(), before);
}

TEST(Transactions, CommitKeepsCurrentState) {
  Handler h = solvers::build_order_interval_handler();
  h.begin();
  h.tell("lt", {"a", "b"});
  HandlerState now = h.state();
  EXPECT_EQ(h.commit(), 0u);
  EXPECT_EQ(h.state(), now);
}

TEST(Transactions, PartialCommitMovesTheSavepoint) {
  Handler h = solvers::build_order_interval_handler();
  h.begin();
  h.tell("leq", {"a", "b"});
  HandlerState mid = h.state();
  EXPECT_EQ(h.partial_commit(), 1u);
  h.tell("leq", {"b", "c"});
  EXPECT_EQ(h.rollback(), 0u);
  EXPECT_EQ(h.state(), mid);
}

TEST(Transactions, RollbackUndoesFailure) {
  Handler h = solvers::build_order_interval_handler();
  h.tell("dom", {"x"}, {0, 10});
  h.begin();
  EXPECT_EQ(h.tell("dom", {"x"}, {20, 30}), RunOutcome::Failed);
  EXPECT_EQ(code_of([&] { h.tell("leq", {"a", "b"}); }), ErrorCode::TellOnFailed);
  h.rollback();
  EXPECT_EQ(h.status(), Status::Fixpoint);
  EXPECT_EQ(h.tell("dom", {"x"}, {5, 30}), RunOutcome::Fixpoint);
  EXPECT_EQ(h.select("dom"), std::vector<Fact>{fact(h, "dom", {"x"}, {5, 10})});
}

TEST(Transactions, RollbackRestoresSuspension) {
  Handler h = solvers::build_order_interval_handler();
  h.set_goal_limit(0);
  h.tell("lt", {"a", "b"});
  HandlerState suspended = h.state();
  h.begin();
  h.resume();
  h.resume();
  EXPECT_EQ(h.status(), Status::Fixpoint);
  h.rollback();
  EXPECT_EQ(h.state(), suspended);
  EXPECT_EQ(h.suspend_reason(), SuspendReason::LimitExceeded);
  EXPECT_EQ(h.resume(), RunOutcome::Suspended);
}

TEST(Transactions, ConfigurationIsNotSaved) {
  Handler h = solvers::build_order_interval_handler();
  h.begin();
  h.set_goal_limit(4);
  Recorder rec{h};
  h.rollback();
  EXPECT_EQ(h.goal_limit(), 4u);
  ASSERT_EQ(rec.events.size(), 1u);
}

TEST(Transactions, EventsCarryDepthAfterTheChange) {
  Handler h = solvers::build_order_interval_handler();
  Recorder rec{h};
  h.begin();
  h.begin();
  h.partial_commit();
  h.commit();
  h.rollback();
  std::vector<std::pair<EventKind, std::size_t>> got;
  for (const Event& e : rec.events) got.emplace_back(e.kind, e.depth());
  EXPECT_EQ(got, (std::vector<std::pair<EventKind, std::size_t>>{
                     {EventKind::TxBegin, 1},
                     {EventKind::TxBegin, 2},
                     {EventKind::TxPartialCommit, 2},
                     {EventKind::TxCommit, 1},
                     {EventKind::TxRollback, 0}}));
}

TEST(Transactions, NestingDepthIsUnbounded) {
  Handler h = solvers::build_order_interval_handler();
  std::vector<HandlerState> states;
  for (int i = 0; i < 64; ++i) {
    states.push_back(h.state());
    h.begin();
    h.tell("leq", {"v" + std::to_string(i), "w"});
  }
  for (int i = 63; i >= 0; --i) {
    h.rollback();
    EXPECT_EQ(h.state(), states[i]);
  }
}

TEST(TransactionsProperty, AlgebraHolds) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    ASSERT_EQ(oracle::check_transaction_sequence(seed), "") << "seed " << seed;
  }
}

}  // namespace
}  // namespace cr
