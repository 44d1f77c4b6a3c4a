#include <gtest/gtest.h>

#include "differential.hpp"
#include "random_program.hpp"

namespace cr::oracle {
namespace {

TEST(Differential, EmptyRulesStoreTheTold) {
  Program p{"t"};
  Symbol f = p.symbol("f");
  p.constraint(f, TypeTag::Int);
  auto prog = p.compile();
  std::vector<Fact> tells{{*prog->find_constraint("f"), {Value(1)}, {}}};
  OracleResult o = oracle_run(*prog, tells);
  EXPECT_EQ(o.status, Status::Fixpoint);
  ASSERT_EQ(o.store.size(), 1u);
  EXPECT_EQ(o.store[0], tells[0]);
  EXPECT_EQ(diff_results(o, engine_run(prog, tells)), "");
}

TEST(Differential, Seed42) {
  RandomCase rc = random_case(42);
  OracleResult o = oracle_run(*rc.program, rc.tells, std::nullopt, kDequeueBudget);
  OracleResult e = engine_run(rc.program, rc.tells);
  EXPECT_EQ(diff_results(o, e), "");
  EXPECT_EQ(o.events, e.events);
}

TEST(Differential, TwoHundredSeedsFullEvents) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    RandomCase rc = random_case(seed);
    OracleResult o = oracle_run(*rc.program, rc.tells, std::nullopt, kDequeueBudget);
    OracleResult e = engine_run(rc.program, rc.tells);
    ASSERT_EQ(diff_results(o, e), "") << "seed " << seed;
    ASSERT_EQ(o.events, e.events) << "seed " << seed;
  }
}

}  // namespace
}  // namespace cr::oracle
