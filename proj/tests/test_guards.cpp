#include <gtest/gtest.h>

#include <stdexcept>

#include "cr/error.hpp"
#include "cr/guards.hpp"

namespace cr {
namespace {

std::vector<GuardArg> args(std::initializer_list<GuardArg> a) { return a; }

struct Counting {
  GuardRegistry reg;
  int calls = 0;

  Counting() {
    reg.register_guard({"lessOrEqual", {in(TypeTag::Int), in(TypeTag::Int)}, std::nullopt, true},
                       [this](GuardCall& c) {
                         ++calls;
                         return c.int_arg(0) <= c.int_arg(1);
                       });
    reg.register_guard({"maybe", {in(TypeTag::Int, true)}, std::nullopt, true},
                       [this](GuardCall& c) {
                         ++calls;
                         return c.arg(0).is_null();
                       });
  }
};

TEST(Guards, EqualsIsBuiltinAndNullable) {
  GuardRegistry reg;
  ASSERT_NE(reg.find("equals"), nullptr);
  EXPECT_TRUE(reg.invoke("equals", false, args({Value{}, Value{}})).success);
  EXPECT_FALSE(reg.invoke("equals", false, args({Value{}, Value(0)})).success);
  EXPECT_TRUE(reg.invoke("equals", false, args({Value("a"), Value("a")})).success);
  EXPECT_FALSE(reg.invoke("equals", false, args({Value(1), Value(1.0)})).success);
  EXPECT_TRUE(reg.invoke("equals", true, args({Value("a"), Value("b")})).success);
}

TEST(Guards, PlainAndNegated) {
  Counting g;
  EXPECT_TRUE(g.reg.invoke("lessOrEqual", false, args({Value(2), Value(3)})).success);
  EXPECT_FALSE(g.reg.invoke("lessOrEqual", false, args({Value(4), Value(3)})).success);
  EXPECT_FALSE(g.reg.invoke("lessOrEqual", true, args({Value(2), Value(3)})).success);
  EXPECT_TRUE(g.reg.invoke("lessOrEqual", true, args({Value(4), Value(3)})).success);
  EXPECT_EQ(g.calls, 4);
}

TEST(Guards, NullOnNonNullableFailsWithoutCalling) {
  Counting g;
  EXPECT_FALSE(g.reg.invoke("lessOrEqual", false, args({Value{}, Value(3)})).success);
  EXPECT_TRUE(g.reg.invoke("lessOrEqual", true, args({Value{}, Value(3)})).success);
  EXPECT_EQ(g.calls, 0);
}

TEST(Guards, WrongTypeFailsWithoutCalling) {
  Counting g;
  EXPECT_FALSE(g.reg.invoke("lessOrEqual", false, args({Value("1"), Value(3)})).success);
  EXPECT_FALSE(g.reg.invoke("lessOrEqual", false, args({Value(1.0), Value(3)})).success);
  EXPECT_EQ(g.calls, 0);
}

TEST(Guards, NullReachesNullableParameter) {
  Counting g;
  EXPECT_TRUE(g.reg.invoke("maybe", false, args({Value{}})).success);
  EXPECT_EQ(g.calls, 1);
}

TEST(Guards, DoubleNegationOnAdmissibleArguments) {
  Counting g;
  for (int a = -2; a <= 2; ++a) {
    for (int b = -2; b <= 2; ++b) {
      bool plain = g.reg.invoke("lessOrEqual", false, args({Value(a), Value(b)})).success;
      bool neg = g.reg.invoke("lessOrEqual", true, args({Value(a), Value(b)})).success;
      EXPECT_NE(plain, neg);
      EXPECT_EQ(plain, a <= b);
    }
  }
}

TEST(Guards, OutParametersAreReturnedOnSuccessOnly) {
  GuardRegistry reg;
  reg.register_guard({"half", {in(TypeTag::Int), out()}, std::nullopt, true},
                     [](GuardCall& c) {
                       c.set(1, Value(c.int_arg(0) / 2));
                       return c.int_arg(0) % 2 == 0;
                     });
  auto even = reg.invoke("half", false, args({Value(8), OutSlot{}}));
  ASSERT_TRUE(even.success);
  ASSERT_EQ(even.outputs.size(), 1u);
  EXPECT_EQ(even.outputs[0].first, 1u);
  EXPECT_EQ(even.outputs[0].second, Value(4));

  auto odd = reg.invoke("half", false, args({Value(7), OutSlot{}}));
  EXPECT_FALSE(odd.success);
  EXPECT_TRUE(odd.outputs.empty());
}

TEST(Guards, IgnoredTruthSucceedsAfterAdmission) {
  GuardRegistry reg;
  int calls = 0;
  reg.register_guard({"touch", {in(TypeTag::Int)}, std::nullopt, false},
                     [&](GuardCall&) {
                       ++calls;
                       return false;
                     });
  EXPECT_TRUE(reg.invoke("touch", false, args({Value(1)})).success);
  EXPECT_FALSE(reg.invoke("touch", false, args({Value("s")})).success);
  EXPECT_EQ(calls, 1);
}

TEST(Guards, VariadicTail) {
  GuardRegistry reg;
  reg.register_guard({"ascending", {}, in(TypeTag::Int), true}, [](GuardCall& c) {
    for (std::size_t i = 1; i < c.size(); ++i) {
      if (c.int_arg(i - 1) > c.int_arg(i)) return false;
    }
    return true;
  });
  EXPECT_TRUE(reg.invoke("ascending", false, args({})).success);
  EXPECT_TRUE(reg.invoke("ascending", false, args({Value(1), Value(2), Value(2)})).success);
  EXPECT_FALSE(reg.invoke("ascending", false, args({Value(3), Value(2)})).success);
  EXPECT_FALSE(reg.invoke("ascending", false, args({Value(1), Value("2")})).success);
}

TEST(Guards, ThrowingFunctionIsEngineFault) {
  GuardRegistry reg;
  reg.register_guard({"boom", {}, std::nullopt, true},
                     [](GuardCall&) -> bool { throw std::runtime_error("no"); });
  try {
    reg.invoke("boom", false, args({}));
    FAIL();
  } catch (const HandlerError& e) {
    EXPECT_EQ(e.code(), ErrorCode::EngineFault);
  }
}

TEST(Guards, RegistrationErrors) {
  GuardRegistry reg;
  auto code = [&](GuardSpec spec) {
    try {
      reg.register_guard(std::move(spec), [](GuardCall&) { return true; });
    } catch (const HandlerError& e) {
      return e.code();
    }
    return ErrorCode::EngineFault;
  };
  EXPECT_EQ(code({"equals", {}, std::nullopt, true}), ErrorCode::DuplicateGuard);
  EXPECT_EQ(code({"", {}, std::nullopt, true}), ErrorCode::ReservedName);
  EXPECT_EQ(code({"!x", {}, std::nullopt, true}), ErrorCode::ReservedName);
}

TEST(Guards, UnknownAndArity) {
  GuardRegistry reg;
  EXPECT_THROW(reg.invoke("nope", false, args({})), HandlerError);
  try {
    reg.invoke("equals", false, args({Value(1)}));
    FAIL();
  } catch (const HandlerError& e) {
    EXPECT_EQ(e.code(), ErrorCode::GuardArityMismatch);
  }
}

TEST(Guards, ForceExitHookIsCalled) {
  GuardRegistry reg;
  reg.register_guard({"stop", {}, std::nullopt, true}, [](GuardCall& c) {
    c.force_exit();
    return true;
  });
  int hits = 0;
  std::function<void()> hook = [&] { ++hits; };
  reg.invoke("stop", false, args({}), &hook);
  reg.invoke("stop", false, args({}));
  EXPECT_EQ(hits, 1);
}

}  // namespace
}  // namespace cr
