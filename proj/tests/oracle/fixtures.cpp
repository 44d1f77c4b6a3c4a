#include "fixtures.hpp"

#include <random>

#include "cr/protocol.hpp"
#include "cr/solvers.hpp"

namespace cr::oracle {

std::vector<Fixture> worked_fixtures() {
  return {
      {"dom_intersection", {{"dom", {"x"}, {0, 10}}, {"dom", {"x"}, {3, 15}}}, "dom"},
      {"leq_antisymmetry", {{"leq", {"a", "b"}, {}}, {"leq", {"b", "a"}, {}}}, "eq"},
      {"neq_failure", {{"neq", {"a", "a"}, {}}, {"leq", {"a", "b"}, {}}}, "neq"},
  };
}

FixtureRun run_fixture(const Fixture& f) {
  Handler h = solvers::build_order_interval_handler();
  FixtureRun out;
  h.subscribe([&](const Event& e) { out.log += render_event(h.program(), e) + "\n"; });
  for (const auto& [c, key, data] : f.tells) {
    if (h.status() == Status::Failed) break;
    h.tell(c, key, data);
  }
  out.store = h.store().all_facts();
  out.status = h.status();
  return out;
}

std::string fixture_transcript(const Fixture& f) {
  using protocol::Json;
  Handler h = solvers::build_order_interval_handler();
  Debugger dbg{h.shared_program(), [](const Event&) { return ResumeAction::Continue; }};
  protocol::CommandDispatcher d{h, dbg};
  std::string out;
  h.subscribe([&](const Event& e) {
    out += protocol::to_line(protocol::encode_event(h.program(), e)) + "\n";
  });
  auto send = [&](const Json& cmd) {
    out += protocol::to_line(d.handle_line(protocol::to_line(cmd))) + "\n";
  };
  int id = 0;
  for (const auto& [c, key, data] : f.tells) {
    send(Json{{"id", ++id},
              {"cmd", "tell"},
              {"constraint", c},
              {"key", protocol::encode_tuple(key)},
              {"data", protocol::encode_tuple(data)}});
  }
  send(Json{{"id", ++id}, {"cmd", "select"}, {"constraint", f.select}});
  return out;
}

std::string check_transaction_sequence(std::uint64_t seed) {
  std::mt19937_64 rng{seed};
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };
  const char* vars[] = {"a", "b", "c"};
  Handler h = solvers::build_order_interval_handler();
  if (pick(3) == 0) h.set_goal_limit(1);
  // eq plus dom can cycle forever; cut such runs short
  std::size_t dequeues = 0;
  h.subscribe([&](const Event& e) {
    if (e.kind == EventKind::Dequeued && ++dequeues % 500 == 0) h.force_exit();
  });
  std::vector<HandlerState> model;
  for (int step = 0; step < 40; ++step) {
    std::string where = "step " + std::to_string(step) + ": ";
    int op = pick(6);
    if (op == 0 && model.size() < 5) {
      model.push_back(h.state());
      if (h.begin() != model.size()) return where + "begin depth";
    } else if (op == 1 && !model.empty()) {
      HandlerState now = h.state();
      model.pop_back();
      if (h.commit() != model.size()) return where + "commit depth";
      if (h.state() != now) return where + "commit changed the state";
    } else if (op == 2 && !model.empty()) {
      model.back() = h.state();
      if (h.partial_commit() != model.size()) return where + "partial commit depth";
      if (h.state() != model.back()) return where + "partial commit changed the state";
    } else if (op == 3 && !model.empty()) {
      HandlerState expected = model.back();
      model.pop_back();
      if (h.rollback() != model.size()) return where + "rollback depth";
      if (h.state() != expected) return where + "rollback did not restore";
    } else if (op == 4 && h.status() == Status::Suspended) {
      h.resume();
    } else if (h.status() != Status::Failed) {
      std::string x = vars[pick(3)], y = vars[pick(3)];
      switch (pick(4)) {
        case 0: h.tell("leq", {x, y}); break;
        case 1: h.tell("lt", {x, y}); break;
        case 2: h.tell("neq", {x, y}); break;
        default: {
          std::int64_t lo = pick(10);
          h.tell("dom", {x}, {lo, lo + pick(10)});
        }
      }
    }
    if (h.depth() != model.size()) return where + "depth drifted";
  }
  return {};
}

}  // namespace cr::oracle
