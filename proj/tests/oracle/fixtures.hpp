#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "cr/handler.hpp"

namespace cr::oracle {

/// A worked example over the order-interval handler.
struct Fixture {
  std::string name;
  std::vector<std::tuple<std::string, Tuple, Tuple>> tells;
  std::string select;  // constraint queried at the end of the transcript
};

inline void PrintTo(const Fixture& f, std::ostream* os) { *os << f.name; }

std::vector<Fixture> worked_fixtures();

struct FixtureRun {
  std::string log;  // render_event lines
  std::vector<Fact> store;
  Status status = Status::Fixpoint;
};

/// Tells in order, stopping once the handler has failed.
FixtureRun run_fixture(const Fixture& f);

/// Client view of the fixture driven through the command dispatcher: every
/// tell as a command, then a select, one JSON line per event or reply.
std::string fixture_transcript(const Fixture& f);

/// One random begin/commit/partialCommit/rollback/tell/resume sequence
/// checked against a stack of expected snapshots, nesting at most five deep.
/// Empty when the algebra held; otherwise what broke.
std::string check_transaction_sequence(std::uint64_t seed);

}  // namespace cr::oracle
