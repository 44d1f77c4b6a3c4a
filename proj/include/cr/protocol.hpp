#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "cr/events.hpp"
#include "cr/handler.hpp"
#include "cr/value.hpp"

namespace cr::protocol {

/// Key order is kept as inserted so encoded lines are byte-stable.
using Json = nlohmann::ordered_json;

/// Malformed wire data. Reported to clients as error "parse".
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json encode_value(const Value& v);
Value decode_value(const Json& j);

Json encode_tuple(const Tuple& t);
Tuple decode_tuple(const Json& j);

/// {"constraint":name,"key":[...],"data":[...]}
Json encode_fact(const CompiledProgram& program, const Fact& f);
Fact decode_fact(const CompiledProgram& program, const Json& j);

/// The inner event object, without the envelope.
Json encode_event_body(const CompiledProgram& program, const Event& e);
/// {"type":"event","seq":N,"event":{...}}
Json encode_event(const CompiledProgram& program, const Event& e);
Event decode_event(const CompiledProgram& program, const Json& j);

Json hello(const CompiledProgram& program);
Json reply_ok(const Json& id, Json data);
Json reply_error(const Json& id, std::string_view error);

/// One compact line, no trailing newline.
std::string to_line(const Json& j);
/// Throws ProtocolError when the text is not a single JSON value.
Json parse_line(std::string_view line);

/// Executes client commands against one handler and its debugger. Not thread
/// safe; the debug server calls it from the engine thread only. While the
/// engine is paused, continue and step leave a release action behind for the
/// pause loop to collect.
class CommandDispatcher {
 public:
  CommandDispatcher(Handler& handler, Debugger& debugger)
      : handler_(handler), debugger_(debugger) {}

  /// Handles one raw line; always produces exactly one reply.
  Json handle_line(std::string_view line);
  Json handle(const Json& command);

  /// Returns and clears the pending release, if any.
  std::optional<ResumeAction> take_release();

 private:
  Json dispatch(const std::string& cmd, const Json& c);
  Json outcome(RunOutcome o) const;
  Json breakpoint_json(std::uint64_t id, const Breakpoint& bp) const;

  Handler& handler_;
  Debugger& debugger_;
  std::optional<ResumeAction> release_;
};

}  // namespace cr::protocol
