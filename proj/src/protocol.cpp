#include "cr/protocol.hpp"

#include <charconv>
#include <cmath>

namespace cr::protocol {

namespace {

// A command that is well formed but not acceptable now.
struct Refusal {
  std::string error;
};

const Json& field(const Json& j, const char* name) {
  if (!j.is_object()) throw ProtocolError("expected an object");
  auto it = j.find(name);
  if (it == j.end()) throw ProtocolError(std::string{"missing field '"} + name + "'");
  return *it;
}

const std::string& string_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_string()) throw ProtocolError(std::string{"'"} + name + "' must be a string");
  return v.get_ref<const std::string&>();
}

std::uint64_t unsigned_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_number_unsigned()) {
    throw ProtocolError(std::string{"'"} + name + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

ConstraintId constraint_named(const CompiledProgram& program, const std::string& name) {
  auto id = program.find_constraint(name);
  if (!id) throw ProtocolError("unknown constraint '" + name + "'");
  return *id;
}

Json fact_list(const CompiledProgram& program, const std::vector<Fact>& facts) {
  Json out = Json::array();
  for (const Fact& f : facts) out.push_back(encode_fact(program, f));
  return out;
}

std::vector<Fact> decode_fact_list(const CompiledProgram& program, const Json& j) {
  if (!j.is_array()) throw ProtocolError("expected a fact list");
  std::vector<Fact> out;
  for (const Json& f : j) out.push_back(decode_fact(program, f));
  return out;
}

}  // namespace

Json encode_value(const Value& v) {
  switch (v.tag()) {
    case Value::Tag::Null: return nullptr;
    case Value::Tag::Bool: return Json{{"t", "b"}, {"v", v.as_bool()}};
    case Value::Tag::Int: return Json{{"t", "i"}, {"v", std::to_string(v.as_int())}};
    case Value::Tag::Float: return Json{{"t", "f"}, {"v", v.as_float()}};
    case Value::Tag::Str: return Json{{"t", "s"}, {"v", v.as_str()}};
  }
  return nullptr;
}

Value decode_value(const Json& j) {
  if (j.is_null()) return Value{};
  const std::string& t = string_field(j, "t");
  const Json& v = field(j, "v");
  if (t == "b") {
    if (!v.is_boolean()) throw ProtocolError("bool value expected");
    return Value(v.get<bool>());
  }
  if (t == "i") {
    if (!v.is_string()) throw ProtocolError("int value must be a decimal string");
    const std::string& s = v.get_ref<const std::string&>();
    std::int64_t out = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (s.empty() || ec != std::errc{} || end != s.data() + s.size()) {
      throw ProtocolError("bad int '" + s + "'");
    }
    return Value(out);
  }
  if (t == "f") {
    if (!v.is_number()) throw ProtocolError("float value must be a number");
    double d = v.get<double>();
    if (!std::isfinite(d)) throw ProtocolError("float value must be finite");
    return Value(d);
  }
  if (t == "s") {
    if (!v.is_string()) throw ProtocolError("string value expected");
    return Value(v.get<std::string>());
  }
  throw ProtocolError("unknown value tag '" + t + "'");
}

Json encode_tuple(const Tuple& t) {
  Json out = Json::array();
  for (const Value& v : t) out.push_back(encode_value(v));
  return out;
}

Tuple decode_tuple(const Json& j) {
  if (!j.is_array()) throw ProtocolError("expected an array of values");
  Tuple out;
  out.reserve(j.size());
  for (const Json& v : j) out.push_back(decode_value(v));
  return out;
}

Json encode_fact(const CompiledProgram& program, const Fact& f) {
  return Json{{"constraint", program.signature(f.constraint).name},
              {"key", encode_tuple(f.key)},
              {"data", encode_tuple(f.data)}};
}

Fact decode_fact(const CompiledProgram& program, const Json& j) {
  Fact f{constraint_named(program, string_field(j, "constraint")),
         decode_tuple(field(j, "key")), {}};
  if (j.contains("data")) f.data = decode_tuple(j["data"]);
  return f;
}

Json encode_event_body(const CompiledProgram& program, const Event& e) {
  Json body{{"kind", event_kind_name(e.kind)}};
  switch (e.kind) {
    case EventKind::Told:
    case EventKind::Dequeued:
    case EventKind::FactStored:
    case EventKind::FactRemoved:
      body["fact"] = encode_fact(program, e.fact());
      break;
    case EventKind::RuleFired: {
      const RuleFiring& r = e.firing();
      body["rule"] = r.rule;
      body["label"] = program.rule_label(r.rule);
      body["active"] = encode_fact(program, r.active);
      body["partners"] = fact_list(program, r.partners);
      body["consumed"] = fact_list(program, r.consumed);
      body["body"] = fact_list(program, r.body);
      break;
    }
    case EventKind::Suspended:
      body["reason"] = suspend_reason_name(e.reason());
      break;
    case EventKind::TxBegin:
    case EventKind::TxCommit:
    case EventKind::TxPartialCommit:
    case EventKind::TxRollback:
      body["depth"] = e.depth();
      break;
    case EventKind::Failure:
    case EventKind::Fixpoint:
      break;
  }
  return body;
}

Json encode_event(const CompiledProgram& program, const Event& e) {
  return Json{{"type", "event"}, {"seq", e.seq}, {"event", encode_event_body(program, e)}};
}

Event decode_event(const CompiledProgram& program, const Json& j) {
  if (string_field(j, "type") != "event") throw ProtocolError("not an event");
  Event e;
  e.seq = unsigned_field(j, "seq");
  const Json& body = field(j, "event");
  const std::string& kind = string_field(body, "kind");
  auto k = parse_event_kind(kind);
  if (!k) throw ProtocolError("unknown event kind '" + kind + "'");
  e.kind = *k;
  switch (e.kind) {
    case EventKind::Told:
    case EventKind::Dequeued:
    case EventKind::FactStored:
    case EventKind::FactRemoved:
      e.payload = decode_fact(program, field(body, "fact"));
      break;
    case EventKind::RuleFired: {
      RuleFiring r;
      r.rule = unsigned_field(body, "rule");
      if (r.rule == 0 || r.rule > program.rules().size()) {
        throw ProtocolError("unknown rule " + std::to_string(r.rule));
      }
      r.active = decode_fact(program, field(body, "active"));
      r.partners = decode_fact_list(program, field(body, "partners"));
      r.consumed = decode_fact_list(program, field(body, "consumed"));
      r.body = decode_fact_list(program, field(body, "body"));
      e.payload = std::move(r);
      break;
    }
    case EventKind::Suspended: {
      const std::string& reason = string_field(body, "reason");
      if (reason == "forced") {
        e.payload = SuspendReason::Forced;
      } else if (reason == "limit") {
        e.payload = SuspendReason::LimitExceeded;
      } else {
        throw ProtocolError("unknown suspend reason '" + reason + "'");
      }
      break;
    }
    case EventKind::TxBegin:
    case EventKind::TxCommit:
    case EventKind::TxPartialCommit:
    case EventKind::TxRollback:
      e.payload = static_cast<std::size_t>(unsigned_field(body, "depth"));
      break;
    case EventKind::Failure:
    case EventKind::Fixpoint:
      break;
  }
  return e;
}

Json hello(const CompiledProgram& program) {
  Json constraints = Json::array();
  for (const ConstraintSignature& sig : program.constraints()) {
    if (sig.id == kFailConstraint) continue;
    Json key = Json::array(), data = Json::array();
    for (TypeTag t : sig.key_tags) key.push_back(type_name(t));
    for (TypeTag t : sig.data_tags) data.push_back(type_name(t));
    constraints.push_back(Json{{"name", sig.name}, {"key", key}, {"data", data}});
  }
  Json rules = Json::array();
  for (const Rule& r : program.rules()) rules.push_back(program.rule_label(r.index));
  return Json{{"type", "hello"},
              {"handler", program.name()},
              {"constraints", constraints},
              {"rules", rules}};
}

Json reply_ok(const Json& id, Json data) {
  return Json{{"type", "reply"}, {"id", id}, {"ok", true}, {"data", std::move(data)}};
}

Json reply_error(const Json& id, std::string_view error) {
  return Json{{"type", "reply"}, {"id", id}, {"ok", false}, {"error", error}};
}

std::string to_line(const Json& j) {
  return j.dump(-1, ' ', false, Json::error_handler_t::replace);
}

Json parse_line(std::string_view line) {
  try {
    return Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw ProtocolError(e.what());
  }
}

// ---------------------------------------------------------------------------
// CommandDispatcher

Json CommandDispatcher::handle_line(std::string_view line) {
  Json c;
  try {
    c = parse_line(line);
  } catch (const ProtocolError&) {
    return reply_error(nullptr, "parse");
  }
  return handle(c);
}

Json CommandDispatcher::handle(const Json& c) {
  Json id = nullptr;
  if (c.is_object() && c.contains("id")) id = c["id"];
  try {
    if (!c.is_object()) throw ProtocolError("command must be an object");
    return reply_ok(id, dispatch(string_field(c, "cmd"), c));
  } catch (const ProtocolError&) {
    return reply_error(id, "parse");
  } catch (const Refusal& r) {
    return reply_error(id, r.error);
  } catch (const HandlerError& e) {
    return reply_error(id, error_name(e.code()));
  } catch (const Json::exception&) {
    return reply_error(id, "parse");
  }
}

std::optional<ResumeAction> CommandDispatcher::take_release() {
  auto r = release_;
  release_.reset();
  return r;
}

Json CommandDispatcher::outcome(RunOutcome o) const {
  return Json{{"outcome", outcome_name(o)}};
}

Json CommandDispatcher::breakpoint_json(std::uint64_t id, const Breakpoint& bp) const {
  Json j{{"id", id}};
  switch (bp.kind) {
    case Breakpoint::Kind::Rule: j["rule"] = bp.rule; break;
    case Breakpoint::Kind::Constraint:
      j["constraint"] = handler_.program().signature(bp.constraint).name;
      break;
    case Breakpoint::Kind::Step: j["step"] = true; break;
  }
  return j;
}

Json CommandDispatcher::dispatch(const std::string& cmd, const Json& c) {
  const CompiledProgram& program = handler_.program();

  if (cmd == "tell") {
    Fact f = decode_fact(program, c);
    return outcome(handler_.tell(std::move(f)));
  }
  if (cmd == "run") return outcome(handler_.run());
  if (cmd == "resume") return outcome(handler_.resume());
  if (cmd == "select") {
    const std::string& name = string_field(c, "constraint");
    auto cid = program.find_constraint(name);
    if (!cid) {
      throw HandlerError(ErrorCode::UnknownConstraint,
                         "constraint '" + name + "' is not declared");
    }
    std::optional<KeyPattern> key;
    if (c.contains("key") && !c["key"].is_null()) {
      if (!c["key"].is_array()) throw ProtocolError("'key' must be an array");
      key.emplace();
      // "_" selects any value at that position; null is the Null value
      for (const Json& v : c["key"]) {
        if (v.is_string() && v.get_ref<const std::string&>() == "_") {
          key->push_back(std::nullopt);
        } else {
          key->push_back(decode_value(v));
        }
      }
    }
    return Json{{"facts", fact_list(program, handler_.select(*cid, key))}};
  }
  if (cmd == "begin") return Json{{"depth", handler_.begin()}};
  if (cmd == "commit") return Json{{"depth", handler_.commit()}};
  if (cmd == "partialCommit") return Json{{"depth", handler_.partial_commit()}};
  if (cmd == "rollback") return Json{{"depth", handler_.rollback()}};

  if (cmd == "breakpoint.add") {
    Breakpoint bp;
    if (c.contains("rule")) {
      bp = Breakpoint::on_rule(unsigned_field(c, "rule"));
    } else if (c.contains("constraint")) {
      const std::string& name = string_field(c, "constraint");
      auto cid = program.find_constraint(name);
      if (!cid) {
        throw HandlerError(ErrorCode::UnknownConstraint,
                           "constraint '" + name + "' is not declared");
      }
      bp = Breakpoint::on_constraint(*cid);
    } else if (c.contains("step")) {
      bp = Breakpoint::step_mode();
    } else {
      throw ProtocolError("breakpoint needs rule, constraint or step");
    }
    return Json{{"breakpoint", debugger_.add(bp)}};
  }
  if (cmd == "breakpoint.remove") {
    debugger_.remove(unsigned_field(c, "breakpoint"));
    return Json::object();
  }
  if (cmd == "breakpoint.list") {
    Json list = Json::array();
    for (const auto& [id, bp] : debugger_.breakpoints()) {
      list.push_back(breakpoint_json(id, bp));
    }
    return Json{{"breakpoints", list}};
  }
  if (cmd == "continue" || cmd == "step") {
    if (!debugger_.paused() || release_) throw Refusal{"not-paused"};
    release_ = cmd == "step" ? ResumeAction::Step : ResumeAction::Continue;
    return Json::object();
  }
  if (cmd == "limit") {
    const Json& n = field(c, "n");
    if (n.is_null()) {
      handler_.set_goal_limit(std::nullopt);
    } else if (n.is_number_unsigned()) {
      handler_.set_goal_limit(n.get<std::size_t>());
    } else {
      throw ProtocolError("'n' must be a non-negative integer or null");
    }
    Json out{{"limit", nullptr}};
    if (auto l = handler_.goal_limit()) out["limit"] = *l;
    return out;
  }
  if (cmd == "status") {
    Json out{{"paused", debugger_.paused()},
             {"status", status_name(handler_.status())},
             {"depth", handler_.depth()},
             {"limit", nullptr},
             {"seq", handler_.last_seq()}};
    if (auto l = handler_.goal_limit()) out["limit"] = *l;
    return out;
  }
  throw Refusal{"unknown-command"};
}

}  // namespace cr::protocol
