#include "repl.hpp"

#include <charconv>
#include <stdexcept>

#include "cr/solvers.hpp"

namespace cr::cli {

namespace {

Program load(std::string_view name) {
  auto p = solvers::make_program(name);
  if (!p) throw std::invalid_argument("unknown handler '" + std::string{name} + "'");
  return std::move(*p);
}

// Diagnostics for malformed REPL input.
struct BadInput {
  std::string detail;
};

Value literal(const std::string& token) {
  auto v = parse_value(token);
  if (!v) throw BadInput{"bad value " + token};
  return *v;
}

std::size_t count(const std::string& token) {
  std::size_t n = 0;
  auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), n);
  if (token.empty() || ec != std::errc{} || end != token.data() + token.size()) {
    throw BadInput{"expected a count, got " + token};
  }
  return n;
}

void want_args(const std::vector<std::string>& t, std::size_t n) {
  if (t.size() != n + 1) {
    throw BadInput{t[0] + " takes " + std::to_string(n) + " argument" +
                   (n == 1 ? "" : "s")};
  }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r' || line[i] == '\n') {
      ++i;
      continue;
    }
    std::string tok;
    bool quoted = false;
    while (i < line.size()) {
      char c = line[i];
      if (!quoted && (c == ' ' || c == '\t' || c == '\r' || c == '\n')) break;
      tok += c;
      ++i;
      if (c == '"') {
        quoted = !quoted;
      } else if (quoted && c == '\\' && i < line.size()) {
        tok += line[i++];
      }
    }
    if (quoted) throw std::invalid_argument("unterminated string");
    out.push_back(std::move(tok));
  }
  return out;
}

Repl::Repl(std::string_view handler_name, std::ostream& out)
    : handler_(load(handler_name)), out_(out) {}

Repl::~Repl() {
  if (server_) server_->stop();
}

void Repl::print(const std::string& line) {
  std::lock_guard lock{out_mutex_};
  out_ << line << '\n';
  out_.flush();
}

void Repl::print_facts(const std::vector<Fact>& facts) {
  if (facts.empty()) {
    print("(none)");
    return;
  }
  for (const Fact& f : facts) print(handler_.program().render(f));
}

void Repl::set_limit(std::optional<std::size_t> limit) {
  on_engine([&](Handler& h) { h.set_goal_limit(limit); });
}

void Repl::set_trace(bool on) {
  on_engine([&](Handler& h) {
    if (on && !trace_) {
      trace_ = h.subscribe([this, &h](const Event& e) {
        print(render_event(h.program(), e));
      });
    } else if (!on && trace_) {
      h.unsubscribe(*trace_);
      trace_.reset();
    }
  });
}

std::uint16_t Repl::serve(std::uint16_t port) {
  if (server_) throw ServerError("already serving on port " + std::to_string(server_->port()));
  server_ = std::make_unique<DebugServer>(handler_, port);
  return server_->port();
}

void Repl::help() {
  print("commands:");
  print("  tell <constraint> <value>...   keys first, then data");
  print("  select <constraint> [<value-or-_>...]");
  print("  run | resume");
  print("  begin | commit | partial | rollback");
  print("  limit <n|off>");
  print("  trace on|off");
  print("  serve <port>");
  print("  help | quit");
  print("constraints:");
  for (const ConstraintSignature& sig : handler_.program().constraints()) {
    if (sig.id == kFailConstraint) continue;
    std::string line = "  " + sig.name + "(";
    for (std::size_t i = 0; i < sig.key_tags.size(); ++i) {
      line += (i ? ", " : "") + std::string{type_name(sig.key_tags[i])};
    }
    line += ")";
    if (!sig.data_tags.empty()) {
      line += " -> (";
      for (std::size_t i = 0; i < sig.data_tags.size(); ++i) {
        line += (i ? ", " : "") + std::string{type_name(sig.data_tags[i])};
      }
      line += ")";
    }
    print(line);
  }
}

bool Repl::execute(std::string_view line) {
  std::vector<std::string> t;
  try {
    t = tokenize(line);
  } catch (const std::invalid_argument& e) {
    print(std::string{"error: parse ("} + e.what() + ")");
    return true;
  }
  if (t.empty() || t[0][0] == '#') return true;
  const std::string& cmd = t[0];
  const CompiledProgram& program = handler_.program();

  try {
    if (cmd == "quit" || cmd == "exit") {
      want_args(t, 0);
      return false;
    }
    if (cmd == "help") {
      help();
    } else if (cmd == "tell") {
      if (t.size() < 2) throw BadInput{"tell needs a constraint"};
      auto id = program.find_constraint(t[1]);
      if (!id || *id == kFailConstraint) {
        throw HandlerError(ErrorCode::UnknownConstraint, "no constraint " + t[1]);
      }
      const ConstraintSignature& sig = program.signature(*id);
      std::size_t nk = sig.key_tags.size(), nd = sig.data_tags.size();
      if (t.size() - 2 != nk + nd) {
        throw BadInput{sig.name + " takes " + std::to_string(nk) + " key and " +
                       std::to_string(nd) + " data values"};
      }
      Fact f{*id, {}, {}};
      for (std::size_t i = 0; i < nk + nd; ++i) {
        (i < nk ? f.key : f.data).push_back(literal(t[i + 2]));
      }
      RunOutcome o = on_engine([&](Handler& h) { return h.tell(f); });
      print("outcome: " + std::string{outcome_name(o)});
    } else if (cmd == "select") {
      if (t.size() < 2) throw BadInput{"select needs a constraint"};
      std::optional<KeyPattern> key;
      if (t.size() > 2) {
        key.emplace();
        for (std::size_t i = 2; i < t.size(); ++i) {
          if (t[i] == "_") {
            key->push_back(std::nullopt);
          } else {
            key->push_back(literal(t[i]));
          }
        }
      }
      print_facts(on_engine([&](Handler& h) { return h.select(t[1], key); }));
    } else if (cmd == "run" || cmd == "resume") {
      want_args(t, 0);
      RunOutcome o = on_engine([&](Handler& h) {
        return cmd == "run" ? h.run() : h.resume();
      });
      print("outcome: " + std::string{outcome_name(o)});
    } else if (cmd == "begin" || cmd == "commit" || cmd == "partial" || cmd == "rollback") {
      want_args(t, 0);
      std::size_t depth = on_engine([&](Handler& h) {
        if (cmd == "begin") return h.begin();
        if (cmd == "commit") return h.commit();
        if (cmd == "partial") return h.partial_commit();
        return h.rollback();
      });
      print("depth: " + std::to_string(depth));
    } else if (cmd == "limit") {
      want_args(t, 1);
      if (t[1] == "off") {
        set_limit(std::nullopt);
        print("limit: off");
      } else {
        std::size_t n = count(t[1]);
        set_limit(n);
        print("limit: " + std::to_string(n));
      }
    } else if (cmd == "trace") {
      want_args(t, 1);
      if (t[1] != "on" && t[1] != "off") throw BadInput{"trace takes on or off"};
      set_trace(t[1] == "on");
      print("trace: " + t[1]);
    } else if (cmd == "serve") {
      want_args(t, 1);
      std::size_t port = count(t[1]);
      if (port > 65535) throw BadInput{"port out of range"};
      std::uint16_t bound = serve(static_cast<std::uint16_t>(port));
      print("serving on port " + std::to_string(bound));
    } else {
      throw BadInput{"unknown command " + cmd};
    }
  } catch (const BadInput& e) {
    print("error: parse (" + e.detail + ")");
  } catch (const HandlerError& e) {
    print("error: " + std::string{error_name(e.code())});
  } catch (const ServerError& e) {
    print(std::string{"error: serve ("} + e.what() + ")");
  }
  return true;
}

bool Repl::run(std::istream& in, bool prompt) {
  std::string line;
  for (;;) {
    if (prompt) {
      std::lock_guard lock{out_mutex_};
      out_ << "> " << std::flush;
    }
    if (!std::getline(in, line)) return false;
    if (!execute(line)) return true;
  }
}

}  // namespace cr::cli
