#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "cr/debug_server.hpp"
#include "cr/handler.hpp"

namespace cr::cli {

/// Splits a command line on whitespace; double-quoted runs, escapes
/// included, stay one token. Throws std::invalid_argument on an unterminated
/// quote.
std::vector<std::string> tokenize(std::string_view line);

/// One REPL session over a bundled handler. Every command prints its result
/// or a one-line diagnostic to the output stream.
class Repl {
 public:
  /// Throws std::invalid_argument for an unknown handler name.
  Repl(std::string_view handler_name, std::ostream& out);
  ~Repl();

  /// Runs one command line; returns false after `quit`.
  bool execute(std::string_view line);
  /// Executes lines until quit or end of input. Returns true on quit.
  bool run(std::istream& in, bool prompt = false);

  void set_limit(std::optional<std::size_t> limit);
  void set_trace(bool on);
  /// Starts the debug server; throws ServerError when the port is taken.
  std::uint16_t serve(std::uint16_t port);
  bool serving() const { return server_ != nullptr; }

 private:
  template <typename F>
  auto on_engine(F&& f) {
    if (server_) return server_->call(std::forward<F>(f));
    return f(handler_);
  }
  void print(const std::string& line);
  void print_facts(const std::vector<Fact>& facts);
  void help();

  Handler handler_;
  std::ostream& out_;
  std::mutex out_mutex_;
  std::optional<SubscriptionId> trace_;
  std::unique_ptr<DebugServer> server_;
};

}  // namespace cr::cli
