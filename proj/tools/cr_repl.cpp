#include <unistd.h>

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "repl.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Interactive shell for the bundled constraint handlers"};
  std::string handler = "order-interval";
  std::optional<std::size_t> limit;
  bool trace = false;
  std::optional<std::uint16_t> port;
  std::string script;
  app.add_option("--handler", handler, "handler to load")->capture_default_str();
  app.add_option("--limit", limit, "goal limit");
  app.add_flag("--trace", trace, "print one line per event");
  app.add_option("--serve", port, "start the debug server on this port (0 picks one)");
  app.add_option("--script", script, "run commands from a file, then exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  std::unique_ptr<cr::cli::Repl> repl;
  try {
    repl = std::make_unique<cr::cli::Repl>(handler, std::cout);
    if (limit) repl->set_limit(*limit);
    if (trace) repl->set_trace(true);
    if (port) {
      std::uint16_t bound = repl->serve(*port);
      std::cerr << "serving on port " << bound << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "cr-repl: " << e.what() << "\n";
    return 1;
  }

  bool quit = false;
  if (!script.empty()) {
    std::ifstream in{script};
    if (!in) {
      std::cerr << "cr-repl: cannot read " << script << "\n";
      return 1;
    }
    quit = repl->run(in);
  } else {
    quit = repl->run(std::cin, isatty(STDIN_FILENO) != 0);
  }

  // A server with no more input keeps running until the process is killed.
  if (!quit && repl->serving() && script.empty()) {
    for (;;) pause();
  }
  return 0;
}
