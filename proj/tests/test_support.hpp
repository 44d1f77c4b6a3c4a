#pragma once

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cr/events.hpp"
#include "cr/handler.hpp"

namespace cr {

// gtest output for facts: constraint id, key and data in canonical text.
inline void PrintTo(const Fact& f, std::ostream* os) {
  *os << "#" << f.constraint.value << to_text(f.key);
  if (!f.data.empty()) *os << " -> " << to_text(f.data);
}

}  // namespace cr

namespace cr::test {

inline std::string golden_path(const std::string& name) {
  return std::string{CR_GOLDEN_DIR} + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in{path, std::ios::binary};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Golden comparison. With CR_UPDATE_GOLDEN set, rewrites the file instead
/// and returns the actual text.
inline std::string golden(const std::string& name, const std::string& actual) {
  std::string path = golden_path(name);
  if (std::getenv("CR_UPDATE_GOLDEN") != nullptr) {
    std::ofstream{path, std::ios::binary} << actual;
    return actual;
  }
  return read_file(path);
}

/// Records every event of a handler.
struct Recorder {
  std::vector<Event> events;

  explicit Recorder(Handler& h) {
    h.subscribe([this](const Event& e) { events.push_back(e); });
  }

  std::vector<EventKind> kinds() const {
    std::vector<EventKind> out;
    for (const Event& e : events) out.push_back(e.kind);
    return out;
  }

  std::string log(const CompiledProgram& p) const {
    std::string out;
    for (const Event& e : events) out += render_event(p, e) + "\n";
    return out;
  }
};

inline Fact fact(const Handler& h, std::string_view c, Tuple key, Tuple data = {}) {
  return h.make_fact(c, std::move(key), std::move(data));
}

}  // namespace cr::test
