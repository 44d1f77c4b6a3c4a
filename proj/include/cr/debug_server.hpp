#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>

#include "cr/events.hpp"
#include "cr/handler.hpp"
#include "cr/protocol.hpp"

namespace cr {

inline constexpr std::uint16_t kDefaultDebugPort = 7454;

/// CR_DEBUG_PORT if set to a valid port, else 7454.
std::uint16_t default_debug_port();

class ServerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Serves one handler over newline-delimited JSON on TCP. Network I/O runs
/// on its own thread; every command, and every call made through call(),
/// runs on a single engine thread. When a breakpoint hits, the engine thread
/// stays inside the listener and keeps serving commands until a client sends
/// continue or step.
///
/// While the server runs, the handler must only be touched through call().
class DebugServer {
 public:
  /// Binds 127.0.0.1:port (0 picks a free port). Throws ServerError when the
  /// port cannot be bound.
  DebugServer(Handler& handler, std::uint16_t port);
  ~DebugServer();

  DebugServer(const DebugServer&) = delete;
  DebugServer& operator=(const DebugServer&) = delete;

  std::uint16_t port() const;
  void stop();

  /// Runs f(handler) on the engine thread and waits for its result.
  template <typename F>
  auto call(F&& f) -> std::invoke_result_t<F&, Handler&> {
    using R = std::invoke_result_t<F&, Handler&>;
    auto task = std::make_shared<std::packaged_task<R()>>(
        [this, fn = std::forward<F>(f)]() mutable { return fn(handler_); });
    auto result = task->get_future();
    post_job([task] { (*task)(); });
    return result.get();
  }

 private:
  struct Impl;
  struct Job {
    std::function<void()> fn;
  };

  void post_job(std::function<void()> fn);
  void engine_loop();
  bool next_job(Job& job);
  ResumeAction wait_paused(const Event& at);

  Handler& handler_;
  std::unique_ptr<Debugger> debugger_;
  std::unique_ptr<protocol::CommandDispatcher> dispatcher_;
  std::unique_ptr<Impl> impl_;
  SubscriptionId subscription_ = 0;

  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<Job> jobs_;
  bool stopping_ = false;
  std::thread engine_;
};

}  // namespace cr
