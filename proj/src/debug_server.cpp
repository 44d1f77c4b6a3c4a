#include "cr/debug_server.hpp"

#include <charconv>
#include <cstdlib>
#include <set>
#include <string_view>

#include <boost/asio.hpp>

namespace cr {

namespace asio = boost::asio;
using asio::ip::tcp;

std::uint16_t default_debug_port() {
  const char* env = std::getenv("CR_DEBUG_PORT");
  if (env == nullptr) return kDefaultDebugPort;
  std::string_view s{env};
  unsigned value = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || end != s.data() + s.size() || value > 65535) {
    return kDefaultDebugPort;
  }
  return static_cast<std::uint16_t>(value);
}

namespace {

class Session : public std::enable_shared_from_this<Session> {
 public:
  using LineFn = std::function<void(std::shared_ptr<Session>, std::string)>;
  using CloseFn = std::function<void(std::shared_ptr<Session>)>;

  Session(tcp::socket socket, LineFn on_line, CloseFn on_close)
      : socket_(std::move(socket)),
        on_line_(std::move(on_line)),
        on_close_(std::move(on_close)) {}

  void start(const std::string& hello) {
    send(hello);
    read();
  }

  // io thread only
  void send(const std::string& line) {
    if (closed_) return;
    out_.push_back(line + "\n");
    if (!writing_) write_next();
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    boost::system::error_code ignored;
    socket_.shutdown(tcp::socket::shutdown_both, ignored);
    socket_.close(ignored);
    on_close_(shared_from_this());
  }

 private:
  void read() {
    asio::async_read_until(
        socket_, buffer_, '\n',
        [self = shared_from_this()](boost::system::error_code ec, std::size_t n) {
          if (ec) {
            self->close();
            return;
          }
          std::string line{asio::buffers_begin(self->buffer_.data()),
                           asio::buffers_begin(self->buffer_.data()) + n - 1};
          self->buffer_.consume(n);
          if (!line.empty() && line.back() == '\r') line.pop_back();
          if (!line.empty()) self->on_line_(self, std::move(line));
          self->read();
        });
  }

  void write_next() {
    writing_ = true;
    asio::async_write(socket_, asio::buffer(out_.front()),
                      [self = shared_from_this()](boost::system::error_code ec, std::size_t) {
                        self->out_.pop_front();
                        if (ec) {
                          self->close();
                          return;
                        }
                        if (self->out_.empty()) {
                          self->writing_ = false;
                        } else {
                          self->write_next();
                        }
                      });
  }

  tcp::socket socket_;
  asio::streambuf buffer_;
  std::deque<std::string> out_;
  bool writing_ = false;
  bool closed_ = false;
  LineFn on_line_;
  CloseFn on_close_;
};

}  // namespace

struct DebugServer::Impl {
  asio::io_context io;
  tcp::acceptor acceptor{io};
  asio::executor_work_guard<asio::io_context::executor_type> work =
      asio::make_work_guard(io);
  std::set<std::shared_ptr<Session>> clients;
  std::string hello;
  std::thread thread;

  void broadcast(std::string line) {
    asio::post(io, [this, line = std::move(line)] {
      for (const auto& c : clients) c->send(line);
    });
  }
};

DebugServer::DebugServer(Handler& handler, std::uint16_t port)
    : handler_(handler), impl_(std::make_unique<Impl>()) {
  impl_->hello = protocol::to_line(protocol::hello(handler.program()));
  try {
    tcp::endpoint ep{asio::ip::make_address("127.0.0.1"), port};
    impl_->acceptor.open(ep.protocol());
    impl_->acceptor.set_option(tcp::acceptor::reuse_address(true));
    impl_->acceptor.bind(ep);
    impl_->acceptor.listen();
  } catch (const boost::system::system_error& e) {
    throw ServerError("cannot listen on port " + std::to_string(port) + ": " +
                      e.code().message());
  }

  debugger_ = std::make_unique<Debugger>(
      handler.shared_program(), [this](const Event& e) { return wait_paused(e); });
  dispatcher_ = std::make_unique<protocol::CommandDispatcher>(handler_, *debugger_);

  subscription_ = handler_.subscribe([this](const Event& e) {
    impl_->broadcast(protocol::to_line(protocol::encode_event(handler_.program(), e)));
    debugger_->check_pause(e);
  });

  auto on_line = [this](std::shared_ptr<Session> s, std::string line) {
    post_job([this, s = std::move(s), line = std::move(line)] {
      std::string reply = protocol::to_line(dispatcher_->handle_line(line));
      asio::post(impl_->io, [s, reply = std::move(reply)] { s->send(reply); });
    });
  };
  auto on_close = [this](std::shared_ptr<Session> s) { impl_->clients.erase(s); };

  struct Acceptor {
    Impl* impl;
    Session::LineFn on_line;
    Session::CloseFn on_close;
    void operator()() const {
      impl->acceptor.async_accept([*this](boost::system::error_code ec, tcp::socket socket) {
        if (ec) return;
        auto s = std::make_shared<Session>(std::move(socket), on_line, on_close);
        impl->clients.insert(s);
        s->start(impl->hello);
        (*this)();
      });
    }
  };
  Acceptor{impl_.get(), on_line, on_close}();

  impl_->thread = std::thread([this] { impl_->io.run(); });
  engine_ = std::thread([this] { engine_loop(); });
}

DebugServer::~DebugServer() { stop(); }

std::uint16_t DebugServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void DebugServer::stop() {
  {
    std::lock_guard lock{mutex_};
    if (stopping_ && !engine_.joinable()) return;
    stopping_ = true;
  }
  cv_.notify_all();
  if (engine_.joinable()) engine_.join();
  if (subscription_ != 0) {
    handler_.unsubscribe(subscription_);
    subscription_ = 0;
  }
  if (impl_->thread.joinable()) {
    asio::post(impl_->io, [impl = impl_.get()] {
      boost::system::error_code ignored;
      impl->acceptor.close(ignored);
      auto clients = impl->clients;
      for (const auto& c : clients) c->close();
      impl->work.reset();
    });
    impl_->thread.join();
  }
}

void DebugServer::post_job(std::function<void()> fn) {
  {
    std::lock_guard lock{mutex_};
    jobs_.push_back({std::move(fn)});
  }
  cv_.notify_all();
}

bool DebugServer::next_job(Job& job) {
  std::unique_lock lock{mutex_};
  cv_.wait(lock, [this] { return stopping_ || !jobs_.empty(); });
  if (jobs_.empty()) return false;
  job = std::move(jobs_.front());
  jobs_.pop_front();
  return true;
}

void DebugServer::engine_loop() {
  Job job;
  while (next_job(job)) job.fn();
  // drain anything posted during shutdown so callers of call() do not hang
  std::lock_guard lock{mutex_};
  jobs_.clear();
}

ResumeAction DebugServer::wait_paused(const Event&) {
  Job job;
  while (next_job(job)) {
    job.fn();
    if (auto action = dispatcher_->take_release()) return *action;
  }
  return ResumeAction::Continue;
}

}  // namespace cr
