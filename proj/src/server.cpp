#include "vlp/server.hpp"

#include <atomic>
#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <charconv>
#include <chrono>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <variant>

#include "vlp/error.hpp"
#include "vlp/protocol.hpp"
#include "vlp/simulation.hpp"

namespace vlp {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

constexpr std::size_t kMaxLineBytes = 64 * 1024;

constexpr const char* kPlaceholderPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>vlpsim</title></head>
<body><pre id="log">connecting</pre>
<script>
const log = document.getElementById('log');
const ws = new WebSocket(`ws://${location.host}/ws`);
const latest = {};
ws.onmessage = (e) => {
  const m = JSON.parse(e.data);
  if (m.type === 'fix' || m.type === 'diag') latest[m.agent_id] = m;
  log.textContent = Object.values(latest).map((m) => JSON.stringify(m)).join('\n');
};
ws.onclose = () => { log.textContent += '\ndisconnected'; };
</script></body></html>
)";

std::string content_type(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html") return "text/html";
  if (ext == ".js") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

}  // namespace

Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::kValidation, "expected host:port, got '" + text + "'");
  Endpoint ep;
  if (colon > 0) ep.host = text.substr(0, colon);
  const std::string port = text.substr(colon + 1);
  unsigned value = 0;
  const auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
  if (ec != std::errc() || ptr != port.data() + port.size() || value > 65535) {
    throw Error(ErrorCode::kValidation, "bad port in '" + text + "'");
  }
  ep.port = static_cast<std::uint16_t>(value);
  return ep;
}

struct Server::Impl {
  struct Session : std::enable_shared_from_this<Session> {
    Session(Impl& s, std::uint64_t i) : server(s), id(i) {}
    virtual ~Session() = default;
    virtual void deliver(std::shared_ptr<const std::string> line) = 0;
    virtual void close() = 0;

    Impl& server;
    std::uint64_t id;
    bool subscribed = false;
  };

  struct TcpSession;
  struct WsSession;
  struct HttpSession;

  struct Join {
    std::uint64_t id;
  };
  struct Incoming {
    std::uint64_t id;
    Message msg;
  };
  using Inbound = std::variant<Join, Incoming>;

  Impl(Scenario scenario, ServerOptions opts)
      : sim(std::move(scenario)), options(std::move(opts)), tcp_acceptor(io), http_acceptor(io) {}

  // --- io thread ---------------------------------------------------------

  void listen(tcp::acceptor& acceptor, const Endpoint& ep) {
    boost::system::error_code ec;
    const auto address = asio::ip::make_address(ep.host == "localhost" ? "127.0.0.1" : ep.host, ec);
    if (ec) throw Error(ErrorCode::kBind, "bad address '" + ep.host + "': " + ec.message());
    const tcp::endpoint endpoint(address, ep.port);
    acceptor.open(endpoint.protocol(), ec);
    if (!ec) acceptor.set_option(asio::socket_base::reuse_address(true), ec);
    if (!ec) acceptor.bind(endpoint, ec);
    if (!ec) acceptor.listen(asio::socket_base::max_listen_connections, ec);
    if (ec) {
      throw Error(ErrorCode::kBind, "cannot bind " + ep.host + ":" + std::to_string(ep.port) + ": " + ec.message());
    }
  }

  void accept_tcp();
  void accept_http();

  void add(const std::shared_ptr<Session>& s) {
    sessions[s->id] = s;
    clients = sessions.size();
    enqueue(Join{s->id});
  }

  void drop(std::uint64_t id) {
    auto it = sessions.find(id);
    if (it == sessions.end()) return;
    auto s = it->second;
    sessions.erase(it);
    clients = sessions.size();
    s->close();
  }

  void on_line(std::uint64_t id, std::string_view line) {
    if (line.empty() || line == "\r") return;
    try {
      Message msg = decode_message(line);
      // Only goals and controls are client inputs; echoes of server messages are ignored.
      if (std::holds_alternative<NavGoal>(msg) || std::holds_alternative<ControlMessage>(msg)) {
        enqueue(Incoming{id, std::move(msg)});
      }
    } catch (const Error& e) {
      std::cerr << "client " << id << ": " << e.what() << ", disconnecting\n";
      drop(id);
    }
  }

  // --- shared ------------------------------------------------------------

  void enqueue(Inbound item) {
    std::lock_guard lock(inbound_mutex);
    inbound.push_back(std::move(item));
  }

  // --- sim thread --------------------------------------------------------

  void run_sim() {
    using clock = std::chrono::steady_clock;
    const auto period = std::chrono::duration<double>(1.0 / sim.scenario().frame_rate_hz);
    auto next = clock::now();
    while (!stopping) {
      std::deque<Inbound> batch;
      {
        std::lock_guard lock(inbound_mutex);
        batch.swap(inbound);
      }
      for (auto& item : batch) {
        if (const auto* join = std::get_if<Join>(&item)) {
          auto line = std::make_shared<const std::string>(encode_message(sim.snapshot(options.include_truth)));
          asio::post(io, [this, id = join->id, line] {
            auto it = sessions.find(id);
            if (it == sessions.end()) return;
            it->second->deliver(line);
            it->second->subscribed = true;
          });
        } else {
          sim.apply(std::get<Incoming>(item).msg);  // in arrival order: last writer wins
        }
      }

      if (!sim.paused()) {
        auto lines = std::make_shared<std::vector<std::shared_ptr<const std::string>>>();
        for (const auto& m : sim.tick()) lines->push_back(std::make_shared<const std::string>(encode_message(m)));
        asio::post(io, [this, lines] {
          for (auto& [id, s] : sessions) {
            if (!s->subscribed) continue;
            for (const auto& l : *lines) s->deliver(l);
          }
        });
        ++ticks;
        if (options.max_ticks > 0 && ticks >= options.max_ticks) break;
      }

      if (options.speed > 0.0) {
        next += std::chrono::duration_cast<clock::duration>(period / options.speed);
        std::this_thread::sleep_until(next);
      } else if (sim.paused()) {
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
      }
    }
  }

  Simulation sim;
  ServerOptions options;
  asio::io_context io;
  tcp::acceptor tcp_acceptor;
  tcp::acceptor http_acceptor;
  std::map<std::uint64_t, std::shared_ptr<Session>> sessions;  // io thread only
  std::uint64_t next_id = 1;

  std::mutex inbound_mutex;
  std::deque<Inbound> inbound;

  std::thread io_thread;
  std::thread sim_thread;
  std::atomic<bool> stopping{false};
  std::atomic<std::int64_t> ticks{0};
  std::atomic<std::size_t> clients{0};
  bool started = false;
};

struct Server::Impl::TcpSession : Session {
  TcpSession(Impl& s, std::uint64_t i, tcp::socket sock) : Session(s, i), socket(std::move(sock)), buffer(kMaxLineBytes) {}

  void start() { read(); }

  void read() {
    asio::async_read_until(socket, buffer, '\n',
                           [self = std::static_pointer_cast<TcpSession>(shared_from_this())](
                               boost::system::error_code ec, std::size_t n) {
                             if (ec) {
                               self->server.drop(self->id);
                               return;
                             }
                             std::string line(asio::buffers_begin(self->buffer.data()),
                                              asio::buffers_begin(self->buffer.data()) + static_cast<long>(n) - 1);
                             self->buffer.consume(n);
                             self->server.on_line(self->id, line);
                             if (self->socket.is_open()) self->read();
                           });
  }

  void deliver(std::shared_ptr<const std::string> line) override {
    queue.push_back(std::move(line));
    if (queue.size() == 1) write();
  }

  void write() {
    asio::async_write(socket, asio::buffer(*queue.front()),
                      [self = std::static_pointer_cast<TcpSession>(shared_from_this())](boost::system::error_code ec,
                                                                                       std::size_t) {
                        if (ec) {
                          self->server.drop(self->id);
                          return;
                        }
                        self->queue.pop_front();
                        if (!self->queue.empty()) self->write();
                      });
  }

  void close() override {
    boost::system::error_code ec;
    socket.shutdown(tcp::socket::shutdown_both, ec);
    socket.close(ec);
  }

  tcp::socket socket;
  asio::streambuf buffer;
  std::deque<std::shared_ptr<const std::string>> queue;
};

struct Server::Impl::WsSession : Session {
  WsSession(Impl& s, std::uint64_t i, tcp::socket sock) : Session(s, i), ws(std::move(sock)) {}

  void start(http::request<http::string_body> req) {
    ws.text(true);
    ws.read_message_max(kMaxLineBytes);
    ws.async_accept(req, [self = std::static_pointer_cast<WsSession>(shared_from_this())](boost::system::error_code ec) {
      if (ec) return;
      self->server.add(self);
      self->read();
    });
  }

  void read() {
    ws.async_read(buffer, [self = std::static_pointer_cast<WsSession>(shared_from_this())](
                              boost::system::error_code ec, std::size_t) {
      if (ec) {
        self->server.drop(self->id);
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer.data());
      self->buffer.consume(self->buffer.size());
      self->server.on_line(self->id, text);
      if (self->ws.is_open()) self->read();
    });
  }

  void deliver(std::shared_ptr<const std::string> line) override {
    queue.push_back(std::move(line));
    if (queue.size() == 1) write();
  }

  void write() {
    // One message per frame, without the line terminator.
    const std::string& l = *queue.front();
    ws.async_write(asio::buffer(l.data(), l.size() - 1),
                   [self = std::static_pointer_cast<WsSession>(shared_from_this())](boost::system::error_code ec,
                                                                                  std::size_t) {
                     if (ec) {
                       self->server.drop(self->id);
                       return;
                     }
                     self->queue.pop_front();
                     if (!self->queue.empty()) self->write();
                   });
  }

  void close() override {
    boost::system::error_code ec;
    beast::get_lowest_layer(ws).shutdown(tcp::socket::shutdown_both, ec);
    beast::get_lowest_layer(ws).close(ec);
  }

  websocket::stream<tcp::socket> ws;
  beast::flat_buffer buffer;
  std::deque<std::shared_ptr<const std::string>> queue;
};

struct Server::Impl::HttpSession : std::enable_shared_from_this<HttpSession> {
  HttpSession(Impl& s, tcp::socket sock) : server(s), socket(std::move(sock)) {}

  void start() {
    http::async_read(socket, buffer, request,
                     [self = shared_from_this()](boost::system::error_code ec, std::size_t) {
                       if (ec) return;
                       self->handle();
                     });
  }

  void handle() {
    if (websocket::is_upgrade(request)) {
      if (request.target() != "/ws") {
        respond(http::status::not_found, "text/plain", "not found\n");
        return;
      }
      auto ws = std::make_shared<WsSession>(server, server.next_id++, std::move(socket));
      ws->start(std::move(request));
      return;
    }
    if (request.method() != http::verb::get || server.options.headless) {
      respond(http::status::not_found, "text/plain", "not found\n");
      return;
    }
    std::string target(request.target());
    if (auto q = target.find('?'); q != std::string::npos) target.resize(q);
    if (target == "/") target = "/index.html";
    if (server.options.static_dir.empty()) {
      if (target == "/index.html") {
        respond(http::status::ok, "text/html", kPlaceholderPage);
      } else {
        respond(http::status::not_found, "text/plain", "not found\n");
      }
      return;
    }
    if (target.find("..") != std::string::npos) {
      respond(http::status::bad_request, "text/plain", "bad path\n");
      return;
    }
    const std::filesystem::path path = server.options.static_dir / target.substr(1);
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      respond(http::status::not_found, "text/plain", "not found\n");
      return;
    }
    std::ostringstream body;
    body << in.rdbuf();
    respond(http::status::ok, content_type(path), body.str());
  }

  void respond(http::status status, const std::string& type, std::string body) {
    auto res = std::make_shared<http::response<http::string_body>>(status, request.version());
    res->set(http::field::content_type, type);
    res->keep_alive(false);
    res->body() = std::move(body);
    res->prepare_payload();
    http::async_write(socket, *res, [self = shared_from_this(), res](boost::system::error_code, std::size_t) {
      boost::system::error_code ec;
      self->socket.shutdown(tcp::socket::shutdown_both, ec);
    });
  }

  Impl& server;
  tcp::socket socket;
  beast::flat_buffer buffer;
  http::request<http::string_body> request;
};

void Server::Impl::accept_tcp() {
  tcp_acceptor.async_accept([this](boost::system::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    auto s = std::make_shared<TcpSession>(*this, next_id++, std::move(socket));
    add(s);
    s->start();
    accept_tcp();
  });
}

void Server::Impl::accept_http() {
  http_acceptor.async_accept([this](boost::system::error_code ec, tcp::socket socket) {
    if (ec) return;
    std::make_shared<HttpSession>(*this, std::move(socket))->start();
    accept_http();
  });
}

Server::Server(Scenario scenario, ServerOptions options)
    : impl_(std::make_unique<Impl>(std::move(scenario), std::move(options))) {}

Server::~Server() { stop(); }

void Server::start() {
  if (impl_->started) return;
  impl_->listen(impl_->tcp_acceptor, impl_->options.tcp);
  impl_->listen(impl_->http_acceptor, impl_->options.http);
  impl_->started = true;
  impl_->accept_tcp();
  impl_->accept_http();
  impl_->io_thread = std::thread([this] {
    auto guard = asio::make_work_guard(impl_->io);
    impl_->io.run();
  });
  impl_->sim_thread = std::thread([this] { impl_->run_sim(); });
}

void Server::wait() {
  if (impl_->sim_thread.joinable()) impl_->sim_thread.join();
}

void Server::stop() {
  if (!impl_->started) return;
  impl_->stopping = true;
  wait();
  asio::post(impl_->io, [this] {
    boost::system::error_code ec;
    impl_->tcp_acceptor.close(ec);
    impl_->http_acceptor.close(ec);
    auto sessions = impl_->sessions;
    for (auto& [id, s] : sessions) impl_->drop(id);
    impl_->io.stop();
  });
  if (impl_->io_thread.joinable()) impl_->io_thread.join();
  impl_->started = false;
}

std::uint16_t Server::tcp_port() const { return impl_->tcp_acceptor.local_endpoint().port(); }
std::uint16_t Server::http_port() const { return impl_->http_acceptor.local_endpoint().port(); }
std::int64_t Server::ticks_run() const { return impl_->ticks; }
std::size_t Server::client_count() const { return impl_->clients; }

}  // namespace vlp
