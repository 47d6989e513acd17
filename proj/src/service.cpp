#include "swarmsim/service.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "swarmsim/error.hpp"

namespace swarmsim {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

std::string mime_type(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

/// Serialized writes over one WebSocket; every member runs on the I/O thread.
class WsConnection : public std::enable_shared_from_this<WsConnection> {
 public:
  using OnText = std::function<void(const std::shared_ptr<WsConnection>&, std::string)>;
  using OnClose = std::function<void(const std::shared_ptr<WsConnection>&)>;

  explicit WsConnection(tcp::socket socket) : ws_(std::move(socket)) {}
  explicit WsConnection(websocket::stream<beast::tcp_stream> ws) : ws_(std::move(ws)) {}

  websocket::stream<beast::tcp_stream>& ws() { return ws_; }

  void start_reading(OnText on_text, OnClose on_close) {
    on_text_ = std::move(on_text);
    on_close_ = std::move(on_close);
    read();
  }

  void send(std::shared_ptr<const std::string> text) {
    if (closed_) {
      return;
    }
    outbox_.push_back(std::move(text));
    if (outbox_.size() == 1) {
      write();
    }
  }

  void close() {
    if (closed_) {
      return;
    }
    closed_ = true;
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both, ec);
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->closed_ = true;
        if (self->on_close_) self->on_close_(self);
        return;
      }
      std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      if (self->on_text_) self->on_text_(self, std::move(text));
      self->read();
    });
  }

  void write() {
    ws_.text(true);
    ws_.async_write(net::buffer(*outbox_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->outbox_.clear();
                        return;
                      }
                      self->outbox_.pop_front();
                      if (!self->outbox_.empty()) {
                        self->write();
                      }
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> outbox_;
  OnText on_text_;
  OnClose on_close_;
  bool closed_ = false;
};

}  // namespace

struct TelemetryServer::Impl {
  Options options;
  Roster roster;
  CommandSink sink;
  net::io_context io;
  tcp::acceptor acceptor{io};
  std::thread thread;
  std::set<std::shared_ptr<WsConnection>> clients;
  std::atomic<std::size_t> client_count{0};
  int port = 0;
  bool running = false;

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        return;
      }
      serve_http(std::move(socket));
      accept();
    });
  }

  // Reads one HTTP request: WebSocket upgrades become clients, anything
  // else is answered from the static UI directory.
  void serve_http(tcp::socket socket) {
    struct Pending {
      beast::tcp_stream stream;
      beast::flat_buffer buffer;
      http::request<http::string_body> req;
    };
    auto p = std::make_shared<Pending>(Pending{beast::tcp_stream(std::move(socket)), {}, {}});
    http::async_read(p->stream, p->buffer, p->req, [this, p](beast::error_code ec, std::size_t) {
      if (ec) {
        return;
      }
      if (websocket::is_upgrade(p->req)) {
        websocket::stream<beast::tcp_stream> ws(std::move(p->stream));
        auto conn = std::make_shared<WsConnection>(std::move(ws));
        conn->ws().async_accept(p->req, [this, conn](beast::error_code aec) {
          if (aec) {
            return;
          }
          clients.insert(conn);
          client_count = clients.size();
          conn->start_reading(
              [this](const std::shared_ptr<WsConnection>& c, std::string text) {
                on_text(c, std::move(text));
              },
              [this](const std::shared_ptr<WsConnection>& c) {
                clients.erase(c);
                client_count = clients.size();
              });
        });
        return;
      }
      respond_static(p);
    });
  }

  template <typename P>
  void respond_static(const std::shared_ptr<P>& p) {
    auto res = std::make_shared<http::response<http::string_body>>();
    res->version(p->req.version());
    res->keep_alive(false);
    std::string target(p->req.target());
    if (const auto q = target.find('?'); q != std::string::npos) {
      target.resize(q);
    }
    std::filesystem::path file;
    bool found = false;
    if (options.ui_dir && p->req.method() == http::verb::get &&
        target.find("..") == std::string::npos) {
      file = *options.ui_dir / (target == "/" ? std::string("index.html") : target.substr(1));
      found = std::filesystem::is_regular_file(file);
    }
    if (found) {
      std::ifstream in(file, std::ios::binary);
      std::ostringstream body;
      body << in.rdbuf();
      res->result(http::status::ok);
      res->set(http::field::content_type, mime_type(file));
      res->body() = body.str();
    } else {
      res->result(http::status::not_found);
      res->set(http::field::content_type, "text/plain");
      res->body() = "not found\n";
    }
    res->prepare_payload();
    http::async_write(p->stream, *res, [p, res](beast::error_code, std::size_t) {
      beast::error_code ec;
      p->stream.socket().shutdown(tcp::socket::shutdown_both, ec);
    });
  }

  void on_text(const std::shared_ptr<WsConnection>& c, std::string text) {
    try {
      sink(parse_command_text(text, &roster));
    } catch (const Error& e) {
      c->send(std::make_shared<const std::string>(error_frame(e.what()).dump()));
    }
  }
};

TelemetryServer::TelemetryServer(Options options, Roster roster, CommandSink sink)
    : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  impl_->roster = std::move(roster);
  impl_->sink = std::move(sink);
}

TelemetryServer::~TelemetryServer() { stop(); }

void TelemetryServer::start() {
  Impl& s = *impl_;
  beast::error_code ec;
  const auto address = net::ip::make_address(s.options.address, ec);
  if (ec) {
    throw Error(ErrorKind::BindError, "bad address " + s.options.address);
  }
  const tcp::endpoint endpoint(address, static_cast<unsigned short>(s.options.port));
  s.acceptor.open(endpoint.protocol(), ec);
  if (!ec) s.acceptor.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) s.acceptor.bind(endpoint, ec);
  if (!ec) s.acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec) {
    throw Error(ErrorKind::BindError,
                "cannot listen on port " + std::to_string(s.options.port) + ": " + ec.message());
  }
  s.port = s.acceptor.local_endpoint().port();
  s.accept();
  s.running = true;
  s.thread = std::thread([&s] { s.io.run(); });
}

void TelemetryServer::stop() {
  Impl& s = *impl_;
  if (!s.running) {
    return;
  }
  s.running = false;
  net::post(s.io, [&s] {
    beast::error_code ec;
    s.acceptor.close(ec);
    for (const auto& c : s.clients) {
      c->close();
    }
    s.clients.clear();
    s.client_count = 0;
    s.io.stop();
  });
  if (s.thread.joinable()) {
    s.thread.join();
  }
}

int TelemetryServer::port() const { return impl_->port; }

std::size_t TelemetryServer::client_count() const { return impl_->client_count.load(); }

void TelemetryServer::broadcast(const StateSnapshot& snapshot) {
  broadcast_text(state_frame(snapshot).dump());
}

void TelemetryServer::broadcast_text(std::string frame) {
  auto text = std::make_shared<const std::string>(std::move(frame));
  net::post(impl_->io, [this, text] {
    for (const auto& c : impl_->clients) {
      c->send(text);
    }
  });
}

struct ProtocolClient::Impl {
  net::io_context io;
  std::shared_ptr<WsConnection> conn;
  std::thread thread;
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::string> inbox;
  bool closed = false;
};

ProtocolClient::ProtocolClient(const std::string& host, int port) : impl_(std::make_unique<Impl>()) {
  Impl& s = *impl_;
  tcp::resolver resolver(s.io);
  beast::error_code ec;
  const auto results = resolver.resolve(host, std::to_string(port), ec);
  if (ec) {
    throw Error(ErrorKind::IoError, "cannot resolve " + host);
  }
  websocket::stream<beast::tcp_stream> ws(s.io);
  beast::get_lowest_layer(ws).connect(results, ec);
  if (ec) {
    throw Error(ErrorKind::IoError, "cannot connect: " + ec.message());
  }
  ws.handshake(host, "/", ec);
  if (ec) {
    throw Error(ErrorKind::IoError, "handshake failed: " + ec.message());
  }
  s.conn = std::make_shared<WsConnection>(std::move(ws));
  s.conn->start_reading(
      [&s](const std::shared_ptr<WsConnection>&, std::string text) {
        {
          std::lock_guard lock(s.mu);
          s.inbox.push_back(std::move(text));
        }
        s.cv.notify_all();
      },
      [&s](const std::shared_ptr<WsConnection>&) {
        {
          std::lock_guard lock(s.mu);
          s.closed = true;
        }
        s.cv.notify_all();
      });
  s.thread = std::thread([&s] { s.io.run(); });
}

ProtocolClient::~ProtocolClient() { close(); }

void ProtocolClient::send(const std::string& text) {
  auto msg = std::make_shared<const std::string>(text);
  net::post(impl_->io, [c = impl_->conn, msg] { c->send(msg); });
}

std::optional<std::string> ProtocolClient::receive(double timeout_seconds) {
  Impl& s = *impl_;
  std::unique_lock lock(s.mu);
  s.cv.wait_for(lock, std::chrono::duration<double>(timeout_seconds),
                [&] { return !s.inbox.empty() || s.closed; });
  if (s.inbox.empty()) {
    return std::nullopt;
  }
  std::string out = std::move(s.inbox.front());
  s.inbox.pop_front();
  return out;
}

void ProtocolClient::close() {
  Impl& s = *impl_;
  if (!s.thread.joinable()) {
    return;
  }
  net::post(s.io, [&s] {
    s.conn->close();
    s.io.stop();
  });
  s.thread.join();
}

}  // namespace swarmsim
