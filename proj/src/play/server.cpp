#include "fcp/play/server.hpp"

#include <deque>
#include <map>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast.hpp>
#include <openssl/rand.h>

#include "fcp/common/error.hpp"

namespace fcp::play {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

namespace {

std::string random_hex(int bytes) {
  std::vector<unsigned char> buf(bytes);
  if (RAND_bytes(buf.data(), bytes) != 1) throw Error("RAND_bytes failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned char b : buf) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 15]);
  }
  return out;
}

std::uint64_t random_seed() {
  std::uint64_t s = 0;
  if (RAND_bytes(reinterpret_cast<unsigned char*>(&s), sizeof s) != 1) throw Error("RAND_bytes failed");
  return s;
}

std::map<std::string, std::string> parse_query(std::string_view target) {
  std::map<std::string, std::string> out;
  const auto q = target.find('?');
  if (q == std::string_view::npos) return out;
  std::string_view rest = target.substr(q + 1);
  while (!rest.empty()) {
    const auto amp = rest.find('&');
    const auto part = rest.substr(0, amp);
    const auto eq = part.find('=');
    if (eq != std::string_view::npos) out[std::string(part.substr(0, eq))] = std::string(part.substr(eq + 1));
    if (amp == std::string_view::npos) break;
    rest = rest.substr(amp + 1);
  }
  return out;
}

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

class Connection;

struct PlayServer::Impl {
  explicit Impl(ServerConfig c) : config(std::move(c)), acceptor(io) {
    if (!config.study) throw ValidationError("server needs a study configuration");
  }

  struct Entry {
    std::unique_ptr<StudySession> session;
    std::weak_ptr<Connection> connection;
  };

  ServerConfig config;
  asio::io_context io;
  tcp::acceptor acceptor;
  std::map<std::string, Entry> sessions;
  std::thread thread;
  bool bound = false;

  void bind();
  void accept();
  json create(const json& body);
  json resume(const std::string& id, const json& body);
  json export_all();
};

// One WebSocket participant connection. Everything runs on the server's
// single event loop thread.
class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(PlayServer::Impl* server, StudySession& session, tcp::socket socket)
      : server_(server), session_(session), ws_(std::move(socket)), timer_(server_->io) {}

  void start(http::request<http::string_body> req) {
    req_ = std::move(req);
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req_, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return self->close();
      self->send(phase_message(self->session_.phase(), self->session_.phase_payload()));
      self->maybe_start_ticking();
      self->read();
    });
  }

  bool closed() const { return closed_; }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->handle(text);
      self->read();
    });
  }

  void handle(const std::string& text) {
    try {
      const auto msg = parse_client_message(text);
      if (const auto* in = std::get_if<InputMsg>(&msg)) {
        // Keys pressed after an episode's last tick are dropped quietly.
        if (session_.ticking()) session_.input(in->action);
      } else if (const auto* pref = std::get_if<PreferenceMsg>(&msg)) {
        session_.submit_preference(pref->rating, now_ms());
        send(phase_message(session_.phase(), session_.phase_payload()));
        maybe_start_ticking();
      } else {
        session_.advance();
        send(phase_message(session_.phase(), session_.phase_payload()));
        maybe_start_ticking();
      }
    } catch (const Error& e) {
      send(error_message(e.what()));
    }
  }

  void maybe_start_ticking() {
    if (ticking_ || closed_ || !session_.ticking()) return;
    ticking_ = true;
    deadline_ = std::chrono::steady_clock::now() + server_->config.tick_period;
    schedule();
  }

  void schedule() {
    timer_.expires_at(deadline_);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || self->closed_) return;
      self->on_tick();
    });
  }

  void on_tick() {
    const auto result = session_.tick();
    send(result.frame);
    if (result.episode_end) send(*result.episode_end);
    if (result.phase_changed) send(phase_message(session_.phase(), session_.phase_payload()));
    if (!session_.ticking()) {
      ticking_ = false;
      return;
    }
    deadline_ += server_->config.tick_period;
    schedule();
  }

  void send(const json& msg) {
    if (closed_) return;
    queue_.push_back(msg.dump());
    if (queue_.size() == 1) write_next();
  }

  void write_next() {
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write_next();
    });
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    timer_.cancel();
    session_.disconnect();
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

  PlayServer::Impl* server_;
  StudySession& session_;
  websocket::stream<beast::tcp_stream> ws_;
  http::request<http::string_body> req_;
  asio::steady_timer timer_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  std::chrono::steady_clock::time_point deadline_;
  bool ticking_ = false;
  bool closed_ = false;
};

namespace {

// Plain HTTP exchange; hands the socket to a Connection on upgrade.
class HttpExchange : public std::enable_shared_from_this<HttpExchange> {
 public:
  HttpExchange(PlayServer::Impl* server, tcp::socket socket)
      : server_(server), stream_(std::move(socket)) {}

  void start() {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (!ec) self->route();
    });
  }

 private:
  void route() {
    const std::string target(req_.target());
    const std::string path = target.substr(0, target.find('?'));
    if (websocket::is_upgrade(req_)) {
      if (path != "/v1/play") return respond(http::status::not_found, error_message("unknown endpoint"));
      const auto q = parse_query(target);
      const auto it = server_->sessions.find(q.count("session") ? q.at("session") : "");
      if (it == server_->sessions.end() || !q.count("token") || q.at("token") != it->second.session->token()) {
        return respond(http::status::forbidden, error_message("unknown session or bad token"));
      }
      if (const auto live = it->second.connection.lock(); live && !live->closed()) {
        return respond(http::status::conflict, error_message("session already connected"));
      }
      stream_.expires_never();
      auto conn = std::make_shared<Connection>(server_, *it->second.session, stream_.release_socket());
      it->second.connection = conn;
      conn->start(std::move(req_));
      return;
    }
    if (req_.method() != http::verb::post) {
      return respond(http::status::method_not_allowed, error_message("use POST"));
    }
    try {
      json body = req_.body().empty() ? json::object() : json::parse(req_.body());
      if (path == "/v1/sessions") return respond(http::status::ok, server_->create(body));
      if (path == "/v1/export") return respond(http::status::ok, server_->export_all());
      const std::string prefix = "/v1/sessions/", suffix = "/resume";
      if (path.starts_with(prefix) && path.ends_with(suffix) && path.size() > prefix.size() + suffix.size()) {
        const auto id = path.substr(prefix.size(), path.size() - prefix.size() - suffix.size());
        return respond(http::status::ok, server_->resume(id, body));
      }
      respond(http::status::not_found, error_message("unknown endpoint"));
    } catch (const NotFound& e) {
      respond(http::status::not_found, error_message(e.what()));
    } catch (const ContractViolation& e) {
      respond(http::status::forbidden, error_message(e.what()));
    } catch (const std::exception& e) {
      respond(http::status::bad_request, error_message(e.what()));
    }
  }

  void respond(http::status status, const json& body) {
    auto res = std::make_shared<http::response<http::string_body>>(status, req_.version());
    res->set(http::field::content_type, "application/json");
    res->keep_alive(false);
    res->body() = body.dump();
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
      beast::error_code ec;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
    });
  }

  PlayServer::Impl* server_;
  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace

void PlayServer::Impl::bind() {
  if (bound) return;
  const tcp::endpoint ep(asio::ip::make_address(config.address), config.port);
  acceptor.open(ep.protocol());
  acceptor.set_option(asio::socket_base::reuse_address(true));
  acceptor.bind(ep);
  acceptor.listen();
  bound = true;
  accept();
}

void PlayServer::Impl::accept() {
  acceptor.async_accept([self = this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;
    std::make_shared<HttpExchange>(self, std::move(socket))->start();
    self->accept();
  });
}

json PlayServer::Impl::create(const json& body) {
  const std::uint64_t seed = body.contains("seed") ? body["seed"].get<std::uint64_t>() : random_seed();
  auto session = std::make_unique<StudySession>(random_hex(8), random_hex(16), config.study, seed);
  json out = {{"v", kProtocolVersion},
              {"session", session->id()},
              {"token", session->token()},
              {"phase", to_string(session->phase())},
              {"episodes", session->plan().size()}};
  sessions[session->id()].session = std::move(session);
  return out;
}

json PlayServer::Impl::resume(const std::string& id, const json& body) {
  const auto it = sessions.find(id);
  if (it == sessions.end()) throw NotFound("unknown session '" + id + "'");
  if (body.value("token", std::string()) != it->second.session->token()) {
    throw ContractViolation("bad participant token");
  }
  const auto& s = *it->second.session;
  return {{"v", kProtocolVersion},
          {"session", s.id()},
          {"phase", to_string(s.phase())},
          {"episode", s.episode_index()},
          {"completed", s.completed().size()},
          {"abandoned", s.abandoned().size()}};
}

json PlayServer::Impl::export_all() {
  harness::ArtifactStore store(config.store_root);
  std::vector<const StudySession*> list;
  for (const auto& [id, e] : sessions) list.push_back(e.session.get());
  const auto out = export_study(store, list);
  return {{"v", kProtocolVersion},
          {"logs", out.logs},
          {"preferences", out.preferences},
          {"sessions", out.sessions},
          {"episodes", out.episodes}};
}

PlayServer::PlayServer(ServerConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

PlayServer::~PlayServer() { stop(); }

void PlayServer::start() {
  impl_->bind();
  impl_->thread = std::thread([impl = impl_.get()] { impl->io.run(); });
}

void PlayServer::run() {
  impl_->bind();
  impl_->io.run();
}

void PlayServer::stop() {
  impl_->io.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

unsigned short PlayServer::port() const {
  return impl_->bound ? impl_->acceptor.local_endpoint().port() : impl_->config.port;
}

}  // namespace fcp::play
