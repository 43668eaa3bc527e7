#include "fcp/play/client.hpp"

#include <chrono>

#include <boost/asio.hpp>
#include <boost/beast.hpp>

#include "fcp/common/error.hpp"
#include "fcp/play/protocol.hpp"

namespace fcp::play {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

json http_post(const std::string& host, unsigned short port, const std::string& target, const json& body) {
  asio::io_context io;
  tcp::resolver resolver(io);
  beast::tcp_stream stream(io);
  stream.connect(resolver.resolve(host, std::to_string(port)));
  http::request<http::string_body> req{http::verb::post, target, 11};
  req.set(http::field::host, host);
  req.set(http::field::content_type, "application/json");
  req.body() = body.dump();
  req.prepare_payload();
  http::write(stream, req);
  beast::flat_buffer buffer;
  http::response<http::string_body> res;
  http::read(stream, buffer, res);
  beast::error_code ec;
  stream.socket().shutdown(tcp::socket::shutdown_both, ec);
  const json out = json::parse(res.body(), nullptr, false);
  if (res.result_int() / 100 != 2) {
    const std::string msg = out.is_object() ? out.value("message", res.body()) : res.body();
    throw Error("HTTP " + std::to_string(res.result_int()) + " from " + target + ": " + msg);
  }
  return out;
}

HeadlessClient::HeadlessClient(std::string host, unsigned short port, std::string session, std::string token,
                               Options options)
    : host_(std::move(host)),
      port_(port),
      session_(std::move(session)),
      token_(std::move(token)),
      options_(std::move(options)) {}

HeadlessClient::Summary HeadlessClient::run() {
  asio::io_context io;
  tcp::resolver resolver(io);
  websocket::stream<tcp::socket> ws(io);
  asio::connect(ws.next_layer(), resolver.resolve(host_, std::to_string(port_)));
  ws.handshake(host_ + ":" + std::to_string(port_), "/v1/play?session=" + session_ + "&token=" + token_);
  ws.text(true);

  const auto send = [&ws](const ClientMessage& msg) { ws.write(asio::buffer(to_json(msg).dump())); };

  Summary summary;
  Rng rng(options_.seed);
  agents::ScriptedController script(options_.style, derive_seed(options_.seed, 1));
  Phase phase = Phase::Tutorial;
  int study_frames = 0;
  int frames = 0;
  bool episode_open = false;
  std::chrono::steady_clock::time_point first_frame;

  beast::flat_buffer buffer;
  for (;;) {
    buffer.clear();
    beast::error_code ec;
    ws.read(buffer, ec);
    if (ec) break;
    const json msg = json::parse(beast::buffers_to_string(buffer.data()));
    const auto type = msg.at("type").get<std::string>();
    if (type == "phase") {
      phase = phase_from_string(msg.at("phase").get<std::string>());
      summary.final_phase = to_string(phase);
      if (phase == Phase::Tutorial || phase == Phase::Debrief) {
        send(AdvanceMsg{});
      } else if (phase == Phase::Preference) {
        send(PreferenceMsg{options_.rate(msg.at("payload"))});
        ++summary.preferences_sent;
      } else if (phase == Phase::Done) {
        break;
      }
    } else if (type == "frame") {
      const auto state = state_from_frame(msg);
      const int seat = msg.at("human_seat").get<int>();
      if (!episode_open) {
        episode_open = true;
        frames = 0;
        first_frame = std::chrono::steady_clock::now();
        // The frame is post-step; planners only need the current layout.
        script.begin_episode(state, seat);
      }
      ++frames;
      if (phase == Phase::Playing) {
        ++study_frames;
        if (options_.disconnect_after_frames && study_frames >= *options_.disconnect_after_frames) {
          summary.disconnected = true;
          break;
        }
      }
      if (!state.done()) send(InputMsg{script.act(state, seat, rng)});
    } else if (type == "episode_end") {
      episode_open = false;
      if (msg.at("episode").get<int>() >= 0) {
        summary.deliveries.push_back(msg.at("deliveries").get<int>());
        summary.frames_per_episode.push_back(frames);
        summary.episode_seconds.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - first_frame).count());
      }
    } else if (type == "error") {
      ++summary.errors;
    }
  }
  beast::error_code ec;
  if (summary.disconnected) {
    ws.next_layer().close(ec);
  } else if (ws.is_open()) {
    ws.close(websocket::close_code::normal, ec);
  }
  return summary;
}

}  // namespace fcp::play
