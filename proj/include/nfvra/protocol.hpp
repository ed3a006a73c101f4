#pragma once

// JSON-lines environment protocol. One JSON object per line in each
// direction. The server greets with `hello`; clients then send
//   {"type":"hello","schema_version":1}   optional version check
//   {"type":"reset","seed":7}             seed optional
//   {"type":"step","action":12}
//   {"type":"close"}
// and receive `hello`, `obs`, `transition` or `error{code, detail}`.

#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <boost/asio.hpp>

#include "nfvra/config.hpp"
#include "nfvra/environment.hpp"
#include "nfvra/generators.hpp"

namespace nfvra {

inline constexpr int kProtocolVersion = 1;

inline json observation_json(const Observation& obs) {
  json mask = json::array();
  for (char m : obs.mask) mask.push_back(bool(m));
  return {{"pn_features", obs.pn_features},
          {"vn_features", obs.vn_features},
          {"current_vnode", obs.current_vnode},
          {"mask", mask}};
}

inline json error_json(const std::string& code, const std::string& detail) {
  return {{"type", "error"}, {"code", code}, {"detail", detail}};
}

inline RewardSpec reward_from_json(const json& j) {
  RewardSpec r;
  const auto kind = j.value("kind", std::string("fir"));
  if (kind == "noir")
    r = RewardSpec::noir();
  else if (kind == "air")
    r = RewardSpec::air();
  else if (kind == "fir")
    r = RewardSpec::fir(j.value("value", 0.1));
  else
    throw ConfigError("env.reward.kind", "expected noir, fir or air");
  if (r.kind == RewardKind::fir && !(r.value > 0.0))
    throw ConfigError("env.reward.value", "FIR value must be > 0");
  if (j.contains("failure_penalty")) r.failure_penalty = j.at("failure_penalty").get<double>();
  if (j.contains("discount")) r.discount = j.at("discount").get<double>();
  if (!(r.discount >= 0.0 && r.discount <= 1.0))
    throw ConfigError("env.reward.discount", "must lie in [0, 1]");
  return r;
}

inline json reward_json(const RewardSpec& r) {
  json j = {{"kind", to_string(r.kind)}, {"discount", r.discount}};
  if (r.kind == RewardKind::fir) j["value"] = r.value;
  if (r.failure_penalty) j["failure_penalty"] = *r.failure_penalty;
  return j;
}

// One client conversation. Episodes are drawn from the configured request
// generator against a pristine substrate built once per session.
class Session {
 public:
  Session(const SimulationConfig& raw, std::uint64_t seed, RewardSpec reward = {},
          FeatureSpec features = {})
      : cfg_(resolve_scenario(raw)),
        seed_(seed),
        pn_(build_physical_network(cfg_, seed)),
        env_(reward, features) {
    validate(cfg_);
  }

  json hello() const {
    const auto manifest = feature_manifest(pn_, env_.feature_spec());
    return {{"type", "hello"},
            {"schema_version", kProtocolVersion},
            {"pn_size", pn_.node_count()},
            {"feature_manifest", {{"pn", manifest.pn_columns}, {"vn", manifest.vn_columns}}},
            {"reward", reward_json(env_.reward_spec())}};
  }

  bool closed() const { return closed_; }
  const Environment& environment() const { return env_; }

  json handle(const std::string& line) {
    json msg;
    try {
      msg = json::parse(line);
    } catch (const json::parse_error& e) {
      return error_json("malformed", std::string("invalid JSON: ") + e.what());
    }
    if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string())
      return error_json("malformed", "message must be an object with a string 'type'");
    const std::string type = msg["type"];
    try {
      if (type == "hello") {
        if (!msg.contains("schema_version") || !msg["schema_version"].is_number_integer())
          return error_json("malformed", "hello needs an integer schema_version");
        if (msg["schema_version"].get<int>() != kProtocolVersion) {
          closed_ = true;
          return error_json("version_mismatch",
                            "server speaks schema_version " + std::to_string(kProtocolVersion));
        }
        return hello();
      }
      if (type == "reset") {
        std::uint64_t seed = 0;
        int index = 0;
        if (msg.contains("seed")) {
          if (!msg["seed"].is_number_integer() || msg["seed"].get<long long>() < 0)
            return error_json("malformed", "seed must be a non-negative integer");
          seed = msg["seed"].get<std::uint64_t>();
        } else {
          seed = stream_seed(seed_, "episodes", episodes_);
          index = int(episodes_);
        }
        ++episodes_;
        auto vn = generate_request(cfg_, seed, index);
        vn.arrival_time = 0.0;
        vn.lifetime = 1.0;
        json out = observation_json(env_.reset(pn_, std::move(vn), std::size_t(cfg_.k_paths)));
        out["type"] = "obs";
        return out;
      }
      if (type == "step") {
        if (!msg.contains("action") || !msg["action"].is_number_integer())
          return error_json("malformed", "step needs an integer action");
        const auto tr = env_.step(msg["action"].get<int>());
        json info = {{"outcome", to_string(tr.outcome)}, {"r2c", tr.r2c}};
        if (tr.reason) info["failure_reason"] = to_string(*tr.reason);
        return {{"type", "transition"},
                {"obs", observation_json(tr.obs)},
                {"reward", tr.reward},
                {"done", tr.done},
                {"info", info}};
      }
      if (type == "close") {
        closed_ = true;
        return {{"type", "bye"}};
      }
      return error_json("unknown_type", "unknown message type '" + type + "'");
    } catch (const ProtocolError& e) {
      return error_json(e.code(), e.what());
    }
  }

 private:
  SimulationConfig cfg_;
  std::uint64_t seed_;
  PhysicalNetwork pn_;
  Environment env_;
  std::uint64_t episodes_ = 0;
  bool closed_ = false;
};

// Serves one session over a line stream (stdio or a socket stream).
inline void serve_stream(Session& session, std::istream& in, std::ostream& out) {
  out << session.hello().dump() << '\n' << std::flush;
  std::string line;
  while (!session.closed() && std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out << session.handle(line).dump() << '\n' << std::flush;
  }
}

using SessionFactory = std::function<std::unique_ptr<Session>()>;

// Parses ":PORT" or "HOST:PORT".
inline std::pair<std::string, unsigned short> parse_listen(const std::string& spec) {
  const auto colon = spec.rfind(':');
  if (colon == std::string::npos) throw ConfigError("listen", "expected [HOST]:PORT, got '" + spec + "'");
  std::string host = spec.substr(0, colon);
  if (host.empty()) host = "127.0.0.1";
  int port = -1;
  try {
    port = std::stoi(spec.substr(colon + 1));
  } catch (const std::exception&) {
  }
  if (port < 0 || port > 65535) throw ConfigError("listen", "invalid port in '" + spec + "'");
  return {host, static_cast<unsigned short>(port)};
}

// Accepts TCP clients, one thread and one private Session each. Returns
// after `max_sessions` sessions have finished (0 = serve forever).
inline void serve_tcp(const std::string& listen, const SessionFactory& factory,
                      const std::function<void(unsigned short)>& on_ready = {},
                      std::size_t max_sessions = 0) {
  namespace asio = boost::asio;
  using asio::ip::tcp;
  const auto [host, port] = parse_listen(listen);
  asio::io_context io;
  tcp::acceptor acceptor(io, tcp::endpoint(asio::ip::make_address(host), port));
  if (on_ready) on_ready(acceptor.local_endpoint().port());
  std::vector<std::thread> workers;
  for (std::size_t served = 0; max_sessions == 0 || served < max_sessions; ++served) {
    auto socket = std::make_shared<tcp::socket>(io);
    acceptor.accept(*socket);
    workers.emplace_back([socket, &factory] {
      try {
        auto session = factory();
        auto send = [&](const json& j) { asio::write(*socket, asio::buffer(j.dump() + "\n")); };
        send(session->hello());
        asio::streambuf buffer;
        boost::system::error_code ec;
        while (!session->closed()) {
          asio::read_until(*socket, buffer, '\n', ec);
          if (ec) break;
          std::istream is(&buffer);
          std::string line;
          std::getline(is, line);
          if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
          send(session->handle(line));
        }
      } catch (const std::exception& e) {
        std::cerr << "session ended: " << e.what() << '\n';
      }
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace nfvra
