#include <gtest/gtest.h>

#include <boost/asio.hpp>
#include <future>
#include <sstream>
#include <thread>

#include "nfvra/protocol.hpp"

using namespace nfvra;

namespace {

SimulationConfig session_config() {
  SimulationConfig cfg = wx100_preset();
  cfg.vn_count = 10;
  return cfg;
}

json send(Session& s, const json& msg) { return s.handle(msg.dump()); }

}  // namespace

TEST(Session, HelloAdvertisesManifestAndVersion) {
  Session s(session_config(), 0);
  const auto h = s.hello();
  EXPECT_EQ(h["type"], "hello");
  EXPECT_EQ(h["schema_version"], kProtocolVersion);
  EXPECT_EQ(h["pn_size"], 100);
  EXPECT_FALSE(h["feature_manifest"]["pn"].empty());
  EXPECT_EQ(send(s, {{"type", "hello"}, {"schema_version", kProtocolVersion}})["type"], "hello");
}

TEST(Session, VersionMismatchClosesSession) {
  Session s(session_config(), 0);
  const auto r = send(s, {{"type", "hello"}, {"schema_version", 99}});
  EXPECT_EQ(r["type"], "error");
  EXPECT_EQ(r["code"], "version_mismatch");
  EXPECT_TRUE(s.closed());
}

TEST(Session, MalformedMessagesKeepSessionAlive) {
  Session s(session_config(), 0);
  EXPECT_EQ(s.handle("{oops")["code"], "malformed");
  EXPECT_EQ(s.handle("[1,2]")["code"], "malformed");
  EXPECT_EQ(send(s, {{"type", "dance"}})["code"], "unknown_type");
  EXPECT_EQ(send(s, {{"type", "step"}, {"action", "x"}})["code"], "malformed");
  EXPECT_EQ(send(s, {{"type", "step"}, {"action", 0}})["code"], "no_episode");
  EXPECT_FALSE(s.closed());
  EXPECT_EQ(send(s, {{"type", "reset"}})["type"], "obs");
}

TEST(Session, ResetWithSeedIsReproducible) {
  Session a(session_config(), 0), b(session_config(), 5);
  const auto oa = send(a, {{"type", "reset"}, {"seed", 42}});
  const auto ob = send(b, {{"type", "reset"}, {"seed", 42}});
  EXPECT_EQ(oa, ob);
  EXPECT_EQ(oa["mask"].size(), 100u);
}

TEST(Session, StepTransitionsAndBadActions) {
  Session s(session_config(), 0);
  const auto obs = send(s, {{"type", "reset"}, {"seed", 1}});
  const auto bad = send(s, {{"type", "step"}, {"action", 1000}});
  EXPECT_EQ(bad["code"], "bad_action");
  int action = -1;
  for (std::size_t i = 0; i < obs["mask"].size(); ++i)
    if (obs["mask"][i].get<bool>()) {
      action = int(i);
      break;
    }
  ASSERT_GE(action, 0);
  const auto t = send(s, {{"type", "step"}, {"action", action}});
  EXPECT_EQ(t["type"], "transition");
  EXPECT_TRUE(t.contains("reward"));
  EXPECT_TRUE(t["info"].contains("outcome"));
}

TEST(Session, RandomPolicyEpisodesTerminate) {
  Session s(session_config(), 3, RewardSpec::fir(0.1));
  Rng rng(1);
  int successes = 0;
  for (int ep = 0; ep < 100; ++ep) {
    auto obs = send(s, {{"type", "reset"}});
    ASSERT_EQ(obs["type"], "obs");
    for (int step = 0; step < 50; ++step) {
      std::vector<int> legal;
      for (std::size_t i = 0; i < obs["mask"].size(); ++i)
        if (obs["mask"][i].get<bool>()) legal.push_back(int(i));
      const int a = legal.empty() ? 0 : legal[uniform_index(rng, legal.size())];
      const auto t = send(s, {{"type", "step"}, {"action", a}});
      ASSERT_EQ(t["type"], "transition") << t.dump();
      if (t["done"].get<bool>()) {
        successes += t["info"]["outcome"] == "success";
        break;
      }
      obs = t["obs"];
    }
    EXPECT_TRUE(s.environment().state().done());
  }
  EXPECT_GT(successes, 0);
}

TEST(Session, CloseSaysBye) {
  Session s(session_config(), 0);
  EXPECT_EQ(send(s, {{"type", "close"}})["type"], "bye");
  EXPECT_TRUE(s.closed());
}

TEST(Session, RewardSpecFromJson) {
  EXPECT_EQ(reward_from_json({{"kind", "air"}}).kind, RewardKind::air);
  const auto fir = reward_from_json({{"kind", "fir"}, {"value", 0.3}});
  EXPECT_EQ(fir.value, 0.3);
  EXPECT_THROW(reward_from_json({{"kind", "bonus"}}), ConfigError);
}

TEST(Stream, ServesLinesUntilClose) {
  Session s(session_config(), 0);
  std::istringstream in("{\"type\":\"reset\",\"seed\":2}\n\n{\"type\":\"close\"}\n{\"type\":\"reset\"}\n");
  std::ostringstream out;
  serve_stream(s, in, out);
  std::istringstream lines(out.str());
  std::vector<json> replies;
  for (std::string line; std::getline(lines, line);) replies.push_back(json::parse(line));
  ASSERT_EQ(replies.size(), 3u);
  EXPECT_EQ(replies[0]["type"], "hello");
  EXPECT_EQ(replies[1]["type"], "obs");
  EXPECT_EQ(replies[2]["type"], "bye");
}

TEST(Listen, ParsesHostAndPort) {
  EXPECT_EQ(parse_listen(":5555"), std::make_pair(std::string("127.0.0.1"), (unsigned short)5555));
  EXPECT_EQ(parse_listen("0.0.0.0:1").first, "0.0.0.0");
  EXPECT_THROW(parse_listen("nope"), ConfigError);
  EXPECT_THROW(parse_listen(":99999"), ConfigError);
}

TEST(Tcp, HandshakeResetAndClose) {
  namespace asio = boost::asio;
  using asio::ip::tcp;
  std::promise<unsigned short> ready;
  auto port_future = ready.get_future();
  std::thread server([&] {
    serve_tcp(
        "127.0.0.1:0", [] { return std::make_unique<Session>(session_config(), 0); },
        [&](unsigned short port) { ready.set_value(port); }, 1);
  });
  const unsigned short port = port_future.get();
  asio::io_context io;
  tcp::socket socket(io);
  socket.connect({asio::ip::make_address("127.0.0.1"), port});
  asio::streambuf buf;
  auto read_json = [&] {
    asio::read_until(socket, buf, '\n');
    std::istream is(&buf);
    std::string line;
    std::getline(is, line);
    return json::parse(line);
  };
  auto write_json = [&](const json& j) { asio::write(socket, asio::buffer(j.dump() + "\n")); };
  EXPECT_EQ(read_json()["type"], "hello");
  write_json({{"type", "hello"}, {"schema_version", kProtocolVersion}});
  EXPECT_EQ(read_json()["type"], "hello");
  write_json({{"type", "reset"}, {"seed", 4}});
  EXPECT_EQ(read_json()["type"], "obs");
  write_json({{"type", "close"}});
  EXPECT_EQ(read_json()["type"], "bye");
  server.join();
}
