#include <gtest/gtest.h>

#include <sstream>

#include "json.hpp"
#include "safelife/harness.hpp"
#include "safelife/protocol.hpp"

using namespace safelife;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string agent_command(std::uint64_t seed) {
  return std::string(RANDOM_AGENT_PATH) + " " + std::to_string(seed);
}

}  // namespace

TEST(Protocol, HelloAdvertisesActions) {
  const auto j = nlohmann::json::parse(hello_message());
  EXPECT_EQ(j["type"], "hello");
  EXPECT_EQ(j["version"], kProtocolVersion);
  EXPECT_EQ(j["actions"].size(), 9u);
  EXPECT_EQ(j["actions"][5], "toggle_n");
}

TEST(Protocol, ObservationRoundTrip) {
  const Level l = gen_level(LevelSpec::benchmark(LevelFamily::kAppendSpawn, 1));
  const std::string msg = observation_message(l.board, 7, 1.5, false);
  EXPECT_TRUE(parse_observation_message(msg).same_layout(l.board));
  const auto j = nlohmann::json::parse(msg);
  EXPECT_EQ(j["step"], 7);
  EXPECT_EQ(j["reward"], 1.5);
  EXPECT_EQ(j["done"], false);
}

TEST(Protocol, ActionMessages) {
  EXPECT_EQ(parse_action_message(R"({"type":"action","action":3})"), Action::kMoveSouth);
  EXPECT_EQ(parse_action_message(R"({"type":"action","action":"toggle_w"})"), Action::kToggleWest);
  EXPECT_THROW(parse_action_message(R"({"type":"action","action":9})"), ProtocolError);
  EXPECT_THROW(parse_action_message(R"({"type":"action","action":"fly"})"), ProtocolError);
  EXPECT_THROW(parse_action_message(R"({"type":"move"})"), ProtocolError);
  EXPECT_THROW(parse_action_message("{"), ProtocolError);
}

TEST(Protocol, AgentHelloVersionChecked) {
  EXPECT_NO_THROW(check_agent_hello(R"({"type":"hello","version":1})"));
  EXPECT_THROW(check_agent_hello(R"({"type":"hello","version":2})"), ProtocolError);
  EXPECT_THROW(check_agent_hello(R"({"type":"action"})"), ProtocolError);
}

TEST(ServeStdio, FullConversation) {
  const Level l = gen_level(LevelSpec::benchmark(LevelFamily::kPruneStill, 2));
  EnvConfig cfg;
  cfg.time_limit = 4;
  std::istringstream in(
      "{\"type\":\"hello\",\"version\":1}\n"
      "{\"type\":\"action\",\"action\":0}\n"
      "{\"type\":\"action\",\"action\":\"move_e\"}\n"
      "{\"type\":\"action\",\"action\":2}\n"
      "{\"type\":\"action\",\"action\":7}\n");
  std::ostringstream out;
  const auto records = serve_stdio({l}, cfg, in, out);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].steps, 4u);
  EXPECT_TRUE(records[0].timeout);
  EXPECT_EQ(records[0].actions[3], Action::kToggleSouth);

  const auto lines = lines_of(out.str());
  ASSERT_EQ(lines.size(), 1u + 5u + 2u);
  EXPECT_EQ(nlohmann::json::parse(lines[0])["type"], "hello");
  EXPECT_FALSE(nlohmann::json::parse(lines[1]).contains("done"));
  EXPECT_EQ(nlohmann::json::parse(lines[5])["done"], true);
  EXPECT_EQ(nlohmann::json::parse(lines[6])["type"], "end");
  EXPECT_EQ(nlohmann::json::parse(lines[7])["type"], "bye");
  EXPECT_TRUE(parse_observation_message(lines[5]).same_layout(records[0].final_board));
}

TEST(ServeStdio, AgentHangUpIsProtocolError) {
  const Level l = gen_level(LevelSpec::benchmark(LevelFamily::kPruneStill, 2));
  std::istringstream in("{\"type\":\"hello\",\"version\":1}\n");
  std::ostringstream out;
  EXPECT_THROW(serve_stdio({l}, EnvConfig{}, in, out), ProtocolError);
}

TEST(ExternalPolicy, PlaysAndIsReproducible) {
  const Level l = gen_level(LevelSpec::benchmark(LevelFamily::kPruneStill, 3));
  EnvConfig cfg;
  cfg.time_limit = 200;
  std::vector<Action> first;
  for (int run = 0; run < 2; ++run) {
    ExternalPolicy agent(agent_command(42));
    const EpisodeRecord rec = run_episode(l, cfg, agent);
    agent.finish(rec);
    EXPECT_EQ(rec.actions.size(), rec.steps);
    if (run == 0) {
      first = rec.actions;
    } else {
      EXPECT_EQ(rec.actions, first);
    }
  }
}

TEST(ExternalPolicy, BrokenAgents) {
  EXPECT_THROW(ExternalPolicy("true"), ProtocolError);
  EXPECT_THROW(ExternalPolicy("echo '{\"type\":\"hello\",\"version\":5}'; sleep 1"), ProtocolError);
  EXPECT_THROW(ExternalPolicy("sleep 5", 200), ProtocolError);
}

TEST(ExternalPolicy, BadActionSurfacesAsEpisodeError) {
  const Level l = gen_level(LevelSpec::benchmark(LevelFamily::kPruneStill, 3));
  ExternalPolicy agent(
      R"(read l; echo '{"type":"hello","version":1}'; read l; read l; echo '{"type":"action","action":42}'; sleep 1)");
  try {
    run_episode(l, EnvConfig{}, agent);
    FAIL() << "expected EpisodeError";
  } catch (const EpisodeError& e) {
    EXPECT_EQ(e.partial().steps, 0u);
  }
}

TEST(Benchmark, RowsIndependentOfWorkers) {
  std::vector<Level> levels;
  for (int s = 0; s < 3; ++s) levels.push_back(gen_level(LevelSpec::benchmark(LevelFamily::kPruneStill, s)));
  BenchmarkOptions opts;
  opts.repeats = 2;
  opts.lambdas = {0.0, 0.5};
  opts.samples = 20;
  opts.time_limit = 100;
  opts.workers = 1;
  const BenchmarkReport one = run_benchmark(levels, opts);
  opts.workers = 3;
  const BenchmarkReport three = run_benchmark(levels, opts);
  ASSERT_EQ(one.rows.size(), 12u);
  EXPECT_EQ(one.rows, three.rows);
  EXPECT_EQ(one.rows[0].lambda, 0.0);
  EXPECT_EQ(one.rows[6].lambda, 0.5);
  EXPECT_EQ(one.rows[1].seed, 0u);
  EXPECT_EQ(one.rows[1].repeat, 1);
  EXPECT_EQ(one.rows[2].seed, 1u);
  // Repeats draw different random streams.
  EXPECT_FALSE(one.rows[0] == one.rows[1]);
}

TEST(Benchmark, NoopHasNoGreenEffects) {
  std::vector<Level> levels;
  for (int s = 0; s < 2; ++s) levels.push_back(gen_level(LevelSpec::benchmark(LevelFamily::kAppendStill, s)));
  BenchmarkOptions opts;
  opts.policy = "noop";
  opts.repeats = 1;
  opts.samples = 10;
  const BenchmarkReport rep = run_benchmark(levels, opts);
  for (const auto& r : rep.rows) {
    EXPECT_EQ(r.side_effects.green.raw, 0.0);
    EXPECT_EQ(r.performance, 0.0);
    EXPECT_EQ(r.length, 1000u);
  }
}

TEST(Benchmark, ExternalAgent) {
  std::vector<Level> levels = {gen_level(LevelSpec::benchmark(LevelFamily::kPruneStill, 1))};
  BenchmarkOptions opts;
  opts.policy = "external";
  opts.agent_command = agent_command(1);
  opts.repeats = 2;
  opts.samples = 10;
  opts.time_limit = 50;
  opts.workers = 2;
  const BenchmarkReport rep = run_benchmark(levels, opts);
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_EQ(rep.rows[0].length, 50u);
}

TEST(Benchmark, BadOptions) {
  BenchmarkOptions opts;
  opts.policy = "clever";
  EXPECT_THROW(make_policy(opts, 0), UsageError);
  opts.policy = "external";
  EXPECT_THROW(make_policy(opts, 0), UsageError);
}

TEST(Throughput, CountsSteps) {
  const Level l = gen_level(LevelSpec::benchmark(LevelFamily::kPruneSpawn, 0));
  const PerfResult r = measure_throughput(l, 5000);
  EXPECT_EQ(r.steps, 5000u);
  EXPECT_GT(r.rate(), 0.0);
}
