#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "safelife/harness.hpp"
#include "safelife/play/server.hpp"
#include "safelife/protocol.hpp"
#include "safelife/render.hpp"

using namespace safelife;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kIo = 3, kGeneration = 4, kProtocol = 5 };

std::string default_suite_dir() {
  const char* env = std::getenv("SAFELIFE_SUITE_DIR");
  return env ? env : "suites";
}

LevelFamily parse_family(const std::string& name) {
  const auto f = family_from_name(name);
  if (!f) throw UsageError("unknown family: " + name);
  return *f;
}

// A level given either as a file or as family + seed.
struct LevelRef {
  std::string file;
  std::string family = "prune-still";
  std::uint64_t seed = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--level", file, "Level file (overrides --family/--seed)");
    cmd->add_option("--family", family, "Level family")->capture_default_str();
    cmd->add_option("--seed", seed, "Level seed")->capture_default_str();
  }

  [[nodiscard]] Level load() const {
    if (!file.empty()) return load_level(file);
    return gen_level(LevelSpec::benchmark(parse_family(family), seed));
  }
};

fs::path manifest_path(const std::string& suite) {
  const fs::path p(suite);
  return fs::is_directory(p) ? p / "manifest.json" : p;
}

std::string read_text(const fs::path& p) {
  const auto bytes = read_file(p);
  return {bytes.begin(), bytes.end()};
}

void write_text(const fs::path& p, const std::string& text) {
  write_file(p, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

json record_json(const EpisodeRecord& r) {
  double total = 0.0;
  for (double x : r.rewards) total += x;
  return {{"family", family_name(r.family)},   {"seed", r.level_seed},
          {"steps", r.steps},                  {"exited", r.exited},
          {"timeout", r.timeout},              {"performance", r.performance},
          {"total_reward", total},             {"cumulative_penalty", r.cumulative_penalty},
          {"final_board_hash", hex64(r.final_board.hash())}};
}

json score_json(const SideEffectScore& s) {
  return {{"green", {{"raw", s.green.raw}, {"normalized", s.green.normalized}}},
          {"yellow", {{"raw", s.yellow.raw}, {"normalized", s.yellow.normalized}}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SafeLife: side-effect benchmark environment"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "Machine-readable output");

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a benchmark suite");
  std::string gen_family = "prune-still";
  int gen_count = 100;
  std::uint64_t gen_first = 0;
  std::string gen_out;
  gen->add_option("--family", gen_family, "Level family")->capture_default_str();
  gen->add_option("--count", gen_count, "Number of levels")->capture_default_str();
  gen->add_option("--first-seed", gen_first, "First seed; seeds are consecutive")->capture_default_str();
  gen->add_option("--out", gen_out, "Output directory (default $SAFELIFE_SUITE_DIR/<family>)");

  // verify
  auto* ver = app.add_subcommand("verify", "Regenerate a suite and compare with its manifest");
  std::string ver_suite;
  ver->add_option("--suite", ver_suite, "Suite directory or manifest")->required();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Play one episode");
  LevelRef sim_level;
  sim_level.add_to(sim);
  std::string sim_policy = "random";
  std::string sim_agent;
  std::uint64_t sim_policy_seed = 0;
  double sim_lambda = 0.0;
  int sim_time_limit = 0;
  std::string sim_log;
  sim->add_option("--policy", sim_policy, "noop, random, greedy or external")->capture_default_str();
  sim->add_option("--agent", sim_agent, "Agent command for the external policy");
  sim->add_option("--policy-seed", sim_policy_seed, "Random policy seed")->capture_default_str();
  sim->add_option("--lambda", sim_lambda, "Impact penalty")->capture_default_str();
  sim->add_option("--time-limit", sim_time_limit, "Step limit (0 = level default)")->capture_default_str();
  sim->add_option("--log", sim_log, "Write the episode log here");

  // replay
  auto* rep = app.add_subcommand("replay", "Replay an episode log and check its final board");
  LevelRef rep_level;
  rep_level.add_to(rep);
  std::string rep_log;
  double rep_lambda = 0.0;
  rep->add_option("--log", rep_log, "Episode log")->required();
  rep->add_option("--lambda", rep_lambda, "Impact penalty used when recording")->capture_default_str();

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Run a policy over a suite and score it");
  std::string bench_suite;
  BenchmarkOptions bopts;
  std::string bench_out;
  bench->add_option("--suite", bench_suite, "Suite directory or manifest (default $SAFELIFE_SUITE_DIR/prune-still)");
  bench->add_option("--policy", bopts.policy, "noop, random, greedy or external")->capture_default_str();
  bench->add_option("--agent", bopts.agent_command, "Agent command for the external policy");
  bench->add_option("--repeats", bopts.repeats, "Episodes per level")->capture_default_str();
  bench->add_option("--lambda", bopts.lambdas, "Impact penalties (repeatable)")->capture_default_str();
  bench->add_option("--samples", bopts.samples, "Samples per side-effect distribution")->capture_default_str();
  bench->add_option("--workers", bopts.workers, "Worker threads (0 = all cores)")->capture_default_str();
  bench->add_option("--policy-seed", bopts.policy_seed, "Random policy seed")->capture_default_str();
  bench->add_option("--out", bench_out, "Write the JSON report here");

  // score
  auto* score = app.add_subcommand("score", "Side-effect score of an episode");
  LevelRef score_level;
  score_level.add_to(score);
  std::string score_log;
  int score_samples = 1000;
  double score_lambda = 0.0;
  bool score_keys = false;
  score->add_option("--log", score_log, "Episode log to score (default: a noop episode)");
  score->add_option("--samples", score_samples, "Samples per distribution")->capture_default_str();
  score->add_option("--lambda", score_lambda, "Impact penalty used when recording")->capture_default_str();
  score->add_flag("--by-key", score_keys, "Also report the deviation of every cell type");

  // render
  auto* ren = app.add_subcommand("render", "Print ASCII frames");
  LevelRef ren_level;
  ren_level.add_to(ren);
  std::string ren_log;
  int ren_steps = 0;
  bool ren_ansi = false;
  ren->add_option("--log", ren_log, "Episode log whose actions drive the agent");
  ren->add_option("--steps", ren_steps, "Frames after the first (noop actions without a log)")->capture_default_str();
  ren->add_flag("--ansi", ren_ansi, "Colored output");

  // perf
  auto* perf = app.add_subcommand("perf", "Measure env step + observe throughput");
  int perf_size = 26;
  double perf_steps = 1e6;
  std::string perf_family = "prune-spawn";
  perf->add_option("--size", perf_size, "Board side")->capture_default_str();
  perf->add_option("--steps", perf_steps, "Steps to run")->capture_default_str();
  perf->add_option("--family", perf_family, "Level family")->capture_default_str();

  // serve
  auto* serve = app.add_subcommand("serve", "Run the play service");
  std::string serve_address = "127.0.0.1";
  std::uint16_t serve_port = 8765;
  std::string serve_levels;
  serve->add_option("--address", serve_address, "Bind address")->capture_default_str();
  serve->add_option("--port", serve_port, "TCP port")->capture_default_str();
  serve->add_option("--levels", serve_levels, "Suite directory offered by name");

  // stdio
  auto* stdio = app.add_subcommand("stdio", "Act as the environment for an agent on stdin/stdout");
  LevelRef stdio_level;
  stdio_level.add_to(stdio);
  std::string stdio_suite;
  double stdio_lambda = 0.0;
  stdio->add_option("--suite", stdio_suite, "Play every level of this suite instead");
  stdio->add_option("--lambda", stdio_lambda, "Impact penalty")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) {
      if (gen_count < 1) throw UsageError("count must be at least 1");
      const LevelFamily family = parse_family(gen_family);
      const fs::path out = gen_out.empty() ? fs::path(default_suite_dir()) / gen_family : fs::path(gen_out);
      std::vector<std::uint64_t> seeds;
      for (int i = 0; i < gen_count; ++i) seeds.push_back(gen_first + static_cast<std::uint64_t>(i));
      const SuiteManifest m = generate_suite(family, seeds, out);
      if (as_json) {
        std::cout << json{{"dir", out.string()}, {"levels", m.levels.size()}}.dump() << "\n";
      } else {
        std::cout << "wrote " << m.levels.size() << " levels to " << out.string() << "\n";
      }
    } else if (*ver) {
      const SuiteManifest m = read_manifest(manifest_path(ver_suite));
      const auto bad = verify_suite(m);
      if (as_json) {
        std::cout << json{{"levels", m.levels.size()}, {"mismatched", bad}}.dump() << "\n";
      } else {
        std::cout << m.levels.size() - bad.size() << "/" << m.levels.size() << " levels reproduce\n";
      }
      if (!bad.empty()) return kGeneration;
    } else if (*sim) {
      const Level level = sim_level.load();
      BenchmarkOptions o;
      o.policy = sim_policy;
      o.agent_command = sim_agent;
      o.policy_seed = sim_policy_seed;
      auto policy = make_policy(o, level.seed * 1000003ULL);
      EnvConfig cfg;
      cfg.impact_penalty = sim_lambda;
      if (sim_time_limit > 0) cfg.time_limit = sim_time_limit;
      const EpisodeRecord rec = run_episode(level, cfg, *policy);
      if (auto* ext = dynamic_cast<ExternalPolicy*>(policy.get())) ext->finish(rec);
      if (!sim_log.empty()) write_text(sim_log, encode_episode(to_log(rec)) + "\n");
      if (as_json) {
        std::cout << record_json(rec).dump() << "\n";
      } else {
        std::cout << family_name(rec.family) << " seed " << rec.level_seed << ": " << rec.steps
                  << " steps, performance " << rec.performance << (rec.exited ? ", exited" : "")
                  << (rec.timeout ? ", timed out" : "") << "\n";
      }
    } else if (*rep) {
      const Level level = rep_level.load();
      const EpisodeLog log = decode_episode(read_text(rep_log));
      if (log.level_hash != level.board.hash()) throw StoreError("log was recorded on a different level");
      EnvConfig cfg;
      cfg.impact_penalty = rep_lambda;
      const Board final_board = replay(level, cfg, log.actions);
      const bool match = final_board.hash() == log.final_board_hash;
      if (as_json) {
        std::cout << json{{"match", match}, {"final_board_hash", hex64(final_board.hash())}}.dump() << "\n";
      } else {
        std::cout << (match ? "final board matches" : "final board differs") << "\n";
      }
      if (!match) return kIo;
    } else if (*bench) {
      const fs::path manifest =
          manifest_path(bench_suite.empty() ? (fs::path(default_suite_dir()) / "prune-still").string() : bench_suite);
      const std::vector<Level> levels = load_suite(manifest);
      const BenchmarkReport report = run_benchmark(levels, bopts);
      if (!bench_out.empty()) write_report(bench_out, report);
      if (as_json) {
        std::cout << encode_report(report);
      } else {
        std::cout << format_report_table(report);
      }
    } else if (*score) {
      if (score_samples < 1) throw UsageError("samples must be at least 1");
      const Level level = score_level.load();
      Board final_board;
      if (score_log.empty()) {
        NoopPolicy noop;
        final_board = run_episode(level, EnvConfig{}, noop).final_board;
      } else {
        const EpisodeLog log = decode_episode(read_text(score_log));
        EnvConfig cfg;
        cfg.impact_penalty = score_lambda;
        final_board = replay(level, cfg, log.actions);
      }
      const DensityMap inaction = sample_inaction_distribution(level, final_board.step_count(), score_samples);
      const DensityMap action = sample_action_distribution(final_board, score_samples);
      const SideEffectScore s = side_effect_score(level, action, inaction);
      json out = score_json(s);
      out["samples"] = score_samples;
      out["steps"] = final_board.step_count();
      if (score_keys) {
        json keys = json::array();
        for (const KeyedDeviation& k : deviation_by_key(action, inaction)) {
          keys.push_back({{"kind", kind_name(k.key.kind)}, {"color", k.key.color}, {"emd", k.emd}});
        }
        out["by_key"] = keys;
      }
      if (as_json) {
        std::cout << out.dump() << "\n";
      } else {
        std::cout << "green  raw " << s.green.raw << "  normalized " << s.green.normalized << "\n"
                  << "yellow raw " << s.yellow.raw << "  normalized " << s.yellow.normalized << "\n";
        if (score_keys) {
          for (const json& k : out["by_key"]) {
            std::cout << "  " << k["kind"].get<std::string>() << " color " << k["color"] << ": " << k["emd"] << "\n";
          }
        }
      }
    } else if (*ren) {
      if (ren_steps < 0) throw UsageError("steps must be non-negative");
      const Level level = ren_level.load();
      std::vector<Action> actions(static_cast<std::size_t>(ren_steps), Action::kNoop);
      if (!ren_log.empty()) actions = decode_episode(read_text(ren_log)).actions;
      Environment env;
      env.reset(level);
      std::cout << "step 0\n" << render_ascii(env.board(), ren_ansi);
      double reward = 0.0;
      bool done = false;
      for (Action a : actions) {
        if (done) break;
        env.step_info(a, reward, done);
        std::cout << "\nstep " << env.steps() << " " << action_name(a) << "\n"
                  << render_ascii(env.board(), ren_ansi);
      }
    } else if (*perf) {
      if (perf_steps < 1) throw UsageError("steps must be at least 1");
      LevelSpec spec = LevelSpec::benchmark(parse_family(perf_family), 0);
      spec.width = spec.height = perf_size;
      const Level level = gen_level(spec);
      const PerfResult r = measure_throughput(level, static_cast<std::uint64_t>(perf_steps));
      if (as_json) {
        std::cout << json{{"family", perf_family},
                          {"size", perf_size},
                          {"steps", r.steps},
                          {"seconds", r.seconds},
                          {"steps_per_second", r.rate()}}
                         .dump()
                  << "\n";
      } else {
        std::cout << r.steps << " steps in " << r.seconds << " s: " << static_cast<long long>(r.rate())
                  << " steps/s\n";
      }
    } else if (*serve) {
      std::vector<play::NamedLevel> named;
      if (!serve_levels.empty()) named = play::load_named_levels(serve_levels);
      play::SessionManager manager(std::move(named), std::random_device{}());
      play::Server server(manager, serve_address, serve_port);
      std::cerr << "listening on " << serve_address << ":" << server.port() << "\n";
      server.run();
    } else if (*stdio) {
      std::vector<Level> levels;
      if (!stdio_suite.empty()) {
        levels = load_suite(manifest_path(stdio_suite));
      } else {
        levels.push_back(stdio_level.load());
      }
      EnvConfig cfg;
      cfg.impact_penalty = stdio_lambda;
      serve_stdio(levels, cfg, std::cin, std::cout);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const GenerationError& e) {
    std::cerr << "generation failed: " << e.what() << "\n";
    return kGeneration;
  } catch (const ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return kProtocol;
  } catch (const EpisodeError& e) {
    std::cerr << "episode failed: " << e.what() << "\n";
    return kProtocol;
  } catch (const StoreError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
