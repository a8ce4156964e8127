#include "safelife/protocol.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace safelife {

using nlohmann::json;

namespace {

json parse(const std::string& line) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed message: ") + e.what());
  }
}

json pos_json(const std::optional<Pos>& p) {
  return p ? json::array({p->x, p->y}) : json(nullptr);
}

std::optional<Pos> pos_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return Pos{j.at(0).get<int>(), j.at(1).get<int>()};
}

}  // namespace

std::string hello_message() {
  json actions = json::array();
  for (int i = 0; i < kNumActions; ++i) actions.push_back(action_name(static_cast<Action>(i)));
  return json{{"type", "hello"},
              {"protocol", kProtocolName},
              {"version", kProtocolVersion},
              {"observation_version", kObservationVersion},
              {"actions", actions}}
      .dump();
}

std::string observation_message(const Board& board, std::uint64_t step,
                                std::optional<double> reward, std::optional<bool> done) {
  std::vector<int> cells;
  std::vector<int> goals;
  cells.reserve(board.size());
  goals.reserve(board.size());
  for (const Cell& c : board.cells()) cells.push_back(c.pack());
  for (Goal g : board.goals()) goals.push_back(static_cast<int>(g));
  json j{{"type", "observation"},
         {"step", step},
         {"width", board.width()},
         {"height", board.height()},
         {"cells", cells},
         {"goals", goals},
         {"agent", pos_json(board.agent())},
         {"exit", pos_json(board.exit())}};
  if (reward) j["reward"] = *reward;
  if (done) j["done"] = *done;
  return j.dump();
}

std::string end_message(const EpisodeRecord& r) {
  return json{{"type", "end"},
              {"steps", r.steps},
              {"exited", r.exited},
              {"timeout", r.timeout},
              {"performance", r.performance}}
      .dump();
}

std::string bye_message() { return json{{"type", "bye"}}.dump(); }

void check_agent_hello(const std::string& line) {
  const json j = parse(line);
  if (j.value("type", "") != "hello") throw ProtocolError("expected hello from agent");
  if (j.value("version", -1) != kProtocolVersion) {
    throw ProtocolError("agent speaks an unsupported protocol version");
  }
}

Action parse_action_message(const std::string& line) {
  const json j = parse(line);
  if (j.value("type", "") != "action" || !j.contains("action")) {
    throw ProtocolError("expected an action message");
  }
  const json& a = j["action"];
  std::optional<Action> action;
  if (a.is_number_integer()) action = action_from_index(a.get<int>());
  if (a.is_string()) action = action_from_name(a.get<std::string>());
  if (!action) throw ProtocolError("unknown action: " + a.dump());
  return *action;
}

Board parse_observation_message(const std::string& line) {
  const json j = parse(line);
  if (j.value("type", "") != "observation") throw ProtocolError("expected an observation");
  try {
    Board b(j.at("width").get<int>(), j.at("height").get<int>());
    const auto& cells = j.at("cells");
    const auto& goals = j.at("goals");
    if (cells.size() != static_cast<std::size_t>(b.size()) ||
        goals.size() != static_cast<std::size_t>(b.size())) {
      throw ProtocolError("observation grid has the wrong size");
    }
    for (int i = 0; i < b.size(); ++i) {
      if (!Cell::unpack(cells[i].get<std::uint8_t>(), b.cells()[i])) {
        throw ProtocolError("invalid cell byte in observation");
      }
      b.goals()[i] = static_cast<Goal>(goals[i].get<int>());
    }
    b.set_agent(pos_from(j.at("agent")));
    if (auto e = pos_from(j.at("exit"))) b.set_exit(*e);
    return b;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed observation: ") + e.what());
  }
}

ExternalPolicy::ExternalPolicy(const std::string& command, int timeout_ms)
    : timeout_ms_(timeout_ms) {
  int in_pipe[2];
  int out_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) != 0) throw ProtocolError("pipe failed");
  if (pipe2(out_pipe, O_CLOEXEC) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw ProtocolError("pipe failed");
  }
  signal(SIGPIPE, SIG_IGN);
  pid_ = fork();
  if (pid_ < 0) throw ProtocolError("fork failed");
  if (pid_ == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  try {
    send(hello_message());
    check_agent_hello(receive());
  } catch (...) {
    shutdown();
    throw;
  }
}

ExternalPolicy::~ExternalPolicy() { shutdown(); }

void ExternalPolicy::shutdown() {
  if (to_child_ >= 0) {
    const std::string bye = bye_message() + "\n";
    [[maybe_unused]] auto n = write(to_child_, bye.data(), bye.size());
    close(to_child_);
    to_child_ = -1;
  }
  if (from_child_ >= 0) {
    close(from_child_);
    from_child_ = -1;
  }
  if (pid_ > 0) {
    int status = 0;
    for (int i = 0; i < 50; ++i) {
      if (waitpid(pid_, &status, WNOHANG) != 0) {
        pid_ = -1;
        return;
      }
      usleep(10000);
    }
    kill(pid_, SIGKILL);
    waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

void ExternalPolicy::send(const std::string& line) {
  const std::string msg = line + "\n";
  std::size_t done = 0;
  while (done < msg.size()) {
    const ssize_t n = write(to_child_, msg.data() + done, msg.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("agent pipe closed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

std::string ExternalPolicy::receive() {
  while (true) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    pollfd p{from_child_, POLLIN, 0};
    const int ready = poll(&p, 1, timeout_ms_);
    if (ready == 0) throw ProtocolError("agent timed out");
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError("poll failed");
    }
    char chunk[4096];
    const ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw ProtocolError("agent closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void ExternalPolicy::begin(const Level&) { step_ = 0; }

Action ExternalPolicy::act(const Observation&, const Board& board) {
  send(observation_message(board, step_++));
  return parse_action_message(receive());
}

void ExternalPolicy::finish(const EpisodeRecord& record) { send(end_message(record)); }

std::vector<EpisodeRecord> serve_stdio(const std::vector<Level>& levels, const EnvConfig& config,
                                       std::istream& in, std::ostream& out) {
  const auto read_line = [&in] {
    std::string line;
    if (!std::getline(in, line)) throw ProtocolError("agent closed its output");
    return line;
  };
  out << hello_message() << '\n' << std::flush;
  check_agent_hello(read_line());

  std::vector<EpisodeRecord> records;
  EnvConfig cfg = config;
  cfg.continuing = false;
  for (const Level& level : levels) {
    Environment env(cfg);
    env.reset(level);
    EpisodeRecord rec;
    rec.family = level.family;
    rec.level_seed = level.seed;
    rec.level_hash = level.board.hash();
    double reward = 0.0;
    bool done = false;
    out << observation_message(env.board(), 0) << '\n' << std::flush;
    while (!done) {
      const Action a = parse_action_message(read_line());
      const StepInfo info = env.step_info(a, reward, done);
      rec.actions.push_back(a);
      rec.rewards.push_back(reward);
      rec.exited = info.exited;
      rec.timeout = info.timeout;
      out << observation_message(env.board(), env.steps(), reward, done) << '\n' << std::flush;
    }
    rec.final_board = env.board();
    rec.steps = env.steps();
    rec.performance = env.performance();
    rec.cumulative_penalty = env.cumulative_penalty();
    out << end_message(rec) << '\n' << std::flush;
    records.push_back(std::move(rec));
  }
  out << bye_message() << '\n' << std::flush;
  return records;
}

}  // namespace safelife
