#include "safelife/play/session.hpp"

#include <array>

#include "safelife/level.hpp"
#include "safelife/store.hpp"

namespace safelife::play {

namespace {

json pos_json(const std::optional<Pos>& p) {
  return p ? json::array({p->x, p->y}) : json(nullptr);
}

std::optional<Pos> pos_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return Pos{j.at(0).get<int>(), j.at(1).get<int>()};
}

Status status_from(const std::string& s) {
  if (s == "won") return Status::kWon;
  if (s == "timeout") return Status::kTimeout;
  return Status::kActive;
}

json channel_json(const ChannelScore& c) { return {{"raw", c.raw}, {"normalized", c.normalized}}; }

}  // namespace

std::string_view status_name(Status s) {
  switch (s) {
    case Status::kActive: return "active";
    case Status::kWon: return "won";
    case Status::kTimeout: return "timeout";
  }
  return "active";
}

json error_message(std::string_view code, std::string_view message) {
  return {{"type", "error"}, {"code", code}, {"message", message}};
}

Session::Session(std::string id, Level level) : id_(std::move(id)), level_(std::move(level)) {
  env_.reset(level_);
}

json Session::common_fields() const {
  return {{"session", id_},
          {"step", env_.steps()},
          {"agent", pos_json(env_.board().agent())},
          {"reward", last_reward_},
          {"total_reward", total_reward_},
          {"performance", env_.performance()},
          {"min_performance", level_.params.min_performance},
          {"cumulative_penalty", env_.cumulative_penalty()},
          {"time_limit", env_.time_limit()},
          {"status", status_name(status_)}};
}

json Session::full_frame() const {
  const Board& b = env_.board();
  json j = common_fields();
  j["type"] = "state-full";
  j["family"] = family_name(level_.family);
  j["seed"] = level_.seed;
  j["width"] = b.width();
  j["height"] = b.height();
  j["exit"] = pos_json(b.exit());
  std::vector<int> cells;
  std::vector<int> goals;
  for (const Cell& c : b.cells()) cells.push_back(c.pack());
  for (Goal g : b.goals()) goals.push_back(static_cast<int>(g));
  j["cells"] = std::move(cells);
  j["goals"] = std::move(goals);
  return j;
}

std::vector<json> Session::act(Action action) {
  const Board before = env_.board();
  bool done = false;
  const StepInfo info = env_.step_info(action, last_reward_, done);
  total_reward_ += last_reward_;
  actions_.push_back(action);
  if (done) status_ = info.exited ? Status::kWon : Status::kTimeout;

  std::vector<json> out;
  if (done || env_.steps() % kFullFrameInterval == 0) {
    out.push_back(full_frame());
  } else {
    const Board& after = env_.board();
    json changes = json::array();
    for (int i = 0; i < after.size(); ++i) {
      if (before.cells()[i] != after.cells()[i]) {
        changes.push_back(json::array({i, after.cells()[i].pack()}));
      }
    }
    json j = common_fields();
    j["type"] = "state-delta";
    j["changes"] = std::move(changes);
    out.push_back(std::move(j));
  }
  if (done) out.push_back(score(kFinalSamples, false));
  return out;
}

json Session::score(int samples, bool approximate) const {
  const SideEffectScore s = side_effect_score(level_, env_.board(), samples);
  return {{"type", "score"},
          {"session", id_},
          {"step", env_.steps()},
          {"samples", samples},
          {"approximate", approximate},
          {"green", channel_json(s.green)},
          {"yellow", channel_json(s.yellow)}};
}

SessionManager::SessionManager(std::vector<NamedLevel> levels, std::uint64_t id_seed)
    : levels_(std::move(levels)), id_rng_(id_seed) {}

std::string SessionManager::next_id() { return "s-" + hex64(id_rng_.next()); }

json SessionManager::level_list() const {
  json families = json::array();
  for (int f = 0; f <= static_cast<int>(LevelFamily::kNavigation); ++f) {
    families.push_back(family_name(static_cast<LevelFamily>(f)));
  }
  json named = json::array();
  for (const NamedLevel& l : levels_) {
    named.push_back({{"name", l.name},
                     {"family", family_name(l.level.family)},
                     {"seed", l.level.seed}});
  }
  return {{"families", families}, {"levels", named}};
}

std::shared_ptr<Session> SessionManager::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::size_t SessionManager::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

std::vector<json> SessionManager::handle_text(const std::string& text) {
  json msg;
  try {
    msg = json::parse(text);
  } catch (const json::exception&) {
    return {error_message("malformed", "message is not valid JSON")};
  }
  return handle(msg);
}

std::vector<json> SessionManager::handle(const json& message) {
  try {
    if (!message.is_object() || !message.contains("type") || !message["type"].is_string()) {
      return {error_message("malformed", "message needs a string type")};
    }
    const std::string type = message["type"];
    if (type == "hello") {
      if (message.value("version", kPlayProtocolVersion) != kPlayProtocolVersion) {
        return {error_message("unsupported-version", "server speaks protocol version 1")};
      }
      return {{{"type", "hello"},
               {"server", "safelife-play"},
               {"version", kPlayProtocolVersion},
               {"full_frame_interval", kFullFrameInterval},
               {"preview_samples", kPreviewSamples},
               {"final_samples", kFinalSamples}}};
    }
    if (type == "create") return create(message);
    if (type == "action" || type == "resync" || type == "preview" || type == "close") {
      return on_session(message);
    }
    return {error_message("malformed", "unknown message type: " + type)};
  } catch (const json::exception& e) {
    return {error_message("malformed", e.what())};
  }
}

Level SessionManager::resolve(const json& message) const {
  if (message.contains("level")) {
    const std::string name = message["level"].get<std::string>();
    for (const NamedLevel& l : levels_) {
      if (l.name == name) return l.level;
    }
    throw std::out_of_range("unknown level: " + name);
  }
  const auto family = family_from_name(message.at("family").get<std::string>());
  if (!family) throw std::out_of_range("unknown family: " + message["family"].get<std::string>());
  const auto seed = message.value("seed", std::uint64_t{0});
  return gen_level(LevelSpec::benchmark(*family, seed));
}

std::vector<json> SessionManager::create(const json& message) {
  Level level;
  try {
    level = resolve(message);
  } catch (const std::out_of_range& e) {
    return {error_message("unknown-level", e.what())};
  } catch (const GenerationError& e) {
    return {error_message("unknown-level", e.what())};
  }
  std::shared_ptr<Session> session;
  {
    std::lock_guard lock(mutex_);
    std::string id = next_id();
    session = std::make_shared<Session>(id, std::move(level));
    sessions_.emplace(std::move(id), session);
  }
  std::lock_guard lock(session->mutex);
  return {session->full_frame()};
}

std::vector<json> SessionManager::on_session(const json& message) {
  const std::string type = message["type"];
  if (!message.contains("session") || !message["session"].is_string()) {
    return {error_message("malformed", "message needs a session id")};
  }
  const std::string id = message["session"];
  std::shared_ptr<Session> session = find(id);
  if (!session) return {error_message("unknown-session", "no session " + id)};

  if (type == "close") {
    std::lock_guard lock(mutex_);
    sessions_.erase(id);
    return {{{"type", "closed"}, {"session", id}}};
  }

  std::lock_guard lock(session->mutex);
  if (type == "resync") return {session->full_frame()};
  if (type == "preview") {
    if (session->status() != Status::kActive) {
      return {error_message("stale-session", "session " + id + " has ended")};
    }
    return {session->score(kPreviewSamples, true)};
  }

  // action
  if (session->status() != Status::kActive) {
    return {error_message("stale-session", "session " + id + " has ended")};
  }
  if (!message.contains("action")) return {error_message("malformed", "action message without action")};
  const json& a = message["action"];
  std::optional<Action> action;
  if (a.is_number_integer()) action = action_from_index(a.get<int>());
  if (a.is_string()) action = action_from_name(a.get<std::string>());
  if (!action) return {error_message("malformed", "unknown action: " + a.dump())};
  return session->act(*action);
}

void ClientModel::apply(const json& frame) {
  const std::string type = frame.at("type");
  if (type == "state-full") {
    Board b(frame.at("width").get<int>(), frame.at("height").get<int>());
    const auto& cells = frame.at("cells");
    const auto& goals = frame.at("goals");
    for (int i = 0; i < b.size(); ++i) {
      if (!Cell::unpack(cells.at(i).get<std::uint8_t>(), b.cells()[i])) {
        throw std::runtime_error("invalid cell byte in frame");
      }
      b.goals()[i] = static_cast<Goal>(goals.at(i).get<int>());
    }
    b.set_agent(pos_from(frame.at("agent")));
    if (auto e = pos_from(frame.at("exit"))) b.set_exit(*e);
    board_ = std::move(b);
    ready_ = true;
  } else if (type == "state-delta") {
    if (!ready_) throw std::runtime_error("delta before any full frame");
    if (frame.at("step").get<std::uint64_t>() != step_ + 1) {
      throw std::runtime_error("delta out of order; resync needed");
    }
    for (const json& c : frame.at("changes")) {
      if (!Cell::unpack(c.at(1).get<std::uint8_t>(), board_.cells()[c.at(0).get<int>()])) {
        throw std::runtime_error("invalid cell byte in delta");
      }
    }
    board_.set_agent(pos_from(frame.at("agent")));
  } else {
    return;
  }
  step_ = frame.at("step").get<std::uint64_t>();
  status_ = status_from(frame.at("status").get<std::string>());
}

std::vector<NamedLevel> load_named_levels(const std::filesystem::path& dir) {
  const SuiteManifest m = read_manifest(dir / "manifest.json");
  const std::vector<Level> levels = load_suite(dir / "manifest.json");
  std::vector<NamedLevel> out;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    out.push_back({std::string(family_name(m.family)) + "-" + std::to_string(m.levels[i].seed),
                   levels[i]});
  }
  return out;
}

}  // namespace safelife::play
