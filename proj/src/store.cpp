#include "safelife/store.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "json.hpp"

namespace safelife {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'S', 'L', 'V', 'L'};
constexpr std::uint16_t kAbsent = 0xFFFF;

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  std::vector<std::uint8_t>& data() { return out_; }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  [[nodiscard]] std::size_t pos() const { return pos_; }
  [[nodiscard]] std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw CorruptFileError("level file truncated");
  }
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void put_pos(Writer& w, const std::optional<Pos>& p) {
  w.u16(p ? static_cast<std::uint16_t>(p->x) : kAbsent);
  w.u16(p ? static_cast<std::uint16_t>(p->y) : kAbsent);
}

std::optional<Pos> get_pos(Reader& r, int width, int height) {
  const std::uint16_t x = r.u16();
  const std::uint16_t y = r.u16();
  if (x == kAbsent && y == kAbsent) return std::nullopt;
  if (x >= width || y >= height) throw CorruptFileError("position outside the board");
  return Pos{x, y};
}

std::uint64_t parse_hex(const std::string& s) {
  std::size_t used = 0;
  const std::uint64_t v = std::stoull(s, &used, 16);
  if (used != s.size()) throw SchemaError("bad hex value: " + s);
  return v;
}

}  // namespace

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::vector<std::uint8_t> encode_level(const Level& level) {
  const Board& b = level.board;
  if (b.width() > kMaxBoardSide || b.height() > kMaxBoardSide) {
    throw DimensionError("board too large to store");
  }
  if (b.rng() != Rng(b.rng().seed())) {
    throw std::invalid_argument("only boards with a freshly seeded RNG can be stored");
  }
  Writer w;
  w.bytes(kMagic, 4);
  w.u16(kLevelFormatVersion);
  w.u16(static_cast<std::uint16_t>(b.width()));
  w.u16(static_cast<std::uint16_t>(b.height()));
  w.u8(static_cast<std::uint8_t>(level.family));
  w.u64(level.seed);
  w.u32(level.generator_version);
  put_pos(w, b.agent());
  put_pos(w, b.exit());
  w.f64(level.params.min_performance);
  w.u32(static_cast<std::uint32_t>(level.params.time_limit));
  w.f64(b.spawn_probability());
  w.u64(b.step_count());
  w.u8(static_cast<std::uint8_t>(kRngAlgorithm.size()));
  w.bytes(kRngAlgorithm.data(), kRngAlgorithm.size());
  w.u64(b.rng().seed());
  for (const Cell& c : b.cells()) w.u8(c.pack());
  for (Goal g : b.goals()) w.u8(static_cast<std::uint8_t>(g));
  const std::uint64_t sum = fnv1a64(w.data().data(), w.data().size());
  w.u64(sum);
  return std::move(w.data());
}

Level decode_level(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.bytes(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw CorruptFileError("not a level file");
  const std::uint16_t version = r.u16();
  if (version != kLevelFormatVersion) {
    throw VersionError("unsupported level format version " + std::to_string(version));
  }
  if (bytes.size() < 8 || fnv1a64(bytes.data(), bytes.size() - 8) !=
                              Reader(bytes.subspan(bytes.size() - 8)).u64()) {
    throw CorruptFileError("level file checksum mismatch");
  }
  const int width = r.u16();
  const int height = r.u16();
  if (width == 0 || height == 0 || width > kMaxBoardSide || height > kMaxBoardSide) {
    throw DimensionError("level dimensions out of range");
  }
  Level level;
  const std::uint8_t family = r.u8();
  if (family > static_cast<std::uint8_t>(LevelFamily::kNavigation)) {
    throw CorruptFileError("unknown level family");
  }
  level.family = static_cast<LevelFamily>(family);
  level.seed = r.u64();
  level.generator_version = r.u32();
  const auto agent = get_pos(r, width, height);
  const auto exit = get_pos(r, width, height);
  level.params.min_performance = r.f64();
  level.params.time_limit = static_cast<int>(r.u32());
  const double spawn = r.f64();
  const std::uint64_t steps = r.u64();
  const auto name = r.bytes(r.u8());
  if (std::string_view(reinterpret_cast<const char*>(name.data()), name.size()) != kRngAlgorithm) {
    throw VersionError("level file uses an unsupported RNG");
  }
  const std::uint64_t rng_seed = r.u64();

  Board b(width, height, rng_seed);
  const auto cells = r.bytes(static_cast<std::size_t>(width) * height);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!Cell::unpack(cells[i], b.cells()[i])) throw CorruptFileError("invalid cell byte");
  }
  const auto goals = r.bytes(static_cast<std::size_t>(width) * height);
  for (std::size_t i = 0; i < goals.size(); ++i) {
    if (goals[i] > static_cast<std::uint8_t>(Goal::kRedMarker)) {
      throw CorruptFileError("invalid goal byte");
    }
    b.goals()[i] = static_cast<Goal>(goals[i]);
  }
  if (r.remaining() != 8) throw CorruptFileError("unexpected trailing data in level file");
  b.set_agent(agent);
  if (exit) {
    if (b.at(*exit).kind != CellKind::kExit) throw CorruptFileError("exit cell mismatch");
    b.set_exit(exit);
  }
  b.set_spawn_probability(spawn);
  b.set_step_count(steps);
  level.board = std::move(b);
  return level;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StoreError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw StoreError("write failed for " + path.string());
}

void save_level(const std::filesystem::path& path, const Level& level) {
  write_file(path, encode_level(level));
}

Level load_level(const std::filesystem::path& path) { return decode_level(read_file(path)); }

std::string level_file_name(LevelFamily family, std::uint64_t seed) {
  std::ostringstream os;
  os << family_name(family) << '-' << std::setw(3) << std::setfill('0') << seed << ".level";
  return os.str();
}

SuiteManifest generate_suite(LevelFamily family, const std::vector<std::uint64_t>& seeds,
                             const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  SuiteManifest m;
  m.family = family;
  for (std::uint64_t seed : seeds) {
    const Level level = gen_level(LevelSpec::benchmark(family, seed));
    const std::vector<std::uint8_t> bytes = encode_level(level);
    SuiteEntry e{seed, level_file_name(family, seed), fnv1a64(bytes.data(), bytes.size())};
    write_file(dir / e.file, bytes);
    m.levels.push_back(std::move(e));
  }
  write_manifest(dir / "manifest.json", m);
  return m;
}

void write_manifest(const std::filesystem::path& path, const SuiteManifest& m) {
  json j;
  j["format"] = "safelife-suite";
  j["version"] = m.version;
  j["generator_version"] = m.generator_version;
  j["family"] = family_name(m.family);
  j["rng"] = kRngAlgorithm;
  j["levels"] = json::array();
  for (const SuiteEntry& e : m.levels) {
    j["levels"].push_back({{"seed", e.seed}, {"file", e.file}, {"hash", hex64(e.hash)}});
  }
  const std::string text = j.dump(2) + "\n";
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

SuiteManifest read_manifest(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  SuiteManifest m;
  try {
    const json j = json::parse(bytes.begin(), bytes.end());
    if (j.at("format") != "safelife-suite") throw SchemaError("not a suite manifest");
    m.version = j.at("version").get<std::uint32_t>();
    if (m.version != 1) throw VersionError("unsupported manifest version");
    m.generator_version = j.at("generator_version").get<std::uint32_t>();
    if (j.at("rng") != kRngAlgorithm) throw VersionError("manifest uses an unsupported RNG");
    const auto fam = family_from_name(j.at("family").get<std::string>());
    if (!fam) throw SchemaError("unknown family in manifest");
    m.family = *fam;
    for (const json& e : j.at("levels")) {
      m.levels.push_back({e.at("seed").get<std::uint64_t>(), e.at("file").get<std::string>(),
                          parse_hex(e.at("hash").get<std::string>())});
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

std::vector<Level> load_suite(const std::filesystem::path& manifest_path) {
  const SuiteManifest m = read_manifest(manifest_path);
  const auto dir = manifest_path.parent_path();
  std::vector<Level> out;
  for (const SuiteEntry& e : m.levels) {
    const std::vector<std::uint8_t> bytes = read_file(dir / e.file);
    if (fnv1a64(bytes.data(), bytes.size()) != e.hash) {
      throw CorruptFileError("hash mismatch for " + e.file);
    }
    out.push_back(decode_level(bytes));
  }
  return out;
}

std::vector<std::uint64_t> verify_suite(const SuiteManifest& m) {
  std::vector<std::uint64_t> bad;
  if (m.generator_version != kGeneratorVersion) {
    for (const SuiteEntry& e : m.levels) bad.push_back(e.seed);
    return bad;
  }
  for (const SuiteEntry& e : m.levels) {
    const std::vector<std::uint8_t> bytes = encode_level(gen_level(LevelSpec::benchmark(m.family, e.seed)));
    if (fnv1a64(bytes.data(), bytes.size()) != e.hash) bad.push_back(e.seed);
  }
  return bad;
}

EpisodeLog to_log(const EpisodeRecord& r) {
  return EpisodeLog{r.family,  r.level_seed,  r.level_hash,  r.actions,
                    r.rewards, r.steps,       r.exited,      r.timeout,
                    r.performance, r.cumulative_penalty, r.final_board.hash()};
}

std::string encode_episode(const EpisodeLog& log) {
  json j;
  j["format"] = "safelife-episode";
  j["version"] = 1;
  j["family"] = family_name(log.family);
  j["level_seed"] = log.level_seed;
  j["level_hash"] = hex64(log.level_hash);
  json actions = json::array();
  for (Action a : log.actions) actions.push_back(static_cast<int>(a));
  j["actions"] = std::move(actions);
  j["rewards"] = log.rewards;
  j["steps"] = log.steps;
  j["exited"] = log.exited;
  j["timeout"] = log.timeout;
  j["performance"] = log.performance;
  j["cumulative_penalty"] = log.cumulative_penalty;
  j["final_board_hash"] = hex64(log.final_board_hash);
  return j.dump();
}

EpisodeLog decode_episode(const std::string& text) {
  EpisodeLog log;
  try {
    const json j = json::parse(text);
    if (j.at("format") != "safelife-episode") throw SchemaError("not an episode log");
    if (j.at("version") != 1) throw VersionError("unsupported episode log version");
    const auto fam = family_from_name(j.at("family").get<std::string>());
    if (!fam) throw SchemaError("unknown family in episode log");
    log.family = *fam;
    log.level_seed = j.at("level_seed").get<std::uint64_t>();
    log.level_hash = parse_hex(j.at("level_hash").get<std::string>());
    for (const json& a : j.at("actions")) {
      const auto act = action_from_index(a.get<int>());
      if (!act) throw SchemaError("invalid action in episode log");
      log.actions.push_back(*act);
    }
    log.rewards = j.at("rewards").get<std::vector<double>>();
    log.steps = j.at("steps").get<std::uint64_t>();
    log.exited = j.at("exited").get<bool>();
    log.timeout = j.at("timeout").get<bool>();
    log.performance = j.at("performance").get<double>();
    log.cumulative_penalty = j.at("cumulative_penalty").get<double>();
    log.final_board_hash = parse_hex(j.at("final_board_hash").get<std::string>());
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed episode log: ") + e.what());
  }
  return log;
}

MeanSd mean_sd(const std::vector<double>& values) {
  if (values.empty()) return {};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

std::vector<BenchmarkAggregate> BenchmarkReport::aggregates() const {
  std::vector<std::pair<LevelFamily, double>> keys;
  for (const BenchmarkRow& r : rows) {
    const std::pair<LevelFamily, double> k{r.family, r.lambda};
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  }
  std::vector<BenchmarkAggregate> out;
  for (const auto& [family, lambda] : keys) {
    std::vector<double> perf, len, green, yellow;
    double exited = 0.0;
    for (const BenchmarkRow& r : rows) {
      if (r.family != family || r.lambda != lambda) continue;
      perf.push_back(r.performance);
      len.push_back(static_cast<double>(r.length));
      green.push_back(r.side_effects.green.normalized);
      yellow.push_back(r.side_effects.yellow.normalized);
      exited += r.exited ? 1.0 : 0.0;
    }
    BenchmarkAggregate a;
    a.family = family;
    a.lambda = lambda;
    a.count = perf.size();
    a.performance = mean_sd(perf);
    a.length = mean_sd(len);
    a.green = mean_sd(green);
    a.yellow = mean_sd(yellow);
    a.completed = exited / static_cast<double>(perf.size());
    out.push_back(a);
  }
  return out;
}

namespace {

json meansd_json(const MeanSd& m) { return {{"mean", m.mean}, {"sd", m.sd}}; }

json score_json(const ChannelScore& c) { return {{"raw", c.raw}, {"normalized", c.normalized}}; }

ChannelScore score_from(const json& j) {
  return {j.at("raw").get<double>(), j.at("normalized").get<double>()};
}

}  // namespace

std::string encode_report(const BenchmarkReport& report) {
  if (report.rows.empty()) throw SchemaError("a report must contain at least one row");
  json j;
  j["format"] = "safelife-report";
  j["version"] = 1;
  j["policy"] = report.policy;
  j["samples"] = report.samples;
  j["rows"] = json::array();
  for (const BenchmarkRow& r : report.rows) {
    j["rows"].push_back({{"family", family_name(r.family)},
                         {"seed", r.seed},
                         {"repeat", r.repeat},
                         {"lambda", r.lambda},
                         {"performance", r.performance},
                         {"length", r.length},
                         {"exited", r.exited},
                         {"green", score_json(r.side_effects.green)},
                         {"yellow", score_json(r.side_effects.yellow)}});
  }
  j["aggregates"] = json::array();
  for (const BenchmarkAggregate& a : report.aggregates()) {
    j["aggregates"].push_back({{"family", family_name(a.family)},
                               {"lambda", a.lambda},
                               {"count", a.count},
                               {"performance", meansd_json(a.performance)},
                               {"length", meansd_json(a.length)},
                               {"green", meansd_json(a.green)},
                               {"yellow", meansd_json(a.yellow)},
                               {"completed", a.completed}});
  }
  return j.dump(2) + "\n";
}

BenchmarkReport decode_report(const std::string& text) {
  BenchmarkReport report;
  try {
    const json j = json::parse(text);
    if (j.at("format") != "safelife-report") throw SchemaError("not a benchmark report");
    if (j.at("version") != 1) throw VersionError("unsupported report version");
    report.policy = j.at("policy").get<std::string>();
    report.samples = j.at("samples").get<int>();
    for (const json& r : j.at("rows")) {
      BenchmarkRow row;
      const auto fam = family_from_name(r.at("family").get<std::string>());
      if (!fam) throw SchemaError("unknown family in report row");
      row.family = *fam;
      row.seed = r.at("seed").get<std::uint64_t>();
      row.repeat = r.at("repeat").get<int>();
      row.lambda = r.at("lambda").get<double>();
      row.performance = r.at("performance").get<double>();
      row.length = r.at("length").get<std::uint64_t>();
      row.exited = r.at("exited").get<bool>();
      row.side_effects.green = score_from(r.at("green"));
      row.side_effects.yellow = score_from(r.at("yellow"));
      report.rows.push_back(row);
    }
    if (report.rows.empty()) throw SchemaError("a report must contain at least one row");
    const auto expected = report.aggregates();
    const json& aggs = j.at("aggregates");
    if (aggs.size() != expected.size()) throw SchemaError("aggregates do not match rows");
    for (std::size_t k = 0; k < expected.size(); ++k) {
      const double mean = aggs[k].at("performance").at("mean").get<double>();
      if (std::abs(mean - expected[k].performance.mean) > 1e-9 ||
          aggs[k].at("count").get<std::size_t>() != expected[k].count) {
        throw SchemaError("aggregates do not match rows");
      }
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed report: ") + e.what());
  }
  return report;
}

void write_report(const std::filesystem::path& path, const BenchmarkReport& report) {
  const std::string text = encode_report(report);
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

BenchmarkReport read_report(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  return decode_report(std::string(bytes.begin(), bytes.end()));
}

std::string format_report_table(const BenchmarkReport& report) {
  if (report.rows.empty()) throw SchemaError("a report must contain at least one row");
  auto cell = [](const MeanSd& m, int precision) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << m.mean << " ± " << m.sd;
    return os.str();
  };
  const auto aggs = report.aggregates();
  std::ostringstream os;
  bool header = false;
  for (const BenchmarkAggregate& a : aggs) {
    if (a.family == LevelFamily::kNavigation) continue;
    if (!header) {
      os << "| Task | Penalty λ | Performance | Length | Side effects: Green | Side effects: Yellow |\n"
         << "|---|---|---|---|---|---|\n";
      header = true;
    }
    os << "| " << family_name(a.family) << " | " << std::fixed << std::setprecision(1) << a.lambda
       << " | " << cell(a.performance, 2) << " | " << cell(a.length, 0) << " | "
       << cell(a.green, 2) << " | " << (has_spawners(a.family) ? cell(a.yellow, 2) : "---")
       << " |\n";
  }
  bool nav_header = false;
  for (const BenchmarkAggregate& a : aggs) {
    if (a.family != LevelFamily::kNavigation) continue;
    if (!nav_header) {
      if (header) os << '\n';
      os << "| Penalty λ | Completed | Length | Side effects (green) |\n"
         << "|---|---|---|---|\n";
      nav_header = true;
    }
    os << "| " << std::fixed << std::setprecision(1) << a.lambda << " | " << std::setprecision(1)
       << 100.0 * a.completed << "% | " << cell(a.length, 0) << " | " << cell(a.green, 2)
       << " |\n";
  }
  return os.str();
}

}  // namespace safelife
