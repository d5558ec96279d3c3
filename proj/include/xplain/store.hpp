#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "xplain/dialogue.hpp"
#include "xplain/error.hpp"
#include "xplain/json.hpp"
#include "xplain/map.hpp"

namespace xplain {

struct StoredMap {
  std::string id;
  GridMap grid_map;
  std::int64_t created_at_ms = 0;
};

inline json stored_map_to_json(const StoredMap& m) {
  json j = map_to_json(m.grid_map);
  j["id"] = m.id;
  j["createdAt"] = m.created_at_ms;
  j["cellCount"] = m.grid_map.size();
  json cells = json::array();
  for (auto k : m.grid_map.cells()) cells.push_back(to_string(k));
  j["cells"] = cells;
  return j;
}

struct StoredSession {
  std::string id;
  std::string map_id;
  SessionConfig config;
  std::vector<TranscriptEvent> events;
};

/// Append-only file store.
///
/// Layout under the data directory:
///   maps.jsonl            one stored map per line
///   sessions/<id>.jsonl   header line, then one transcript event per line
///
/// Appends to distinct session logs may run concurrently; callers serialize
/// appends to the same session.
class FileStore {
 public:
  explicit FileStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_ / "sessions", ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create data directory " + dir_.string() + ": " + ec.message());
  }

  const std::filesystem::path& dir() const noexcept { return dir_; }

  void append_map(const StoredMap& m) {
    json line{{"id", m.id}, {"name", m.grid_map.name()}, {"createdAt", m.created_at_ms},
              {"text", serialize_map(m.grid_map)}};
    std::lock_guard lock(maps_mutex_);
    append_line(dir_ / "maps.jsonl", line.dump());
  }

  std::vector<StoredMap> load_maps() const {
    std::vector<StoredMap> out;
    for (const auto& line : read_lines(dir_ / "maps.jsonl")) {
      auto j = json::parse(line);
      out.push_back({j.at("id").get<std::string>(),
                     parse_map(j.at("text").get<std::string>(), j.value("name", std::string("map"))),
                     j.value("createdAt", std::int64_t{0})});
    }
    return out;
  }

  void create_session(const std::string& id, const std::string& map_id, const SessionConfig& config) {
    json header{{"session", id},
                {"mapId", map_id},
                {"slip", config.motion.slip_probability},
                {"spread", config.motion.spread == SlipSpread::StayOnly ? "stay" : "stay-or-perpendicular"},
                {"discount", config.planner.discount},
                {"tolerance", config.planner.tolerance},
                {"maxIterations", config.planner.max_iterations},
                {"maxEvents", config.max_events}};
    append_line(session_path(id), header.dump());
  }

  void append_events(const std::string& id, const std::vector<TranscriptEvent>& events, std::size_t from) {
    std::string chunk;
    for (std::size_t i = from; i < events.size(); ++i) chunk += events[i].to_json().dump() + "\n";
    if (chunk.empty()) return;
    std::ofstream out(session_path(id), std::ios::app | std::ios::binary);
    out << chunk;
    if (!out) throw Error(ErrorCode::Io, "cannot append to session log " + id);
  }

  std::vector<StoredSession> load_sessions() const {
    std::vector<StoredSession> out;
    if (!std::filesystem::exists(dir_ / "sessions")) return out;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir_ / "sessions")) {
      if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      auto lines = read_lines(file);
      if (lines.empty()) continue;
      auto header = json::parse(lines.front());
      StoredSession s;
      s.id = header.at("session").get<std::string>();
      s.map_id = header.at("mapId").get<std::string>();
      s.config.motion.slip_probability = header.value("slip", 0.2);
      s.config.motion.spread =
          header.value("spread", std::string("stay")) == "stay" ? SlipSpread::StayOnly : SlipSpread::StayOrPerpendicular;
      s.config.planner.discount = header.value("discount", 0.99);
      s.config.planner.tolerance = header.value("tolerance", 1e-6);
      s.config.planner.max_iterations = header.value("maxIterations", 10'000);
      s.config.max_events = header.value("maxEvents", std::size_t{10'000});
      for (std::size_t i = 1; i < lines.size(); ++i) {
        s.events.push_back(TranscriptEvent::from_json(json::parse(lines[i])));
      }
      out.push_back(std::move(s));
    }
    return out;
  }

 private:
  std::filesystem::path session_path(const std::string& id) const { return dir_ / "sessions" / (id + ".jsonl"); }

  static void append_line(const std::filesystem::path& file, const std::string& line) {
    std::ofstream out(file, std::ios::app | std::ios::binary);
    out << line << '\n';
    if (!out) throw Error(ErrorCode::Io, "cannot write " + file.string());
  }

  static std::vector<std::string> read_lines(const std::filesystem::path& file) {
    std::vector<std::string> out;
    std::ifstream in(file, std::ios::binary);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) out.push_back(line);
    }
    return out;
  }

  std::filesystem::path dir_;
  std::mutex maps_mutex_;
};

}  // namespace xplain
