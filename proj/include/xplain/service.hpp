#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <string>

#include <httplib.h>

#include "xplain/dialogue.hpp"
#include "xplain/error.hpp"
#include "xplain/json.hpp"
#include "xplain/store.hpp"

namespace xplain {

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::RaggedRows:
    case ErrorCode::UnknownCell:
    case ErrorCode::EmptyMap:
    case ErrorCode::MissingStart:
    case ErrorCode::MissingDestination:
    case ErrorCode::DuplicateStart:
    case ErrorCode::DuplicateDestination:
    case ErrorCode::UnreachableDestination:
    case ErrorCode::InvalidProbability:
    case ErrorCode::InvalidParameter:
    case ErrorCode::InvalidPreference:
    case ErrorCode::BadRequest: return 400;
    case ErrorCode::UnknownMap:
    case ErrorCode::UnknownSession: return 404;
    case ErrorCode::WrongState: return 409;
    case ErrorCode::EmptySelection:
    case ErrorCode::SegmentNotOnRoute:
    case ErrorCode::PreferenceViolation:
    case ErrorCode::PreferenceUnchanged:
    case ErrorCode::NotInExplanation: return 422;
    case ErrorCode::EventLimitExceeded: return 429;
    case ErrorCode::NoValidAction:
    case ErrorCode::NotConverged:
    case ErrorCode::RouteCycle:
    case ErrorCode::ReplayMismatch:
    case ErrorCode::Io: return 500;
  }
  return 500;
}

// ApiError body: {code, message, details}.
inline json api_error(std::string_view code, std::string_view message, json details = nullptr) {
  return json{{"code", code}, {"message", message}, {"details", std::move(details)}};
}

struct ServiceConfig {
  std::filesystem::path data_dir = "data";
  SessionConfig session{};
  std::filesystem::path ui_dir;  // served under /ui when set and present
};

/// HTTP/JSON front of the engine, versioned under /v1.
///
/// Maps and sessions live in memory and are mirrored to a FileStore; on
/// construction every stored map is reloaded and every stored session is
/// rebuilt by transcript replay. Requests on one session are serialized by
/// that session's mutex, distinct sessions proceed concurrently.
class Service {
 public:
  explicit Service(ServiceConfig config) : config_(std::move(config)), store_(config_.data_dir) {
    maps_.emplace(std::string(kPaperMapId), StoredMap{std::string(kPaperMapId), paper_map(), 0});
    for (auto& m : store_.load_maps()) maps_.insert_or_assign(m.id, std::move(m));
    for (auto& rec : store_.load_sessions()) {
      auto it = maps_.find(rec.map_id);
      if (it == maps_.end()) continue;
      auto session = Session::replay(rec.id, it->second.grid_map, rec.events, rec.config);
      sessions_.emplace(rec.id, std::make_shared<Entry>(rec.map_id, std::move(session)));
    }
  }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  void mount(httplib::Server& server) {
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string what = "internal error";
      try {
        if (ep) std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      res.status = 500;
      res.set_content(api_error("Internal", what).dump(), "application/json");
    });

    server.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"status":"ok"})", "application/json");
    });
    server.Get("/v1/maps", wrap([this](const httplib::Request&) { return HttpReply{200, list_maps()}; }));
    server.Post("/v1/maps", wrap([this](const httplib::Request& req) {
                  std::string name = req.has_param("name") ? req.get_param_value("name") : "map";
                  return HttpReply{201, create_map(req.body, name)};
                }));
    server.Get(R"(/v1/maps/([^/]+))",
               wrap([this](const httplib::Request& req) { return HttpReply{200, get_map(req.matches[1])}; }));
    server.Post("/v1/sessions", wrap([this](const httplib::Request& req) {
                  auto body = parse_body(req.body);
                  if (!body.contains("mapId") || !body.at("mapId").is_string()) {
                    throw Error(ErrorCode::BadRequest, "body needs a string 'mapId'");
                  }
                  if (!body.contains("preference")) throw Error(ErrorCode::BadRequest, "body needs 'preference'");
                  return HttpReply{201, create_session(body.at("mapId").get<std::string>(),
                                                   preference_from_json(body.at("preference")))};
                }));
    server.Get(R"(/v1/sessions/([^/]+))",
               wrap([this](const httplib::Request& req) { return HttpReply{200, get_session(req.matches[1])}; }));
    server.Post(R"(/v1/sessions/([^/]+)/question)", wrap([this](const httplib::Request& req) {
                  auto body = parse_body(req.body);
                  if (!body.contains("state") || !body.at("state").is_number_integer() || !body.contains("action")) {
                    throw Error(ErrorCode::BadRequest, "body needs integer 'state' and string 'action'");
                  }
                  Question q{body.at("state").get<CellIndex>(), action_from_json(body.at("action"))};
                  return HttpReply{200, ask(req.matches[1], q)};
                }));
    server.Post(R"(/v1/sessions/([^/]+)/preference)", wrap([this](const httplib::Request& req) {
                  return HttpReply{200, submit_preference(req.matches[1], preference_from_json(parse_body(req.body)))};
                }));
    server.Post(R"(/v1/sessions/([^/]+)/confirm)", wrap([this](const httplib::Request& req) {
                  auto body = parse_body(req.body);
                  auto reply = body.value("reply", std::string());
                  if (reply != "yes" && reply != "no") throw Error(ErrorCode::BadRequest, "reply must be yes or no");
                  return HttpReply{200, confirm(req.matches[1], reply == "yes" ? xplain::Reply::Yes : xplain::Reply::No)};
                }));
    server.Get(R"(/v1/sessions/([^/]+)/transcript)", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        res.set_content(transcript(req.matches[1]), "application/x-ndjson");
      } catch (const Error& e) {
        send_error(res, e);
      }
    });

    if (!config_.ui_dir.empty() && std::filesystem::is_directory(config_.ui_dir)) {
      server.set_mount_point("/ui", config_.ui_dir.string());
    }
  }

  // Blocks until the server stops.
  bool listen(const std::string& host, int port) {
    httplib::Server server;
    mount(server);
    return server.listen(host, port);
  }

  // The operations below back the HTTP routes and are usable in-process.

  json list_maps() const {
    std::shared_lock lock(registry_mutex_);
    json out = json::array();
    for (const auto& [id, m] : maps_) out.push_back(stored_map_to_json(m));
    return out;
  }

  json create_map(std::string_view text, const std::string& name) {
    StoredMap m{new_id("m-"), parse_map(text, name), now_ms()};
    store_.append_map(m);
    json j = stored_map_to_json(m);
    std::unique_lock lock(registry_mutex_);
    maps_.emplace(m.id, std::move(m));
    return j;
  }

  json get_map(const std::string& id) const {
    std::shared_lock lock(registry_mutex_);
    auto it = maps_.find(id);
    if (it == maps_.end()) throw Error(ErrorCode::UnknownMap, "no map with id '" + id + "'");
    return stored_map_to_json(it->second);
  }

  json create_session(const std::string& map_id, const PreferenceTuple& pref) {
    GridMap grid = [&] {
      std::shared_lock lock(registry_mutex_);
      auto it = maps_.find(map_id);
      if (it == maps_.end()) throw Error(ErrorCode::UnknownMap, "no map with id '" + map_id + "'");
      return it->second.grid_map;
    }();
    auto entry = std::make_shared<Entry>(map_id, Session::start(new_id("s-"), grid, pref, config_.session));
    const std::string id = entry->session.id();
    std::lock_guard session_lock(entry->mutex);
    store_.create_session(id, map_id, config_.session);
    store_.append_events(id, entry->session.transcript(), 0);
    {
      std::unique_lock lock(registry_mutex_);
      sessions_.emplace(id, entry);
    }
    return snapshot(*entry);
  }

  json get_session(const std::string& id) const {
    auto entry = find_session(id);
    std::lock_guard lock(entry->mutex);
    return snapshot(*entry);
  }

  json ask(const std::string& id, const Question& q) {
    return mutate(id, [&](Session& s) { return json{{"answer", s.ask(q).text}}; });
  }

  json submit_preference(const std::string& id, const PreferenceTuple& pref) {
    return mutate(id, [&](Session& s) {
      auto prompt = s.submit_preference_update(pref);
      return json{{"conflict", to_string(prompt.conflict)}, {"prompt", prompt.text}, {"state", to_string(prompt.state)}};
    });
  }

  json confirm(const std::string& id, xplain::Reply reply) {
    auto entry = find_session(id);
    std::lock_guard lock(entry->mutex);
    apply(*entry, [&](Session& s) { return json(s.confirm(reply)); });
    return snapshot(*entry);
  }

  std::string transcript(const std::string& id) const {
    auto entry = find_session(id);
    std::lock_guard lock(entry->mutex);
    return transcript_to_jsonl(entry->session.transcript());
  }

 private:
  struct Entry {
    Entry(std::string map, Session s) : map_id(std::move(map)), session(std::move(s)) {}
    mutable std::mutex mutex;
    std::string map_id;
    Session session;
  };

  struct HttpReply {
    int status;
    json body;
  };

  template <typename Handler>
  httplib::Server::Handler wrap(Handler handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
      try {
        HttpReply r = handler(req);
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
      } catch (const Error& e) {
        send_error(res, e);
      } catch (const json::exception& e) {
        res.status = 400;
        res.set_content(api_error("BadRequest", e.what()).dump(), "application/json");
      }
    };
  }

  static void send_error(httplib::Response& res, const Error& e) {
    res.status = http_status(e.code());
    if (const auto* rejected = dynamic_cast<const PreferenceRejected*>(&e)) {
      const auto& vs = rejected->violations();
      res.set_content(api_error(vs.front().code, e.what(), violations_to_json(vs)).dump(), "application/json");
      return;
    }
    res.set_content(api_error(e.code_name(), e.what()).dump(), "application/json");
  }

  static json parse_body(const std::string& body) {
    try {
      return json::parse(body);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::BadRequest, std::string("malformed JSON body: ") + e.what());
    }
  }

  std::shared_ptr<Entry> find_session(const std::string& id) const {
    std::shared_lock lock(registry_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "no session with id '" + id + "'");
    return it->second;
  }

  template <typename Op>
  json mutate(const std::string& id, Op op) {
    auto entry = find_session(id);
    std::lock_guard lock(entry->mutex);
    return apply(*entry, op);
  }

  // Runs op and persists whatever events it appended. Caller holds the entry mutex.
  template <typename Op>
  json apply(Entry& entry, Op op) {
    const std::size_t before = entry.session.transcript().size();
    json out = op(entry.session);
    store_.append_events(entry.session.id(), entry.session.transcript(), before);
    return out;
  }

  static json snapshot(const Entry& entry) {
    json j = session_snapshot(entry.session);
    j["mapId"] = entry.map_id;
    return j;
  }

  std::string new_id(std::string_view prefix) {
    std::lock_guard lock(rng_mutex_);
    std::uniform_int_distribution<std::uint64_t> dist;
    static constexpr char kHex[] = "0123456789abcdef";
    while (true) {
      std::string id(prefix);
      auto bits = dist(rng_);
      for (int i = 0; i < 16; ++i) id.push_back(kHex[(bits >> (4 * i)) & 0xF]);
      std::shared_lock reg(registry_mutex_);
      if (!maps_.contains(id) && !sessions_.contains(id)) return id;
    }
  }

  static std::int64_t now_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
  }

  ServiceConfig config_;
  FileStore store_;
  mutable std::shared_mutex registry_mutex_;
  std::map<std::string, StoredMap> maps_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mutex rng_mutex_;
  std::mt19937_64 rng_{std::random_device{}()};
};

// "host:port" as in XPLAIN_ADDR.
inline std::pair<std::string, int> parse_address(std::string_view addr) {
  auto colon = addr.rfind(':');
  if (colon == std::string_view::npos) throw Error(ErrorCode::InvalidParameter, "address must be host:port");
  int port = 0;
  try {
    port = std::stoi(std::string(addr.substr(colon + 1)));
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidParameter, "invalid port in address '" + std::string(addr) + "'");
  }
  return {std::string(addr.substr(0, colon)), port};
}

}  // namespace xplain
