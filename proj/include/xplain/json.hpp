#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "xplain/error.hpp"
#include "xplain/explainer.hpp"
#include "xplain/map.hpp"
#include "xplain/planner.hpp"
#include "xplain/preference.hpp"

// Wire formats shared by the CLI, the service and the transcript store.
namespace xplain {

using json = nlohmann::json;

inline constexpr std::string_view kPreferenceVersion = "v1";

inline json preference_to_json(const PreferenceTuple& p) {
  return json{{"version", kPreferenceVersion},
              {"objective", to_string(p.objective)},
              {"locality", to_string(p.locality)},
              {"specificity", to_string(p.specificity)},
              {"corpus", to_string(p.corpus)}};
}

inline PreferenceTuple preference_from_json(const json& j) {
  auto bad = [](const std::string& why) -> Error { return Error(ErrorCode::InvalidPreference, why); };
  if (!j.is_object()) throw bad("preference must be a JSON object");
  if (j.contains("version") && j.at("version") != kPreferenceVersion) throw bad("unsupported preference version");
  auto field = [&](const char* key) -> std::string {
    if (!j.contains(key) || !j.at(key).is_string()) throw bad(std::string("missing string field '") + key + "'");
    return j.at(key).get<std::string>();
  };
  PreferenceTuple p;
  auto ob = objective_from_string(field("objective"));
  if (!ob) throw bad("objective must be shortest, safest or combined");
  p.objective = *ob;
  p.locality = locality_from_string(field("locality"));
  auto sp = specificity_from_string(field("specificity"));
  if (!sp) throw bad("specificity must be every-state or critical-only");
  p.specificity = *sp;
  auto co = corpus_from_string(field("corpus"));
  if (!co) throw bad("corpus must be concrete or high-level");
  p.corpus = *co;
  return p;
}

inline json route_to_json(const Route& r) {
  json steps = json::array();
  for (const auto& st : r.steps) steps.push_back({{"state", st.state}, {"action", to_string(st.action)}});
  return steps;
}

inline json metrics_to_json(const RouteMetrics& m) {
  return json{{"moves", m.moves}, {"crowdedEntries", m.crowded_entries}};
}

inline json explanation_to_json(const Explanation& e) {
  json sentences = json::array();
  for (const auto& s : e.sentences) {
    sentences.push_back({{"text", s.text}, {"state", s.state}, {"action", to_string(s.action)}});
  }
  return json{{"sentences", sentences},
              {"preference", preference_to_json(e.preference)},
              {"routeStates", e.route_states}};
}

inline json map_to_json(const GridMap& m) {
  return json{{"name", m.name()},
              {"width", m.width()},
              {"height", m.height()},
              {"start", m.start()},
              {"destination", m.destination()},
              {"text", serialize_map(m)}};
}

inline json violations_to_json(const std::vector<Violation>& vs) {
  json out = json::array();
  for (const auto& v : vs) out.push_back({{"code", v.code}, {"message", v.message}});
  return out;
}

inline MoveAction action_from_json(const json& j) {
  if (!j.is_string()) throw Error(ErrorCode::BadRequest, "action must be a string");
  auto a = move_action_from_string(j.get<std::string>());
  if (!a) throw Error(ErrorCode::BadRequest, "unknown action '" + j.get<std::string>() + "'");
  return *a;
}

}  // namespace xplain
