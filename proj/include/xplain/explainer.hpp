#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "xplain/error.hpp"
#include "xplain/map.hpp"
#include "xplain/mdp.hpp"
#include "xplain/planner.hpp"
#include "xplain/preference.hpp"

namespace xplain {

/// Words used to describe states and actions in explanation sentences.
class Vocabulary {
 public:
  Vocabulary(Corpus corpus, const GridMap& map) : corpus_(corpus), map_(map) {}

  Corpus corpus() const noexcept { return corpus_; }

  std::string state_phrase(CellIndex s) const {
    if (corpus_ == Corpus::Concrete) return "grid " + std::to_string(s);
    switch (map_.kind(s)) {
      case CellKind::Start: return "the start";
      case CellKind::Landmark: return "the landmark";
      case CellKind::Destination: return "the destination";
      case CellKind::Crowded: return "the crowded passage";
      case CellKind::Corridor:
      case CellKind::Obstacle: return "the corridor";
    }
    return "the corridor";
  }

  // Third-person form, as used in explanation sentences ("moves east").
  std::string action_phrase(CellIndex s, MoveAction a) const {
    if (a == MoveAction::Stop) return "stops";
    return "moves " + move_words(s, a);
  }

  // Base form, as used in questions ("move east").
  std::string action_phrase_base(CellIndex s, MoveAction a) const {
    if (a == MoveAction::Stop) return "stop";
    return "move " + move_words(s, a);
  }

 private:
  std::string move_words(CellIndex s, MoveAction a) const {
    if (corpus_ == Corpus::Concrete) return std::string(to_string(a));
    auto next = map_.neighbor(s, a);
    if (!next) return std::string(to_string(a));
    switch (map_.kind(*next)) {
      case CellKind::Crowded: return "through the crowded passage";
      case CellKind::Landmark: return "toward the landmark";
      case CellKind::Destination: return "toward the destination";
      case CellKind::Start: return "toward the start";
      case CellKind::Corridor:
      case CellKind::Obstacle: return "along the corridor";
    }
    return "along the corridor";
  }

  Corpus corpus_;
  GridMap map_;
};

struct ExplanationSentence {
  std::string text;
  CellIndex state;
  MoveAction action;
  friend bool operator==(const ExplanationSentence&, const ExplanationSentence&) = default;
};

struct Explanation {
  std::vector<ExplanationSentence> sentences;
  PreferenceTuple preference;
  std::vector<CellIndex> route_states;

  std::vector<RouteStep> provenance() const {
    std::vector<RouteStep> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) out.push_back({s.state, s.action});
    return out;
  }

  bool covers(CellIndex state, MoveAction action) const {
    return std::any_of(sentences.begin(), sentences.end(),
                       [&](const auto& s) { return s.state == state && s.action == action; });
  }

  friend bool operator==(const Explanation&, const Explanation&) = default;
};

/// Route states selected by both the locality and the specificity filter,
/// in route order.
inline std::vector<CellIndex> find_states(const Route& route, const GridMap& map, const Locality& lo,
                                          Specificity sp) {
  const auto states = route.states();
  std::vector<CellIndex> selected;

  if (std::holds_alternative<locality::Global>(lo)) {
    selected = states;
  } else if (const auto* only = std::get_if<locality::CellKindOnly>(&lo)) {
    for (auto s : states) {
      if (map.kind(s) == only->kind || is_critical(map.kind(s))) selected.push_back(s);
    }
  } else if (const auto* seg = std::get_if<locality::Segment>(&lo)) {
    auto kind_is = [&](CellKind k) { return [&map, k](CellIndex s) { return map.kind(s) == k; }; };
    auto first = std::find_if(states.begin(), states.end(), kind_is(seg->from));
    if (first == states.end()) {
      throw Error(ErrorCode::SegmentNotOnRoute, "no " + std::string(to_string(seg->from)) + " cell on the route");
    }
    auto last = std::find_if(std::next(first), states.end(), kind_is(seg->to));
    if (last == states.end()) {
      throw Error(ErrorCode::SegmentNotOnRoute, "no " + std::string(to_string(seg->to)) + " cell on the route after the " +
                                                    std::string(to_string(seg->from)));
    }
    selected.assign(first, std::next(last));
  } else if (const auto* pos = std::get_if<locality::SinglePosition>(&lo)) {
    if (std::find(states.begin(), states.end(), pos->state) != states.end()) selected.push_back(pos->state);
  }

  if (sp == Specificity::CriticalOnly) {
    std::erase_if(selected, [&](CellIndex s) { return !is_critical(map.kind(s)); });
  }
  if (selected.empty()) {
    throw Error(ErrorCode::EmptySelection, "the preference selects no state on the route");
  }
  return selected;
}

inline Vocabulary find_corpus(Corpus co, const GridMap& map) { return Vocabulary(co, map); }

// "The robot <action> in <state>."
inline std::string explanation_sentence(const Vocabulary& v, CellIndex s, MoveAction a) {
  return "The robot " + v.action_phrase(s, a) + " in " + v.state_phrase(s) + ".";
}

/// Walks the nominal route of the policy from the initial state and emits one
/// template sentence per selected state, in traversal order.
///
/// Only the intended successor of each action is followed, and a revisit
/// raises RouteCycle, so generation terminates for any policy.
inline Explanation generate_explanation(const Mdp& mdp, const Policy& policy, const PreferenceTuple& pref) {
  const GridMap& map = mdp.map();
  const Route route = extract_route(policy, mdp);
  const auto selected = find_states(route, map, pref.locality, pref.specificity);
  const Vocabulary vocab = find_corpus(pref.corpus, map);

  Explanation ex;
  ex.preference = pref;
  ex.route_states = route.states();
  for (const auto& step : route.steps) {
    if (std::find(selected.begin(), selected.end(), step.state) == selected.end()) continue;
    ex.sentences.push_back({explanation_sentence(vocab, step.state, step.action), step.state, step.action});
  }
  return ex;
}

}  // namespace xplain
