#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "xplain/error.hpp"
#include "xplain/map.hpp"

namespace xplain {

// Where the probability mass of a failed move goes.
enum class SlipSpread {
  StayOnly,             // the robot stays put
  StayOrPerpendicular,  // uniform over staying put and each valid perpendicular move
};

struct MotionModel {
  double slip_probability = 0.2;
  SlipSpread spread = SlipSpread::StayOnly;
};

struct Outcome {
  CellIndex next;
  double probability;
};

struct ActionModel {
  MoveAction action;
  CellIndex intended;
  std::vector<Outcome> outcomes;
};

/// Grid-world MDP derived from a GridMap.
///
/// States are the non-obstacle cells. An action is offered at a state only if
/// its intended cell exists and is not an obstacle; the destination offers
/// Stop and nothing else, and is absorbing.
class Mdp {
 public:
  Mdp(const GridMap& map, MotionModel model) : map_(map), model_(model) {
    if (!(model.slip_probability >= 0.0 && model.slip_probability < 1.0)) {
      throw Error(ErrorCode::InvalidProbability, "slip probability must be in [0, 1)");
    }
    actions_.resize(static_cast<std::size_t>(map.size()));
    for (CellIndex s = 0; s < map.size(); ++s) {
      if (map.is_obstacle(s)) continue;
      states_.push_back(s);
      auto& per_state = actions_[static_cast<std::size_t>(s)];
      if (s == map.destination()) {
        per_state.push_back({MoveAction::Stop, s, {{s, 1.0}}});
        continue;
      }
      for (auto a : kMoves) {
        auto intended = map.neighbor(s, a);
        if (!intended) continue;
        per_state.push_back({a, *intended, outcomes_for(s, a, *intended)});
      }
    }
  }

  const GridMap& map() const noexcept { return map_; }
  const MotionModel& motion() const noexcept { return model_; }
  const std::vector<CellIndex>& states() const noexcept { return states_; }
  CellIndex initial_state() const noexcept { return map_.start(); }

  const std::vector<ActionModel>& actions(CellIndex s) const {
    return actions_.at(static_cast<std::size_t>(s));
  }

  const ActionModel* find(CellIndex s, MoveAction a) const {
    if (!map_.contains(s)) return nullptr;
    for (const auto& am : actions(s)) {
      if (am.action == a) return &am;
    }
    return nullptr;
  }

  bool is_valid(CellIndex s, MoveAction a) const { return find(s, a) != nullptr; }

  std::optional<CellIndex> intended(CellIndex s, MoveAction a) const {
    if (const auto* am = find(s, a)) return am->intended;
    return std::nullopt;
  }

  // delta(s, a, next); zero for invalid actions.
  double transition(CellIndex s, MoveAction a, CellIndex next) const {
    const auto* am = find(s, a);
    if (!am) return 0.0;
    double p = 0.0;
    for (const auto& o : am->outcomes) {
      if (o.next == next) p += o.probability;
    }
    return p;
  }

  // R1: -1 per navigated grid.
  double distance_reward(CellIndex s, MoveAction, CellIndex next) const { return next != s ? -1.0 : 0.0; }

  // R2: -1 per navigated crowded grid.
  double safety_reward(CellIndex s, MoveAction, CellIndex next) const {
    return next != s && map_.kind(next) == CellKind::Crowded ? -1.0 : 0.0;
  }

 private:
  std::vector<Outcome> outcomes_for(CellIndex s, MoveAction a, CellIndex intended) const {
    const double slip = model_.slip_probability;
    std::vector<Outcome> out{{intended, 1.0 - slip}};
    if (slip == 0.0) return out;
    std::vector<CellIndex> slips{s};
    if (model_.spread == SlipSpread::StayOrPerpendicular) {
      for (auto p : perpendicular(a)) {
        if (auto n = map_.neighbor(s, p)) slips.push_back(*n);
      }
    }
    const double share = slip / static_cast<double>(slips.size());
    for (auto n : slips) out.push_back({n, share});
    return out;
  }

  GridMap map_;
  MotionModel model_;
  std::vector<CellIndex> states_;
  std::vector<std::vector<ActionModel>> actions_;
};

inline Mdp build_mdp(const GridMap& map, MotionModel model = {}) { return Mdp(map, model); }

inline Mdp build_mdp(const GridMap& map, double slip_probability) {
  return Mdp(map, MotionModel{slip_probability, SlipSpread::StayOnly});
}

}  // namespace xplain
