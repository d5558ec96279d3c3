#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include "xplain/error.hpp"
#include "xplain/mdp.hpp"

namespace xplain {

enum class Objective { ShortestPath, SafestPath, ShortestAndSafest };

constexpr std::string_view to_string(Objective ob) {
  switch (ob) {
    case Objective::ShortestPath: return "shortest";
    case Objective::SafestPath: return "safest";
    case Objective::ShortestAndSafest: return "combined";
  }
  return "?";
}

inline std::optional<Objective> objective_from_string(std::string_view s) {
  for (auto ob : {Objective::ShortestPath, Objective::SafestPath, Objective::ShortestAndSafest}) {
    if (to_string(ob) == s) return ob;
  }
  return std::nullopt;
}

struct PlannerOptions {
  double discount = 0.99;
  double tolerance = 1e-6;
  int max_iterations = 10'000;
};

// Q-values within this distance of the best are ties, resolved by kAllActions order.
inline constexpr double kTieEpsilon = 1e-9;

struct Policy {
  Objective objective = Objective::ShortestPath;
  double discount = 0.99;
  std::vector<std::optional<MoveAction>> action_of;  // indexed by cell
  std::vector<double> values;                        // indexed by cell
  int iterations = 0;

  std::optional<MoveAction> action(CellIndex s) const {
    if (s < 0 || static_cast<std::size_t>(s) >= action_of.size()) return std::nullopt;
    return action_of[static_cast<std::size_t>(s)];
  }
};

struct RouteStep {
  CellIndex state;
  MoveAction action;
  friend bool operator==(const RouteStep&, const RouteStep&) = default;
};

struct Route {
  std::vector<RouteStep> steps;

  std::vector<CellIndex> states() const {
    std::vector<CellIndex> out;
    out.reserve(steps.size());
    for (const auto& st : steps) out.push_back(st.state);
    return out;
  }
  friend bool operator==(const Route&, const Route&) = default;
};

struct RouteMetrics {
  int moves = 0;
  int crowded_entries = 0;
  friend bool operator==(const RouteMetrics&, const RouteMetrics&) = default;
};

namespace detail {

// Scalarized one-step reward for an objective. Safest is lexicographic
// (crowded entries first, distance second): one crowded entry outweighs any
// route length on the map.
inline double objective_reward(const Mdp& mdp, Objective ob, CellIndex s, MoveAction a, CellIndex next) {
  const double r1 = mdp.distance_reward(s, a, next);
  const double r2 = mdp.safety_reward(s, a, next);
  switch (ob) {
    case Objective::ShortestPath: return r1;
    case Objective::SafestPath: return static_cast<double>(mdp.map().size() + 1) * r2 + r1;
    case Objective::ShortestAndSafest: return r1 + r2;
  }
  return r1;
}

inline double q_value(const Mdp& mdp, Objective ob, double discount, const std::vector<double>& values,
                      CellIndex s, const ActionModel& am) {
  double q = 0.0;
  for (const auto& o : am.outcomes) {
    q += o.probability *
         (objective_reward(mdp, ob, s, am.action, o.next) + discount * values[static_cast<std::size_t>(o.next)]);
  }
  return q;
}

inline std::vector<bool> reachable_states(const Mdp& mdp) {
  std::vector<bool> seen(static_cast<std::size_t>(mdp.map().size()), false);
  std::vector<CellIndex> stack{mdp.initial_state()};
  seen[static_cast<std::size_t>(mdp.initial_state())] = true;
  while (!stack.empty()) {
    CellIndex s = stack.back();
    stack.pop_back();
    for (const auto& am : mdp.actions(s)) {
      for (const auto& o : am.outcomes) {
        if (o.probability > 0.0 && !seen[static_cast<std::size_t>(o.next)]) {
          seen[static_cast<std::size_t>(o.next)] = true;
          stack.push_back(o.next);
        }
      }
    }
  }
  return seen;
}

}  // namespace detail

/// Value iteration on the scalarized objective reward, followed by greedy
/// extraction with a fixed tie-break order [N, E, S, W, Stop].
///
/// Stops once the largest state-value change drops below the tolerance.
/// Throws NotConverged when the iteration cap is reached first and
/// NoValidAction when a reachable state offers no action.
inline Policy plan_policy(const Mdp& mdp, Objective objective, const PlannerOptions& opts = {}) {
  if (!(opts.discount > 0.0 && opts.discount < 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "discount must be in (0, 1)");
  }
  if (!(opts.tolerance > 0.0)) throw Error(ErrorCode::InvalidParameter, "tolerance must be positive");
  if (opts.max_iterations <= 0) throw Error(ErrorCode::InvalidParameter, "iteration cap must be positive");

  const auto n = static_cast<std::size_t>(mdp.map().size());
  const auto reachable = detail::reachable_states(mdp);
  for (CellIndex s : mdp.states()) {
    if (reachable[static_cast<std::size_t>(s)] && mdp.actions(s).empty()) {
      throw Error(ErrorCode::NoValidAction, "state " + std::to_string(s) + " has no valid action");
    }
  }

  Policy policy;
  policy.objective = objective;
  policy.discount = opts.discount;
  policy.values.assign(n, 0.0);
  policy.action_of.assign(n, std::nullopt);

  std::vector<double> next(n, 0.0);
  bool converged = false;
  while (policy.iterations < opts.max_iterations) {
    ++policy.iterations;
    double max_change = 0.0;
    for (CellIndex s : mdp.states()) {
      const auto& acts = mdp.actions(s);
      if (acts.empty()) continue;
      double best = -INFINITY;
      for (const auto& am : acts) {
        best = std::max(best, detail::q_value(mdp, objective, opts.discount, policy.values, s, am));
      }
      next[static_cast<std::size_t>(s)] = best;
      max_change = std::max(max_change, std::abs(best - policy.values[static_cast<std::size_t>(s)]));
    }
    policy.values.swap(next);
    if (max_change < opts.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw Error(ErrorCode::NotConverged,
                "value iteration did not converge within " + std::to_string(opts.max_iterations) + " iterations");
  }

  for (CellIndex s : mdp.states()) {
    const auto& acts = mdp.actions(s);
    if (acts.empty()) continue;
    std::vector<double> q;
    q.reserve(acts.size());
    double best = -INFINITY;
    for (const auto& am : acts) {
      q.push_back(detail::q_value(mdp, objective, opts.discount, policy.values, s, am));
      best = std::max(best, q.back());
    }
    // acts is already in tie-break order
    for (std::size_t i = 0; i < acts.size(); ++i) {
      if (q[i] >= best - kTieEpsilon) {
        policy.action_of[static_cast<std::size_t>(s)] = acts[i].action;
        break;
      }
    }
  }
  return policy;
}

/// Nominal route: follow the intended successor of each chosen action from
/// the initial state until Stop. Throws RouteCycle on a revisit.
inline Route extract_route(const Policy& policy, const Mdp& mdp) {
  Route route;
  std::vector<bool> visited(static_cast<std::size_t>(mdp.map().size()), false);
  CellIndex s = mdp.initial_state();
  while (true) {
    visited[static_cast<std::size_t>(s)] = true;
    auto a = policy.action(s);
    if (!a) throw Error(ErrorCode::NoValidAction, "policy has no action for state " + std::to_string(s));
    auto next = mdp.intended(s, *a);
    if (!next) {
      throw Error(ErrorCode::NoValidAction, "policy action " + std::string(to_string(*a)) +
                                                " is not valid in state " + std::to_string(s));
    }
    route.steps.push_back({s, *a});
    if (*a == MoveAction::Stop) return route;
    if (visited[static_cast<std::size_t>(*next)]) {
      throw Error(ErrorCode::RouteCycle, "nominal route revisits state " + std::to_string(*next));
    }
    s = *next;
  }
}

inline RouteMetrics route_metrics(const Route& route, const Mdp& mdp) {
  RouteMetrics m;
  for (std::size_t i = 0; i < route.steps.size(); ++i) {
    if (route.steps[i].action == MoveAction::Stop) continue;
    ++m.moves;
    if (auto next = mdp.intended(route.steps[i].state, route.steps[i].action);
        next && mdp.map().kind(*next) == CellKind::Crowded) {
      ++m.crowded_entries;
    }
  }
  return m;
}

}  // namespace xplain
