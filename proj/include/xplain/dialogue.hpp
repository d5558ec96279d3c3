#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xplain/error.hpp"
#include "xplain/explainer.hpp"
#include "xplain/json.hpp"
#include "xplain/mdp.hpp"
#include "xplain/planner.hpp"
#include "xplain/preference.hpp"

namespace xplain {

enum class SessionState {
  AwaitingPreference,
  Planned,
  Explained,
  AwaitingSoftConfirm,
  AwaitingHardConfirm,
  AwaitingDoneConfirm,
  Finalized,
};

constexpr std::string_view to_string(SessionState s) {
  switch (s) {
    case SessionState::AwaitingPreference: return "awaiting-preference";
    case SessionState::Planned: return "planned";
    case SessionState::Explained: return "explained";
    case SessionState::AwaitingSoftConfirm: return "awaiting-soft-confirm";
    case SessionState::AwaitingHardConfirm: return "awaiting-hard-confirm";
    case SessionState::AwaitingDoneConfirm: return "awaiting-done-confirm";
    case SessionState::Finalized: return "finalized";
  }
  return "?";
}

enum class EventKind { PreferenceSet, Explained, QuestionAsked, ConflictDetected, ConfirmYes, ConfirmNo, Finalized };

constexpr std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::PreferenceSet: return "PreferenceSet";
    case EventKind::Explained: return "Explained";
    case EventKind::QuestionAsked: return "QuestionAsked";
    case EventKind::ConflictDetected: return "ConflictDetected";
    case EventKind::ConfirmYes: return "ConfirmYes";
    case EventKind::ConfirmNo: return "ConfirmNo";
    case EventKind::Finalized: return "Finalized";
  }
  return "?";
}

inline std::optional<EventKind> event_kind_from_string(std::string_view s) {
  for (auto k : {EventKind::PreferenceSet, EventKind::Explained, EventKind::QuestionAsked,
                 EventKind::ConflictDetected, EventKind::ConfirmYes, EventKind::ConfirmNo, EventKind::Finalized}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

struct TranscriptEvent {
  std::int64_t timestamp_ms = 0;
  EventKind kind = EventKind::PreferenceSet;
  json payload = json::object();

  json to_json() const { return json{{"ts", timestamp_ms}, {"kind", to_string(kind)}, {"payload", payload}}; }

  static TranscriptEvent from_json(const json& j) {
    auto kind = j.is_object() && j.contains("kind") && j.at("kind").is_string()
                    ? event_kind_from_string(j.at("kind").get<std::string>())
                    : std::nullopt;
    if (!kind) throw Error(ErrorCode::ReplayMismatch, "malformed transcript event");
    return TranscriptEvent{j.value("ts", std::int64_t{0}), *kind, j.value("payload", json::object())};
  }
};

// Transcript as JSON Lines, one event per line.
inline std::string transcript_to_jsonl(const std::vector<TranscriptEvent>& events) {
  std::string out;
  for (const auto& e : events) out += e.to_json().dump() + "\n";
  return out;
}

inline std::vector<TranscriptEvent> transcript_from_jsonl(std::string_view text) {
  std::vector<TranscriptEvent> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (!line.empty()) out.push_back(TranscriptEvent::from_json(json::parse(line)));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

struct Question {
  CellIndex state;
  MoveAction action;
};

struct Answer {
  std::string text;
};

enum class Reply { Yes, No };

struct Prompt {
  ConflictKind conflict = ConflictKind::None;
  SessionState state = SessionState::Explained;
  std::string text;
};

struct SessionConfig {
  MotionModel motion{};
  PlannerOptions planner{};
  std::size_t max_events = 10'000;
};

inline constexpr std::string_view kNoConflictPrompt =
    "No conflict detected. Please confirm that you have finished updating your preferences.";
inline constexpr std::string_view kSoftConflictPrompt =
    "Soft conflict: the planning objective is unchanged. Do you want to view a different explanation of the same "
    "robotic plan?";
inline constexpr std::string_view kHardConflictPrompt =
    "Hard conflict: the planning objective changed. Do you indeed want to update the planning objective?";
inline constexpr std::string_view kReviseSoftPrompt =
    "Please update your preference to reflect the intended changes.";
inline constexpr std::string_view kReviseHardPrompt = "Please revise your preference.";
inline constexpr std::string_view kNewPreferencePrompt =
    "Please provide a new preference different from the current one.";
inline constexpr std::string_view kFinalizedPrompt = "The route is finalized.";

constexpr std::string_view objective_phrase(Objective ob) {
  switch (ob) {
    case Objective::ShortestPath: return "shortest route";
    case Objective::SafestPath: return "safest route";
    case Objective::ShortestAndSafest: return "shortest and safest route";
  }
  return "route";
}

// Contrastive answer to "Why does the robot <action> rather than take a
// different action in <state>?".
inline std::string contrastive_answer(const Vocabulary& v, Objective ob, CellIndex s, MoveAction a) {
  const std::string state = v.state_phrase(s);
  const std::string objective(objective_phrase(ob));
  return "The robot " + v.action_phrase(s, a) + " in " + state +
         ", because it is part of the optimal robotic plan to achieve the " + objective +
         ", while taking a different action in " + state + " cannot guarantee the " + objective + ".";
}

inline std::string question_text(const Vocabulary& v, CellIndex s, MoveAction a) {
  return "Why does the robot " + v.action_phrase_base(s, a) + " rather than take a different action in " +
         v.state_phrase(s) + "?";
}

/// One interactive explanation session over a single map.
///
/// Starts Explained; questions are answered only while Explained. A submitted
/// preference is classified against the active one and parks the session in a
/// confirmation state until `confirm` is called. Finalized is terminal.
///
/// Every successful operation appends to the transcript, and `replay`
/// rebuilds an identical session from a map and a transcript.
class Session {
 public:
  static Session start(std::string id, const GridMap& map, const PreferenceTuple& initial,
                       const SessionConfig& config = {}) {
    if (auto vs = validate_preference(initial, map); !vs.empty()) throw PreferenceRejected(std::move(vs));
    Session s(std::move(id), map, config);
    auto policy = plan_policy(s.mdp_, initial.objective, config.planner);
    auto explanation = generate_explanation(s.mdp_, policy, initial);
    s.preference_ = initial;
    s.append(EventKind::PreferenceSet, json{{"preference", preference_to_json(initial)}});
    s.adopt(std::move(policy), std::move(explanation));
    return s;
  }

  const std::string& id() const noexcept { return id_; }
  const GridMap& map() const noexcept { return mdp_.map(); }
  const Mdp& mdp() const noexcept { return mdp_; }
  const SessionConfig& config() const noexcept { return config_; }
  SessionState state() const noexcept { return state_; }
  const PreferenceTuple& preference() const noexcept { return preference_; }
  const std::optional<PreferenceTuple>& pending_preference() const noexcept { return pending_; }
  const std::optional<Policy>& policy() const noexcept { return policy_; }
  const std::optional<Explanation>& explanation() const noexcept { return explanation_; }
  const std::optional<Route>& route() const noexcept { return route_; }
  const std::vector<TranscriptEvent>& transcript() const noexcept { return transcript_; }
  const std::string& prompt() const noexcept { return prompt_; }
  bool requires_different_preference() const noexcept { return require_different_; }

  RouteMetrics metrics() const { return route_ ? route_metrics(*route_, mdp_) : RouteMetrics{}; }

  Vocabulary vocabulary() const { return find_corpus(preference_.corpus, mdp_.map()); }

  Answer ask(const Question& q) {
    require_state(SessionState::Explained, "ask a question");
    if (!explanation_->covers(q.state, q.action)) {
      throw Error(ErrorCode::NotInExplanation, "(" + std::to_string(q.state) + ", " +
                                                   std::string(to_string(q.action)) +
                                                   ") is not part of the current explanation");
    }
    check_capacity(1);
    Answer answer{contrastive_answer(vocabulary(), preference_.objective, q.state, q.action)};
    append(EventKind::QuestionAsked,
           json{{"state", q.state}, {"action", to_string(q.action)}, {"answer", answer.text}});
    return answer;
  }

  Prompt submit_preference_update(const PreferenceTuple& updated) {
    require_state(SessionState::Explained, "update the preference");
    if (auto vs = validate_preference(updated, mdp_.map()); !vs.empty()) throw PreferenceRejected(std::move(vs));
    if (require_different_ && updated == preference_) {
      throw Error(ErrorCode::PreferenceUnchanged, std::string(kNewPreferencePrompt));
    }
    const ConflictKind conflict = classify_conflict(preference_, updated);

    std::optional<Policy> candidate_policy;
    std::optional<Explanation> candidate;
    if (conflict == ConflictKind::Soft) {
      candidate = generate_explanation(mdp_, *policy_, updated);
    } else if (conflict == ConflictKind::Hard) {
      candidate_policy = plan_policy(mdp_, updated.objective, config_.planner);
      candidate = generate_explanation(mdp_, *candidate_policy, updated);
    }

    check_capacity(1);
    require_different_ = false;
    append(EventKind::ConflictDetected,
           json{{"conflict", to_string(conflict)}, {"preference", preference_to_json(updated)}});
    switch (conflict) {
      case ConflictKind::None:
        state_ = SessionState::AwaitingDoneConfirm;
        prompt_ = kNoConflictPrompt;
        break;
      case ConflictKind::Soft:
        state_ = SessionState::AwaitingSoftConfirm;
        prompt_ = kSoftConflictPrompt;
        break;
      case ConflictKind::Hard:
        state_ = SessionState::AwaitingHardConfirm;
        prompt_ = kHardConflictPrompt;
        break;
    }
    if (conflict != ConflictKind::None) {
      pending_ = updated;
      pending_policy_ = std::move(candidate_policy);
      pending_explanation_ = std::move(candidate);
    }
    return Prompt{conflict, state_, prompt_};
  }

  // Returns the follow-up prompt for the user.
  const std::string& confirm(Reply reply) {
    const SessionState from = state_;
    if (from != SessionState::AwaitingSoftConfirm && from != SessionState::AwaitingHardConfirm &&
        from != SessionState::AwaitingDoneConfirm) {
      throw Error(ErrorCode::WrongState, "nothing to confirm in state " + std::string(to_string(from)));
    }
    const bool yes = reply == Reply::Yes;
    check_capacity(yes && from != SessionState::AwaitingDoneConfirm ? 3 : 2);
    append(yes ? EventKind::ConfirmYes : EventKind::ConfirmNo, json{{"awaiting", awaiting_name(from)}});

    if (from == SessionState::AwaitingDoneConfirm) {
      if (yes) {
        state_ = SessionState::Finalized;
        prompt_ = kFinalizedPrompt;
        append(EventKind::Finalized, json{{"updateCount", update_count()}});
      } else {
        state_ = SessionState::Explained;
        require_different_ = true;
        prompt_ = kNewPreferencePrompt;
      }
      return prompt_;
    }

    if (yes) {
      preference_ = *pending_;
      append(EventKind::PreferenceSet, json{{"preference", preference_to_json(preference_)}});
      Policy policy = pending_policy_ ? std::move(*pending_policy_) : std::move(*policy_);
      adopt(std::move(policy), std::move(*pending_explanation_));
    } else {
      state_ = SessionState::Explained;
      prompt_ = from == SessionState::AwaitingSoftConfirm ? kReviseSoftPrompt : kReviseHardPrompt;
    }
    clear_pending();
    return prompt_;
  }

  // Preference updates adopted after the initial one.
  int update_count() const {
    auto n = std::count_if(transcript_.begin(), transcript_.end(),
                           [](const auto& e) { return e.kind == EventKind::PreferenceSet; });
    return n > 0 ? static_cast<int>(n) - 1 : 0;
  }

  // Empty when every session invariant holds, else a description of the first violation.
  std::optional<std::string> invariant_violation() const {
    const bool confirming = state_ == SessionState::AwaitingSoftConfirm || state_ == SessionState::AwaitingHardConfirm;
    if (pending_.has_value() != confirming) return "pending preference present iff awaiting soft/hard confirm";
    if (!policy_ || !explanation_ || !route_) return "session lacks a plan or explanation";
    if (policy_->objective != preference_.objective) return "active policy objective differs from preference";
    if (explanation_->preference != preference_) return "explanation was generated for another preference";
    for (std::size_t i = 1; i < transcript_.size(); ++i) {
      if (transcript_[i].timestamp_ms < transcript_[i - 1].timestamp_ms) return "transcript timestamps decrease";
    }
    if (transcript_.empty() || transcript_.front().kind != EventKind::PreferenceSet) {
      return "transcript does not start with PreferenceSet";
    }
    if ((state_ == SessionState::Finalized) != (transcript_.back().kind == EventKind::Finalized)) {
      return "Finalized event and state disagree";
    }
    return std::nullopt;
  }

  /// Rebuilds a session by re-executing the commands recorded in `events`
  /// and checks that the regenerated events match the recorded ones. The
  /// recorded timestamps are kept. Throws ReplayMismatch on divergence.
  static Session replay(std::string id, const GridMap& map, const std::vector<TranscriptEvent>& events,
                        const SessionConfig& config = {}) {
    if (events.empty() || events.front().kind != EventKind::PreferenceSet) {
      throw Error(ErrorCode::ReplayMismatch, "transcript must start with PreferenceSet");
    }
    auto pref_of = [](const TranscriptEvent& e) { return preference_from_json(e.payload.at("preference")); };
    Session s = start(std::move(id), map, pref_of(events.front()), config);
    try {
      for (std::size_t i = 1; i < events.size(); ++i) {
        const auto& e = events[i];
        switch (e.kind) {
          case EventKind::QuestionAsked:
            s.ask({e.payload.at("state").get<CellIndex>(), action_from_json(e.payload.at("action"))});
            break;
          case EventKind::ConflictDetected: s.submit_preference_update(pref_of(e)); break;
          case EventKind::ConfirmYes: s.confirm(Reply::Yes); break;
          case EventKind::ConfirmNo: s.confirm(Reply::No); break;
          case EventKind::PreferenceSet:
          case EventKind::Explained:
          case EventKind::Finalized: break;  // regenerated by the commands above
        }
      }
    } catch (const Error& err) {
      throw Error(ErrorCode::ReplayMismatch, std::string("replayed command failed: ") + err.what());
    } catch (const json::exception& err) {
      throw Error(ErrorCode::ReplayMismatch, std::string("malformed event payload: ") + err.what());
    }
    if (s.transcript_.size() != events.size()) {
      throw Error(ErrorCode::ReplayMismatch, "replay produced " + std::to_string(s.transcript_.size()) +
                                                 " events, transcript has " + std::to_string(events.size()));
    }
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (s.transcript_[i].kind != events[i].kind || s.transcript_[i].payload != events[i].payload) {
        throw Error(ErrorCode::ReplayMismatch, "event " + std::to_string(i) + " (" +
                                                   std::string(to_string(events[i].kind)) + ") diverges on replay");
      }
    }
    s.transcript_ = events;
    return s;
  }

 private:
  Session(std::string id, const GridMap& map, const SessionConfig& config)
      : id_(std::move(id)), config_(config), mdp_(build_mdp(map, config.motion)) {}

  static std::string_view awaiting_name(SessionState s) {
    switch (s) {
      case SessionState::AwaitingSoftConfirm: return "soft";
      case SessionState::AwaitingHardConfirm: return "hard";
      default: return "done";
    }
  }

  void require_state(SessionState wanted, const char* what) const {
    if (state_ != wanted) {
      throw Error(ErrorCode::WrongState, std::string("cannot ") + what + " in state " + std::string(to_string(state_)));
    }
  }

  void check_capacity(std::size_t extra) const {
    if (transcript_.size() + extra > config_.max_events) {
      throw Error(ErrorCode::EventLimitExceeded, "session event limit of " + std::to_string(config_.max_events) +
                                                     " reached");
    }
  }

  void adopt(Policy policy, Explanation explanation) {
    route_ = extract_route(policy, mdp_);
    policy_ = std::move(policy);
    explanation_ = std::move(explanation);
    state_ = SessionState::Explained;
    prompt_.clear();
    json sentences = json::array();
    for (const auto& s : explanation_->sentences) sentences.push_back(s.text);
    append(EventKind::Explained, json{{"objective", to_string(policy_->objective)},
                                      {"routeStates", explanation_->route_states},
                                      {"sentences", sentences}});
  }

  void clear_pending() {
    pending_.reset();
    pending_policy_.reset();
    pending_explanation_.reset();
  }

  void append(EventKind kind, json payload) {
    using namespace std::chrono;
    std::int64_t now = duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
    if (!transcript_.empty()) now = std::max(now, transcript_.back().timestamp_ms);
    transcript_.push_back({now, kind, std::move(payload)});
  }

  std::string id_;
  SessionConfig config_;
  Mdp mdp_;
  SessionState state_ = SessionState::AwaitingPreference;
  PreferenceTuple preference_{};
  std::optional<PreferenceTuple> pending_;
  std::optional<Policy> pending_policy_;
  std::optional<Explanation> pending_explanation_;
  std::optional<Policy> policy_;
  std::optional<Explanation> explanation_;
  std::optional<Route> route_;
  std::vector<TranscriptEvent> transcript_;
  std::string prompt_;
  bool require_different_ = false;
};

/// Service and CLI view of a session.
inline json session_snapshot(const Session& s) {
  json j{{"id", s.id()},
         {"state", to_string(s.state())},
         {"preference", preference_to_json(s.preference())},
         {"pendingPreference", s.pending_preference() ? preference_to_json(*s.pending_preference()) : json(nullptr)},
         {"explanation", s.explanation() ? explanation_to_json(*s.explanation()) : json(nullptr)},
         {"route", s.route() ? route_to_json(*s.route()) : json(nullptr)},
         {"metrics", metrics_to_json(s.metrics())},
         {"objective", s.policy() ? json(to_string(s.policy()->objective)) : json(nullptr)},
         {"updateCount", s.update_count()},
         {"prompt", s.prompt()}};
  return j;
}

}  // namespace xplain
