#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "xplain/error.hpp"
#include "xplain/map.hpp"
#include "xplain/planner.hpp"

namespace xplain {

namespace locality {

struct Global {
  friend bool operator==(const Global&, const Global&) = default;
};

// Corridor ("only highways") or Crowded ("only alleyways").
struct CellKindOnly {
  CellKind kind;
  friend bool operator==(const CellKindOnly&, const CellKindOnly&) = default;
};

struct Segment {
  CellKind from;
  CellKind to;
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct SinglePosition {
  CellIndex state;
  friend bool operator==(const SinglePosition&, const SinglePosition&) = default;
};

}  // namespace locality

using Locality = std::variant<locality::Global, locality::CellKindOnly, locality::Segment, locality::SinglePosition>;

enum class Specificity { EveryState, CriticalOnly };
enum class Corpus { Concrete, HighLevel };
enum class ConflictKind { None, Soft, Hard };

struct PreferenceTuple {
  Objective objective = Objective::ShortestPath;
  Locality locality = locality::Global{};
  Specificity specificity = Specificity::EveryState;
  Corpus corpus = Corpus::Concrete;

  friend bool operator==(const PreferenceTuple&, const PreferenceTuple&) = default;
};

constexpr std::string_view to_string(Specificity sp) {
  return sp == Specificity::EveryState ? "every-state" : "critical-only";
}

constexpr std::string_view to_string(Corpus co) { return co == Corpus::Concrete ? "concrete" : "high-level"; }

constexpr std::string_view to_string(ConflictKind k) {
  switch (k) {
    case ConflictKind::None: return "none";
    case ConflictKind::Soft: return "soft";
    case ConflictKind::Hard: return "hard";
  }
  return "?";
}

inline std::optional<Specificity> specificity_from_string(std::string_view s) {
  if (s == "every-state") return Specificity::EveryState;
  if (s == "critical-only") return Specificity::CriticalOnly;
  return std::nullopt;
}

inline std::optional<Corpus> corpus_from_string(std::string_view s) {
  if (s == "concrete") return Corpus::Concrete;
  if (s == "high-level") return Corpus::HighLevel;
  return std::nullopt;
}

inline std::optional<ConflictKind> conflict_kind_from_string(std::string_view s) {
  for (auto k : {ConflictKind::None, ConflictKind::Soft, ConflictKind::Hard}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

// "global" | "only:corridor" | "only:crowded" | "segment:<kind>:<kind>" | "position:<cell>"
inline std::string to_string(const Locality& lo) {
  struct Visitor {
    std::string operator()(const locality::Global&) const { return "global"; }
    std::string operator()(const locality::CellKindOnly& k) const { return "only:" + std::string(to_string(k.kind)); }
    std::string operator()(const locality::Segment& s) const {
      return "segment:" + std::string(to_string(s.from)) + ":" + std::string(to_string(s.to));
    }
    std::string operator()(const locality::SinglePosition& p) const { return "position:" + std::to_string(p.state); }
  };
  return std::visit(Visitor{}, lo);
}

inline Locality locality_from_string(std::string_view s) {
  auto fail = [&](const std::string& why) -> Locality {
    throw Error(ErrorCode::InvalidPreference, "locality '" + std::string(s) + "': " + why);
  };
  if (s == "global") return locality::Global{};
  if (s.starts_with("only:")) {
    auto kind = cell_kind_from_string(s.substr(5));
    if (!kind || (*kind != CellKind::Corridor && *kind != CellKind::Crowded)) {
      return fail("only corridor or crowded cells can be selected");
    }
    return locality::CellKindOnly{*kind};
  }
  if (s.starts_with("segment:")) {
    auto rest = s.substr(8);
    auto colon = rest.find(':');
    if (colon == std::string_view::npos) return fail("expected segment:<kind>:<kind>");
    auto from = cell_kind_from_string(rest.substr(0, colon));
    auto to = cell_kind_from_string(rest.substr(colon + 1));
    if (!from || !to) return fail("unknown cell kind");
    if (*from == CellKind::Obstacle || *to == CellKind::Obstacle) return fail("obstacles are never on a route");
    return locality::Segment{*from, *to};
  }
  if (s.starts_with("position:")) {
    auto digits = s.substr(9);
    CellIndex cell = -1;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cell);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) {
      return fail("expected position:<cell index>");
    }
    return locality::SinglePosition{cell};
  }
  return fail("unrecognized locality");
}

/// Hard iff the objective changed; otherwise Soft iff any other element
/// changed; otherwise None. Soft is a single kind no matter how many of the
/// non-objective elements changed.
inline ConflictKind classify_conflict(const PreferenceTuple& previous, const PreferenceTuple& updated) {
  if (previous.objective != updated.objective) return ConflictKind::Hard;
  if (previous.locality != updated.locality || previous.specificity != updated.specificity ||
      previous.corpus != updated.corpus) {
    return ConflictKind::Soft;
  }
  return ConflictKind::None;
}

struct Violation {
  std::string code;
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

// Raised when a preference fails validate_preference against a map.
class PreferenceRejected : public Error {
 public:
  explicit PreferenceRejected(std::vector<Violation> violations)
      : Error(ErrorCode::PreferenceViolation, summarize(violations)), violations_(std::move(violations)) {}

  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  static std::string summarize(const std::vector<Violation>& vs) {
    std::string out;
    for (const auto& v : vs) {
      if (!out.empty()) out += "; ";
      out += v.code + " (" + v.message + ")";
    }
    return out;
  }

  std::vector<Violation> violations_;
};

inline std::vector<Violation> validate_preference(const PreferenceTuple& pref, const GridMap& map) {
  std::vector<Violation> out;
  if (const auto* p = std::get_if<locality::SinglePosition>(&pref.locality)) {
    if (!map.contains(p->state)) {
      out.push_back({"PositionOffGrid", "cell " + std::to_string(p->state) + " is outside the map"});
    } else if (map.is_obstacle(p->state)) {
      out.push_back({"PositionIsObstacle", "cell " + std::to_string(p->state) + " is an obstacle"});
    }
  } else if (const auto* seg = std::get_if<locality::Segment>(&pref.locality)) {
    for (auto k : {seg->from, seg->to}) {
      if (k == CellKind::Obstacle || !map.has_kind(k)) {
        out.push_back({"SegmentKindAbsent", "the map has no " + std::string(to_string(k)) + " cell"});
      }
    }
  } else if (const auto* only = std::get_if<locality::CellKindOnly>(&pref.locality)) {
    if (only->kind != CellKind::Corridor && only->kind != CellKind::Crowded) {
      out.push_back({"InvalidKindFilter", "only corridor or crowded cells can be selected"});
    }
  }
  return out;
}

}  // namespace xplain
