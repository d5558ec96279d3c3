#pragma once

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "xplain/dialogue.hpp"
#include "xplain/json.hpp"

// Line-oriented terminal rendition of the interactive session loop.
namespace xplain {

inline char route_arrow(MoveAction a) {
  switch (a) {
    case MoveAction::North: return '^';
    case MoveAction::East: return '>';
    case MoveAction::South: return 'v';
    case MoveAction::West: return '<';
    case MoveAction::Stop: return 'o';
  }
  return ' ';
}

// Map legend characters, each followed by the route arrow of that cell (if any).
inline std::string render_ascii(const GridMap& map, const Route* route = nullptr) {
  std::vector<char> arrows(static_cast<std::size_t>(map.size()), ' ');
  if (route) {
    for (const auto& st : route->steps) arrows[static_cast<std::size_t>(st.state)] = route_arrow(st.action);
  }
  std::ostringstream out;
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      CellIndex i = map.index(r, c);
      out << to_char(map.kind(i)) << arrows[static_cast<std::size_t>(i)];
      if (c + 1 < map.width()) out << ' ';
    }
    out << '\n';
  }
  out << "legend: S start, D destination, # obstacle, * landmark, r crowded, . corridor; "
         "route ^ > v < (o = stop)\n";
  return out.str();
}

struct TerminalResult {
  int exit_code = 0;
  std::optional<Session> session;
};

class TerminalSession {
 public:
  TerminalSession(GridMap map, std::istream& in, std::ostream& out, SessionConfig config = {})
      : map_(std::move(map)), in_(in), out_(out), config_(config) {}

  /// Runs until the session is finalized (exit 0) or input ends (exit 1).
  TerminalResult run(std::string session_id = "terminal") {
    out_ << "Map " << map_.name() << " (" << map_.width() << "x" << map_.height() << ")\n" << render_ascii(map_);
    try {
      while (!session_) {
        out_ << "Choose your preferences.\n";
        auto pref = elicit_preference();
        try {
          session_ = Session::start(session_id, map_, pref, config_);
        } catch (const Error& e) {
          out_ << "error: " << e.what() << "\n";
        }
      }
      show_plan();
      while (session_->state() != SessionState::Finalized) {
        int choice = menu("What next?", {"ask a question", "update preferences", "next (finish)"});
        if (choice == 1) {
          ask_question();
        } else if (choice == 2) {
          out_ << "Choose your updated preferences.\n";
          submit(elicit_preference());
        } else {
          submit(session_->preference());
        }
      }
    } catch (const EndOfInput&) {
      out_ << "\nSession aborted (end of input).\n";
      return {1, std::move(session_)};
    }
    out_ << "Session finalized after " << session_->update_count() << " preference update(s).\n";
    return {0, std::move(session_)};
  }

 private:
  struct EndOfInput {};

  std::string read_line() {
    std::string line;
    if (!std::getline(in_, line)) throw EndOfInput{};
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    while (!line.empty() && line.front() == ' ') line.erase(line.begin());
    return line;
  }

  int read_number(int lo, int hi) {
    while (true) {
      out_ << "> " << std::flush;
      std::string line = read_line();
      try {
        std::size_t used = 0;
        int v = std::stoi(line, &used);
        if (used == line.size() && v >= lo && v <= hi) return v;
      } catch (const std::exception&) {
      }
      out_ << "Please enter a number from " << lo << " to " << hi << ".\n";
    }
  }

  int menu(const std::string& title, const std::vector<std::string>& options) {
    out_ << title << "\n";
    for (std::size_t i = 0; i < options.size(); ++i) out_ << "  " << i + 1 << ") " << options[i] << "\n";
    return read_number(1, static_cast<int>(options.size()));
  }

  bool yes_no(const std::string& question) {
    out_ << question << " [y/n]\n";
    while (true) {
      out_ << "> " << std::flush;
      std::string line = read_line();
      if (line == "y" || line == "yes") return true;
      if (line == "n" || line == "no") return false;
      out_ << "Please answer y or n.\n";
    }
  }

  CellKind pick_kind(const std::string& title) {
    static const std::vector<CellKind> kinds = {CellKind::Start, CellKind::Landmark, CellKind::Destination,
                                                CellKind::Corridor, CellKind::Crowded};
    std::vector<std::string> names;
    for (auto k : kinds) names.emplace_back(to_string(k));
    return kinds[static_cast<std::size_t>(menu(title, names) - 1)];
  }

  PreferenceTuple elicit_preference() {
    PreferenceTuple p;
    static const Objective objectives[] = {Objective::ShortestPath, Objective::SafestPath,
                                           Objective::ShortestAndSafest};
    p.objective = objectives[menu("Objective:", {"shortest path", "safest path", "shortest and safest path"}) - 1];
    switch (menu("Locality:", {"global", "only corridors (highways)", "only crowded passages (alleyways)",
                               "segment between two cell kinds", "single position"})) {
      case 1: p.locality = locality::Global{}; break;
      case 2: p.locality = locality::CellKindOnly{CellKind::Corridor}; break;
      case 3: p.locality = locality::CellKindOnly{CellKind::Crowded}; break;
      case 4: {
        CellKind from = pick_kind("Segment starts at:");
        CellKind to = pick_kind("Segment ends at:");
        p.locality = locality::Segment{from, to};
        break;
      }
      default:
        out_ << "Cell index:\n";
        p.locality = locality::SinglePosition{read_number(0, map_.size() - 1)};
        break;
    }
    p.specificity = menu("Specificity:", {"every state", "critical states only"}) == 1 ? Specificity::EveryState
                                                                                       : Specificity::CriticalOnly;
    p.corpus = menu("Corpus:", {"concrete", "high-level"}) == 1 ? Corpus::Concrete : Corpus::HighLevel;
    return p;
  }

  void show_plan() {
    const auto m = session_->metrics();
    out_ << "Objective: " << to_string(session_->preference().objective) << "; route of " << m.moves
         << " moves entering " << m.crowded_entries << " crowded cell(s)\n"
         << render_ascii(map_, &*session_->route()) << "Explanation:\n";
    const auto& sentences = session_->explanation()->sentences;
    for (std::size_t i = 0; i < sentences.size(); ++i) out_ << "  " << i + 1 << ". " << sentences[i].text << "\n";
  }

  void ask_question() {
    const auto& sentences = session_->explanation()->sentences;
    const auto vocab = session_->vocabulary();
    std::vector<std::string> questions;
    for (const auto& s : sentences) questions.push_back(question_text(vocab, s.state, s.action));
    const auto& picked = sentences[static_cast<std::size_t>(menu("Which question?", questions) - 1)];
    out_ << session_->ask({picked.state, picked.action}).text << "\n";
  }

  void submit(const PreferenceTuple& pref) {
    Prompt prompt;
    try {
      prompt = session_->submit_preference_update(pref);
    } catch (const Error& e) {
      out_ << "error: " << e.what() << "\n";
      return;
    }
    out_ << "Conflict: " << to_string(prompt.conflict) << "\n";
    const bool yes = yes_no(prompt.text);
    const auto& follow_up = session_->confirm(yes ? Reply::Yes : Reply::No);
    if (session_->state() == SessionState::Finalized) return;
    if (yes) {
      show_plan();
    } else {
      out_ << follow_up << "\n";
    }
  }

  GridMap map_;
  std::istream& in_;
  std::ostream& out_;
  SessionConfig config_;
  std::optional<Session> session_;
};

}  // namespace xplain
