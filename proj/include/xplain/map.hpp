#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

#include "xplain/error.hpp"

namespace xplain {

using CellIndex = int;

enum class CellKind { Start, Destination, Obstacle, Landmark, Crowded, Corridor };

enum class MoveAction { North, East, South, West, Stop };

// Tie-break order used wherever actions are enumerated.
inline constexpr std::array<MoveAction, 5> kAllActions = {
    MoveAction::North, MoveAction::East, MoveAction::South, MoveAction::West, MoveAction::Stop};

inline constexpr std::array<MoveAction, 4> kMoves = {
    MoveAction::North, MoveAction::East, MoveAction::South, MoveAction::West};

constexpr char to_char(CellKind kind) {
  switch (kind) {
    case CellKind::Start: return 'S';
    case CellKind::Destination: return 'D';
    case CellKind::Obstacle: return '#';
    case CellKind::Landmark: return '*';
    case CellKind::Crowded: return 'r';
    case CellKind::Corridor: return '.';
  }
  return '?';
}

constexpr std::optional<CellKind> cell_kind_from_char(char c) {
  switch (c) {
    case 'S': return CellKind::Start;
    case 'D': return CellKind::Destination;
    case '#': return CellKind::Obstacle;
    case '*': return CellKind::Landmark;
    case 'r': return CellKind::Crowded;
    case '.': return CellKind::Corridor;
    default: return std::nullopt;
  }
}

constexpr std::string_view to_string(CellKind kind) {
  switch (kind) {
    case CellKind::Start: return "start";
    case CellKind::Destination: return "destination";
    case CellKind::Obstacle: return "obstacle";
    case CellKind::Landmark: return "landmark";
    case CellKind::Crowded: return "crowded";
    case CellKind::Corridor: return "corridor";
  }
  return "?";
}

inline std::optional<CellKind> cell_kind_from_string(std::string_view s) {
  for (auto k : {CellKind::Start, CellKind::Destination, CellKind::Obstacle, CellKind::Landmark,
                 CellKind::Crowded, CellKind::Corridor}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

// Start, landmark and destination cells are the critical states.
constexpr bool is_critical(CellKind kind) {
  return kind == CellKind::Start || kind == CellKind::Landmark || kind == CellKind::Destination;
}

constexpr std::string_view to_string(MoveAction a) {
  switch (a) {
    case MoveAction::North: return "north";
    case MoveAction::East: return "east";
    case MoveAction::South: return "south";
    case MoveAction::West: return "west";
    case MoveAction::Stop: return "stop";
  }
  return "?";
}

inline std::optional<MoveAction> move_action_from_string(std::string_view s) {
  for (auto a : kAllActions) {
    if (to_string(a) == s) return a;
  }
  return std::nullopt;
}

// The two moves at right angles to `a`. Empty for Stop.
inline std::vector<MoveAction> perpendicular(MoveAction a) {
  switch (a) {
    case MoveAction::North:
    case MoveAction::South: return {MoveAction::East, MoveAction::West};
    case MoveAction::East:
    case MoveAction::West: return {MoveAction::North, MoveAction::South};
    case MoveAction::Stop: return {};
  }
  return {};
}

/// Rectangular grid of cells stored row-major; row 0 is the top row.
///
/// Construction through `parse_map` (or the validating constructor) guarantees
/// exactly one start, exactly one destination and an obstacle-free path
/// between them.
class GridMap {
 public:
  GridMap(int width, int height, std::vector<CellKind> cells, std::string name = "map")
      : width_(width), height_(height), cells_(std::move(cells)), name_(std::move(name)) {
    validate();
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int size() const noexcept { return width_ * height_; }
  const std::string& name() const noexcept { return name_; }
  const std::vector<CellKind>& cells() const noexcept { return cells_; }

  CellKind kind(CellIndex cell) const { return cells_.at(static_cast<std::size_t>(cell)); }
  bool contains(CellIndex cell) const noexcept { return cell >= 0 && cell < size(); }
  bool is_obstacle(CellIndex cell) const { return kind(cell) == CellKind::Obstacle; }

  CellIndex index(int row, int col) const noexcept { return row * width_ + col; }
  int row(CellIndex cell) const noexcept { return cell / width_; }
  int col(CellIndex cell) const noexcept { return cell % width_; }

  CellIndex start() const noexcept { return start_; }
  CellIndex destination() const noexcept { return destination_; }

  // Cell reached by taking `a` from `cell`, if it is on the grid and not an
  // obstacle. Stop returns the cell itself.
  std::optional<CellIndex> neighbor(CellIndex cell, MoveAction a) const {
    int r = row(cell);
    int c = col(cell);
    switch (a) {
      case MoveAction::North: --r; break;
      case MoveAction::East: ++c; break;
      case MoveAction::South: ++r; break;
      case MoveAction::West: --c; break;
      case MoveAction::Stop: return cell;
    }
    if (r < 0 || r >= height_ || c < 0 || c >= width_) return std::nullopt;
    CellIndex next = index(r, c);
    if (is_obstacle(next)) return std::nullopt;
    return next;
  }

  std::vector<CellIndex> cells_of_kind(CellKind k) const {
    std::vector<CellIndex> out;
    for (CellIndex i = 0; i < size(); ++i) {
      if (cells_[static_cast<std::size_t>(i)] == k) out.push_back(i);
    }
    return out;
  }

  bool has_kind(CellKind k) const { return std::find(cells_.begin(), cells_.end(), k) != cells_.end(); }

  friend bool operator==(const GridMap& a, const GridMap& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.cells_ == b.cells_;
  }

 private:
  void validate() {
    if (width_ <= 0 || height_ <= 0) throw Error(ErrorCode::EmptyMap, "map has no cells");
    if (cells_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
      throw Error(ErrorCode::RaggedRows, "cell count does not match width x height");
    }
    auto starts = cells_of_kind(CellKind::Start);
    auto dests = cells_of_kind(CellKind::Destination);
    if (starts.empty()) throw Error(ErrorCode::MissingStart, "no start cell 'S'");
    if (starts.size() > 1) throw Error(ErrorCode::DuplicateStart, "more than one start cell 'S'");
    if (dests.empty()) throw Error(ErrorCode::MissingDestination, "no destination cell 'D'");
    if (dests.size() > 1) {
      throw Error(ErrorCode::DuplicateDestination, "more than one destination cell 'D'");
    }
    start_ = starts.front();
    destination_ = dests.front();

    std::vector<bool> seen(cells_.size(), false);
    std::queue<CellIndex> frontier;
    frontier.push(start_);
    seen[static_cast<std::size_t>(start_)] = true;
    while (!frontier.empty()) {
      CellIndex cur = frontier.front();
      frontier.pop();
      for (auto a : kMoves) {
        if (auto next = neighbor(cur, a); next && !seen[static_cast<std::size_t>(*next)]) {
          seen[static_cast<std::size_t>(*next)] = true;
          frontier.push(*next);
        }
      }
    }
    if (!seen[static_cast<std::size_t>(destination_)]) {
      throw Error(ErrorCode::UnreachableDestination, "no obstacle-free path from start to destination");
    }
  }

  int width_;
  int height_;
  std::vector<CellKind> cells_;
  std::string name_;
  CellIndex start_ = 0;
  CellIndex destination_ = 0;
};

/// Parses the plain-text map format: one character per cell, legend
/// S (start), D (destination), # (obstacle), * (landmark), r (crowded),
/// . (corridor). LF and CRLF line endings are accepted; trailing blank lines
/// and trailing whitespace are ignored.
inline GridMap parse_map(std::string_view text, std::string name = "map") {
  std::vector<std::string> rows;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.remove_suffix(1);
    }
    rows.emplace_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  while (!rows.empty() && rows.back().empty()) rows.pop_back();
  if (rows.empty()) throw Error(ErrorCode::EmptyMap, "map text is empty");

  const std::size_t width = rows.front().size();
  std::vector<CellKind> cells;
  cells.reserve(width * rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw Error(ErrorCode::RaggedRows, "row " + std::to_string(r) + " has length " +
                                             std::to_string(rows[r].size()) + ", expected " +
                                             std::to_string(width));
    }
    for (std::size_t c = 0; c < width; ++c) {
      auto kind = cell_kind_from_char(rows[r][c]);
      if (!kind) {
        throw Error(ErrorCode::UnknownCell, std::string("illegal character '") + rows[r][c] + "' at row " +
                                                std::to_string(r) + ", column " + std::to_string(c));
      }
      cells.push_back(*kind);
    }
  }
  return GridMap(static_cast<int>(width), static_cast<int>(rows.size()), std::move(cells), std::move(name));
}

inline std::string serialize_map(const GridMap& map) {
  std::string out;
  out.reserve(static_cast<std::size_t>((map.width() + 1) * map.height()));
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) out.push_back(to_char(map.kind(map.index(r, c))));
    out.push_back('\n');
  }
  return out;
}

// The 5x5 example map: start at grid 20, destination at grid 4, landmark at
// grid 12, obstacles at 3 and 7, crowded passage at 10 and 11.
inline constexpr std::string_view kPaperMapText =
    "...#D\n"
    "..#..\n"
    "rr*..\n"
    ".....\n"
    "S....\n";

inline constexpr std::string_view kPaperMapId = "paper-5x5";

inline GridMap paper_map() { return parse_map(kPaperMapText, std::string(kPaperMapId)); }

}  // namespace xplain
