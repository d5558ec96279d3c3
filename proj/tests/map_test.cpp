#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "support/oracles.hpp"
#include "xplain/map.hpp"

namespace xplain {
namespace {

ErrorCode parse_error(std::string_view text) {
  try {
    parse_map(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a parse error for:\n" << text;
  return ErrorCode::Io;
}

TEST(ParseMap, MinimalMap) {
  auto m = parse_map("SD");
  EXPECT_EQ(m.width(), 2);
  EXPECT_EQ(m.height(), 1);
  EXPECT_EQ(m.cells(), (std::vector<CellKind>{CellKind::Start, CellKind::Destination}));
}

TEST(ParseMap, PaperMapLayout) {
  auto m = paper_map();
  EXPECT_EQ(m.width(), 5);
  EXPECT_EQ(m.height(), 5);
  EXPECT_EQ(m.start(), 20);
  EXPECT_EQ(m.destination(), 4);
  EXPECT_EQ(m.cells_of_kind(CellKind::Landmark), std::vector<CellIndex>{12});
  EXPECT_EQ(m.cells_of_kind(CellKind::Obstacle), (std::vector<CellIndex>{3, 7}));
  EXPECT_EQ(m.cells_of_kind(CellKind::Crowded), (std::vector<CellIndex>{10, 11}));
  EXPECT_EQ(m.name(), "paper-5x5");
}

TEST(ParseMap, BundledFileMatchesEmbeddedText) {
  std::ifstream in(XPLAIN_MAPS_DIR "/paper-5x5.map");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(parse_map(ss.str()), paper_map());
}

TEST(ParseMap, Errors) {
  EXPECT_EQ(parse_error("S#\n#D"), ErrorCode::UnreachableDestination);
  EXPECT_EQ(parse_error("S..\nD."), ErrorCode::RaggedRows);
  EXPECT_EQ(parse_error("S.x\n..D"), ErrorCode::UnknownCell);
  EXPECT_EQ(parse_error("...\n..D"), ErrorCode::MissingStart);
  EXPECT_EQ(parse_error("S..\n..."), ErrorCode::MissingDestination);
  EXPECT_EQ(parse_error("SS.\n..D"), ErrorCode::DuplicateStart);
  EXPECT_EQ(parse_error("S.D\n..D"), ErrorCode::DuplicateDestination);
  EXPECT_EQ(parse_error(""), ErrorCode::EmptyMap);
  EXPECT_EQ(parse_error("\n\n"), ErrorCode::EmptyMap);
}

TEST(ParseMap, AcceptsCrlfAndTrailingWhitespace) {
  auto m = parse_map("S.\r\n.D  \r\n\r\n");
  EXPECT_EQ(m.width(), 2);
  EXPECT_EQ(m.height(), 2);
  EXPECT_EQ(m.destination(), 3);
}

TEST(GridMap, IndexingAndNeighbors) {
  auto m = paper_map();
  EXPECT_EQ(m.index(4, 0), 20);
  EXPECT_EQ(m.row(12), 2);
  EXPECT_EQ(m.col(12), 2);
  EXPECT_EQ(m.neighbor(13, MoveAction::North), 8);
  EXPECT_EQ(m.neighbor(13, MoveAction::East), 14);
  EXPECT_EQ(m.neighbor(13, MoveAction::South), 18);
  EXPECT_EQ(m.neighbor(13, MoveAction::West), 12);
  EXPECT_EQ(m.neighbor(8, MoveAction::North), std::nullopt);  // obstacle 3
  EXPECT_EQ(m.neighbor(20, MoveAction::West), std::nullopt);  // off grid
  EXPECT_EQ(m.neighbor(4, MoveAction::Stop), 4);
}

TEST(SerializeMap, RoundTripProperty) {
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    auto m = testing::random_map(rng);
    auto text = serialize_map(m);
    EXPECT_EQ(serialize_map(parse_map(text)), text);
    EXPECT_EQ(parse_map(text), m);
  }
  EXPECT_EQ(serialize_map(paper_map()), kPaperMapText);
}

}  // namespace
}  // namespace xplain
