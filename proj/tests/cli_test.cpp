#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "support/http_harness.hpp"
#include "xplain/dialogue.hpp"

namespace xplain {
namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;  // stdout and stderr
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string("\"") + XPLAIN_CLI_PATH + "\" " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const std::string kPaperMapFile = std::string(XPLAIN_MAPS_DIR) + "/paper-5x5.map";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override { dir_ = testing::fresh_temp_dir("cli"); }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    auto p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
  }

  std::filesystem::path dir_;
};

TEST_F(CliTest, ValidateMap) {
  auto r = run_cli("validate-map " + kPaperMapFile);
  EXPECT_EQ(r.exit_code, 0) << r.out;
  EXPECT_EQ(r.out, "ok: paper-5x5 5x5\n");

  r = run_cli("validate-map " + write("ragged.map", "S..\n.D\n"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.out.find("RaggedRows"), std::string::npos);

  r = run_cli("validate-map " + (dir_ / "missing.map").string());
  EXPECT_EQ(r.exit_code, 2);

  r = run_cli("--format json validate-map " + kPaperMapFile);
  EXPECT_EQ(json::parse(r.out).at("map").at("width"), 5);
}

TEST_F(CliTest, ExplainGoldens) {
  auto r = run_cli("explain " + kPaperMapFile +
                   " --objective shortest --locality segment:landmark:destination --specificity every-state"
                   " --corpus concrete");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out,
            "The robot moves east in grid 12.\n"
            "The robot moves north in grid 13.\n"
            "The robot moves east in grid 8.\n"
            "The robot moves north in grid 9.\n"
            "The robot stops in grid 4.\n");

  r = run_cli("explain " + kPaperMapFile +
              " --pref '{\"objective\":\"safest\",\"locality\":\"global\",\"specificity\":\"critical-only\","
              "\"corpus\":\"high-level\"}'");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out,
            "The robot moves along the corridor in the start.\n"
            "The robot moves along the corridor in the landmark.\n"
            "The robot stops in the destination.\n");
}

TEST_F(CliTest, ExplainErrors) {
  // The shortest route skirts the crowded centre cell, so selecting it yields nothing.
  auto m = write("plain.map", "S..\n.r.\n..D\n");
  auto r = run_cli("explain " + m + " --locality position:4");
  EXPECT_EQ(r.exit_code, 1) << r.out;
  EXPECT_NE(r.out.find("EmptySelection"), std::string::npos);

  r = run_cli("explain " + kPaperMapFile + " --locality position:3");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.out.find("PositionIsObstacle"), std::string::npos);

  r = run_cli("explain " + kPaperMapFile + " --corpus poetic");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.out.find("InvalidPreference"), std::string::npos);
}

TEST_F(CliTest, PlanPrintsRoute) {
  auto r = run_cli("plan " + kPaperMapFile + " --objective safest");
  ASSERT_EQ(r.exit_code, 0) << r.out;
  auto j = json::parse(r.out);
  EXPECT_EQ(j.at("metrics").at("crowdedEntries"), 0);
  EXPECT_EQ(j.at("route").size(), 9u);
}

TEST_F(CliTest, ScriptedSession) {
  auto script = write("soft.txt", "1\n1\n1\n1\n2\n1\n1\n1\n2\ny\n3\ny\n");
  auto transcript = (dir_ / "t.jsonl").string();
  auto r = run_cli("session " + kPaperMapFile + " --script " + script + " --transcript " + transcript);
  EXPECT_EQ(r.exit_code, 0) << r.out;
  std::ifstream in(transcript);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto events = transcript_from_jsonl(text);
  bool soft = false;
  for (const auto& e : events) soft |= e.kind == EventKind::ConflictDetected && e.payload.value("conflict", "") == "soft";
  EXPECT_TRUE(soft);
  EXPECT_EQ(events.back().kind, EventKind::Finalized);

  r = run_cli("session " + kPaperMapFile + " --script " + write("eof.txt", "1\n"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.out.find("Session aborted"), std::string::npos);

  r = run_cli("--format json session " + kPaperMapFile + " --script " + write("done.txt", "1\n1\n1\n1\n3\ny\n"));
  EXPECT_EQ(r.exit_code, 0);
  auto snap = r.out.substr(r.out.find("Session finalized"));
  snap = snap.substr(snap.find('\n') + 1);
  EXPECT_EQ(json::parse(snap).at("updateCount"), 0);
}

TEST_F(CliTest, ExplainMatchesService) {
  auto data = dir_ / "data";
  testing::LiveService live(data);
  auto c = live.client();
  const std::vector<std::string> prefs = {"global", "only:corridor", "only:crowded", "segment:start:landmark",
                                          "position:12"};
  for (const auto& objective : {"shortest", "safest", "combined"}) {
    for (const auto& loc : prefs) {
      for (const auto& corpus : {"concrete", "high-level"}) {
        json pref{{"objective", objective}, {"locality", loc}, {"specificity", "every-state"}, {"corpus", corpus}};
        auto snap = testing::post_json(c, "/v1/sessions", {{"mapId", "paper-5x5"}, {"preference", pref}});
        auto r = run_cli("explain " + kPaperMapFile + " --pref '" + pref.dump() + "'");
        if (snap.status != 201) {
          EXPECT_EQ(r.exit_code, 1);
          continue;
        }
        std::string expected;
        for (const auto& s : snap.body.at("explanation").at("sentences")) {
          expected += s.at("text").get<std::string>() + "\n";
        }
        EXPECT_EQ(r.out, expected) << pref.dump();
      }
    }
  }
}

}  // namespace
}  // namespace xplain
