#include <gtest/gtest.h>

#include <fstream>
#include <thread>

#include "support/http_harness.hpp"
#include "xplain/service.hpp"

namespace xplain {
namespace {

using testing::get;
using testing::post_json;

const json kSegmentPref{{"version", "v1"},
                        {"objective", "shortest"},
                        {"locality", "segment:landmark:destination"},
                        {"specificity", "every-state"},
                        {"corpus", "concrete"}};

json with(json pref, const std::string& key, const std::string& value) {
  pref[key] = value;
  return pref;
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::fresh_temp_dir("service");
    live_ = std::make_unique<testing::LiveService>(dir_);
  }
  void TearDown() override {
    live_.reset();
    std::filesystem::remove_all(dir_);
  }

  json new_session(const json& pref = kSegmentPref) {
    auto c = live_->client();
    auto r = post_json(c, "/v1/sessions", {{"mapId", "paper-5x5"}, {"preference", pref}});
    EXPECT_EQ(r.status, 201) << r.raw;
    return r.body;
  }

  std::filesystem::path dir_;
  std::unique_ptr<testing::LiveService> live_;
};

TEST_F(ServiceTest, CreateMaps) {
  auto c = live_->client();
  auto r = testing::to_result(c.Post("/v1/maps", "SD", "text/plain"));
  EXPECT_EQ(r.status, 201);
  EXPECT_EQ(r.body.at("width"), 2);

  r = testing::to_result(c.Post("/v1/maps", "S..\n.D", "text/plain"));
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body.at("code"), "RaggedRows");

  r = testing::to_result(c.Post("/v1/maps?name=copy", std::string(kPaperMapText), "text/plain"));
  EXPECT_EQ(r.status, 201);
  EXPECT_EQ(r.body.at("cellCount"), 25);
  EXPECT_EQ(r.body.at("name"), "copy");
  auto id = r.body.at("id").get<std::string>();
  EXPECT_EQ(get(c, "/v1/maps/" + id).body.at("text"), kPaperMapText);
  EXPECT_EQ(get(c, "/v1/maps/paper-5x5").body.at("cellCount"), 25);
  EXPECT_EQ(get(c, "/v1/maps/nope").status, 404);
  EXPECT_EQ(get(c, "/v1/maps").body.size(), 3u);
}

TEST_F(ServiceTest, CreateSession) {
  auto snap = new_session();
  EXPECT_EQ(snap.at("state"), "explained");
  EXPECT_EQ(snap.at("mapId"), "paper-5x5");
  std::vector<std::string> sentences;
  for (const auto& s : snap.at("explanation").at("sentences")) sentences.push_back(s.at("text"));
  EXPECT_EQ(sentences, (std::vector<std::string>{"The robot moves east in grid 12.", "The robot moves north in grid 13.",
                                                 "The robot moves east in grid 8.", "The robot moves north in grid 9.",
                                                 "The robot stops in grid 4."}));
  EXPECT_EQ(snap.at("metrics").at("moves"), 8);
  EXPECT_EQ(snap.at("metrics").at("crowdedEntries"), 2);
  EXPECT_EQ(snap.at("route").size(), 9u);

  auto c = live_->client();
  auto r = post_json(c, "/v1/sessions", {{"mapId", "missing"}, {"preference", kSegmentPref}});
  EXPECT_EQ(r.status, 404);
  EXPECT_EQ(r.body.at("code"), "UnknownMap");

  r = post_json(c, "/v1/sessions", {{"mapId", "paper-5x5"}, {"preference", with(kSegmentPref, "locality", "position:3")}});
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(r.body.at("code"), "PositionIsObstacle");
  EXPECT_EQ(r.body.at("details").at(0).at("code"), "PositionIsObstacle");

  r = post_json(c, "/v1/sessions", {{"mapId", "paper-5x5"}, {"preference", with(kSegmentPref, "corpus", "poetic")}});
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body.at("code"), "InvalidPreference");

  r = testing::to_result(c.Post("/v1/sessions", "{not json", "application/json"));
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body.at("code"), "BadRequest");
}

TEST_F(ServiceTest, QuestionsAndConflicts) {
  auto id = new_session().at("id").get<std::string>();
  auto c = live_->client();
  const std::string base = "/v1/sessions/" + id;

  auto r = post_json(c, base + "/question", {{"state", 12}, {"action", "east"}});
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body.at("answer"),
            "The robot moves east in grid 12, because it is part of the optimal robotic plan to achieve the shortest "
            "route, while taking a different action in grid 12 cannot guarantee the shortest route.");
  EXPECT_EQ(post_json(c, base + "/question", {{"state", 24}, {"action", "north"}}).status, 422);
  EXPECT_EQ(post_json(c, base + "/question", {{"state", 12}, {"action", "up"}}).status, 400);

  r = post_json(c, base + "/preference", with(kSegmentPref, "objective", "safest"));
  EXPECT_EQ(r.body.at("conflict"), "hard");
  EXPECT_NE(r.body.at("prompt").get<std::string>().find("planning objective"), std::string::npos);
  EXPECT_EQ(post_json(c, base + "/confirm", {{"reply", "no"}}).body.at("state"), "explained");

  r = post_json(c, base + "/preference", kSegmentPref);
  EXPECT_EQ(r.body.at("conflict"), "none");
  EXPECT_EQ(post_json(c, base + "/confirm", {{"reply", "maybe"}}).status, 400);
  auto snap = post_json(c, base + "/confirm", {{"reply", "yes"}});
  EXPECT_EQ(snap.body.at("state"), "finalized");
  EXPECT_EQ(post_json(c, base + "/question", {{"state", 12}, {"action", "east"}}).status, 409);
  EXPECT_EQ(post_json(c, base + "/confirm", {{"reply", "yes"}}).status, 409);
  EXPECT_EQ(get(c, "/v1/sessions/unknown").status, 404);
  EXPECT_EQ(post_json(c, "/v1/sessions/unknown/question", {{"state", 12}, {"action", "east"}}).status, 404);
}

TEST_F(ServiceTest, Transcript) {
  auto id = new_session().at("id").get<std::string>();
  auto c = live_->client();
  const std::string base = "/v1/sessions/" + id;
  auto kinds = [&] {
    std::vector<std::string> out;
    for (const auto& e : transcript_from_jsonl(c.Get(base + "/transcript")->body)) {
      out.emplace_back(to_string(e.kind));
    }
    return out;
  };
  EXPECT_EQ(kinds(), (std::vector<std::string>{"PreferenceSet", "Explained"}));
  post_json(c, base + "/question", {{"state", 13}, {"action", "north"}});
  EXPECT_EQ(kinds().back(), "QuestionAsked");
  post_json(c, base + "/preference", kSegmentPref);
  post_json(c, base + "/confirm", {{"reply", "yes"}});
  EXPECT_EQ(kinds().back(), "Finalized");
  EXPECT_EQ(c.Get(base + "/transcript")->get_header_value("Content-Type"), "application/x-ndjson");
  EXPECT_EQ(c.Get("/v1/sessions/unknown/transcript")->status, 404);
}

TEST_F(ServiceTest, ReadsDoNotMutate) {
  auto id = new_session().at("id").get<std::string>();
  auto c = live_->client();
  const std::string base = "/v1/sessions/" + id;
  auto before = get(c, base).raw + c.Get(base + "/transcript")->body;
  for (int i = 0; i < 3; ++i) {
    get(c, base);
    c.Get(base + "/transcript");
    get(c, "/v1/maps");
  }
  EXPECT_EQ(get(c, base).raw + c.Get(base + "/transcript")->body, before);
}

TEST_F(ServiceTest, RestartPreservesSnapshots) {
  auto c = live_->client();
  auto map_id = testing::to_result(c.Post("/v1/maps", "S.r.\n..*D", "text/plain")).body.at("id").get<std::string>();
  std::vector<std::string> ids;
  ids.push_back(new_session().at("id"));
  ids.push_back(post_json(c, "/v1/sessions",
                          {{"mapId", map_id}, {"preference", with(kSegmentPref, "locality", "global")}})
                    .body.at("id"));
  post_json(c, "/v1/sessions/" + ids[0] + "/preference", with(kSegmentPref, "corpus", "high-level"));
  post_json(c, "/v1/sessions/" + ids[1] + "/preference", with(kSegmentPref, "locality", "global"));
  post_json(c, "/v1/sessions/" + ids[1] + "/confirm", {{"reply", "yes"}});

  std::vector<std::string> snapshots, transcripts;
  for (const auto& id : ids) {
    snapshots.push_back(get(c, "/v1/sessions/" + id).raw);
    transcripts.push_back(c.Get("/v1/sessions/" + id + "/transcript")->body);
  }
  live_.reset();
  live_ = std::make_unique<testing::LiveService>(dir_);
  auto c2 = live_->client();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    EXPECT_EQ(get(c2, "/v1/sessions/" + ids[i]).raw, snapshots[i]);
    EXPECT_EQ(c2.Get("/v1/sessions/" + ids[i] + "/transcript")->body, transcripts[i]);
  }
  EXPECT_EQ(get(c2, "/v1/maps/" + map_id).status, 200);
  // Pending confirmation survives the restart.
  EXPECT_EQ(post_json(c2, "/v1/sessions/" + ids[0] + "/confirm", {{"reply", "yes"}}).body.at("updateCount"), 1);
}

TEST_F(ServiceTest, ConcurrentSessions) {
  std::vector<std::thread> workers;
  std::atomic<int> failures{0};
  for (int t = 0; t < 4; ++t) {
    workers.emplace_back([&] {
      auto c = live_->client();
      auto r = post_json(c, "/v1/sessions", {{"mapId", "paper-5x5"}, {"preference", kSegmentPref}});
      if (r.status != 201) {
        ++failures;
        return;
      }
      auto base = "/v1/sessions/" + r.body.at("id").get<std::string>();
      for (int i = 0; i < 10; ++i) {
        if (post_json(c, base + "/question", {{"state", 9}, {"action", "north"}}).status != 200) ++failures;
      }
    });
  }
  for (auto& w : workers) w.join();
  EXPECT_EQ(failures, 0);
}

TEST(ServiceUi, StaticMount) {
  auto dir = testing::fresh_temp_dir("ui");
  std::filesystem::create_directories(dir / "ui");
  std::ofstream(dir / "ui" / "index.html") << "<!doctype html><title>xplain</title>";
  {
    testing::LiveService live(dir / "data", dir / "ui");
    auto c = live.client();
    auto r = c.Get("/ui/index.html");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 200);
    EXPECT_NE(r->body.find("xplain"), std::string::npos);
    EXPECT_EQ(c.Get("/v1/health")->body, R"({"status":"ok"})");
  }
  std::filesystem::remove_all(dir);
}

TEST(ServiceAddress, Parse) {
  EXPECT_EQ(parse_address("127.0.0.1:8080"), (std::pair<std::string, int>{"127.0.0.1", 8080}));
  EXPECT_THROW(parse_address("localhost"), Error);
  EXPECT_THROW(parse_address("localhost:http"), Error);
}

}  // namespace
}  // namespace xplain
