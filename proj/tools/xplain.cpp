// xplain: command-line front door for the explanation engine.
//
//   xplain validate-map <file>
//   xplain plan <file> --objective shortest|safest|combined [--discount f] [--tolerance f]
//   xplain explain <file> [--pref <json> | --objective .. --locality .. --specificity .. --corpus ..]
//   xplain session <file> [--script <file>] [--transcript <file>]
//   xplain serve [--addr host:port] [--data-dir dir]
//
// Exit codes: 0 success, 1 invalid input or engine error, 2 I/O error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "xplain/service.hpp"
#include "xplain/terminal.hpp"
#include "xplain/xplain.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitIo = 2;

struct IoError {
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError{"cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

xplain::GridMap load_map(const std::string& path) {
  return xplain::parse_map(read_file(path), std::filesystem::path(path).stem().string());
}

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

struct MotionFlags {
  double slip = 0.2;
  std::string spread = "stay";
  double discount = 0.99;
  double tolerance = 1e-6;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--slip", slip, "probability that a move fails")->capture_default_str();
    cmd->add_option("--slip-spread", spread, "where failed moves go")
        ->check(CLI::IsMember({"stay", "stay-or-perpendicular"}))
        ->capture_default_str();
    cmd->add_option("--discount", discount, "discount factor")->capture_default_str();
    cmd->add_option("--tolerance", tolerance, "value-iteration tolerance")->capture_default_str();
  }

  xplain::SessionConfig session_config() const {
    xplain::SessionConfig c;
    c.motion.slip_probability = slip;
    c.motion.spread = spread == "stay" ? xplain::SlipSpread::StayOnly : xplain::SlipSpread::StayOrPerpendicular;
    c.planner.discount = discount;
    c.planner.tolerance = tolerance;
    return c;
  }
};

struct PreferenceFlags {
  std::string json_text;
  std::string objective = "shortest";
  std::string locality = "global";
  std::string specificity = "every-state";
  std::string corpus = "concrete";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--pref", json_text, "preference tuple as JSON (overrides the individual flags)");
    cmd->add_option("--objective", objective, "shortest | safest | combined")->capture_default_str();
    cmd->add_option("--locality", locality,
                    "global | only:corridor | only:crowded | segment:<kind>:<kind> | position:<cell>")
        ->capture_default_str();
    cmd->add_option("--specificity", specificity, "every-state | critical-only")->capture_default_str();
    cmd->add_option("--corpus", corpus, "concrete | high-level")->capture_default_str();
  }

  xplain::PreferenceTuple resolve() const {
    if (!json_text.empty()) return xplain::preference_from_json(xplain::json::parse(json_text));
    return xplain::preference_from_json(xplain::json{
        {"objective", objective}, {"locality", locality}, {"specificity", specificity}, {"corpus", corpus}});
  }
};

int report(const xplain::Error& e) {
  std::cerr << "error: " << e.what() << "\n";
  if (const auto* rejected = dynamic_cast<const xplain::PreferenceRejected*>(&e)) {
    for (const auto& v : rejected->violations()) std::cerr << "  " << v.code << ": " << v.message << "\n";
  }
  return kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Personalized explanations of grid-world robot route plans"};
  app.require_subcommand(1);
  std::string format = "text";
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"text", "json"}));

  std::string map_path;

  auto* validate = app.add_subcommand("validate-map", "check a map file");
  validate->add_option("file", map_path, "map file")->required();

  auto* plan = app.add_subcommand("plan", "plan a route and print it as JSON");
  plan->add_option("file", map_path, "map file")->required();
  std::string objective = "shortest";
  plan->add_option("--objective", objective, "shortest | safest | combined")
      ->check(CLI::IsMember({"shortest", "safest", "combined"}))
      ->capture_default_str();
  MotionFlags plan_motion;
  plan_motion.add_to(plan);

  auto* explain = app.add_subcommand("explain", "print the explanation for a preference");
  explain->add_option("file", map_path, "map file")->required();
  PreferenceFlags explain_pref;
  explain_pref.add_to(explain);
  MotionFlags explain_motion;
  explain_motion.add_to(explain);

  auto* session = app.add_subcommand("session", "run an interactive session in the terminal");
  session->add_option("file", map_path, "map file")->required();
  std::string script_path;
  std::string transcript_path;
  session->add_option("--script", script_path, "read answers from this file instead of stdin");
  session->add_option("--transcript", transcript_path, "write the session transcript (JSON Lines) here");
  MotionFlags session_motion;
  session_motion.add_to(session);

  auto* serve = app.add_subcommand("serve", "run the HTTP/JSON service");
  std::string addr = env_or("XPLAIN_ADDR", "127.0.0.1:8080");
  std::string data_dir = env_or("XPLAIN_DATA_DIR", "./data");
  std::string ui_dir = env_or("XPLAIN_UI_DIR", "");
  serve->add_option("--addr", addr, "listen address host:port (XPLAIN_ADDR)")->capture_default_str();
  serve->add_option("--data-dir", data_dir, "data directory (XPLAIN_DATA_DIR)")->capture_default_str();
  serve->add_option("--ui-dir", ui_dir, "static UI bundle served under /ui (XPLAIN_UI_DIR)");
  MotionFlags serve_motion;
  serve_motion.add_to(serve);

  for (auto* cmd : {validate, plan, explain, session, serve}) cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const bool as_json = format == "json";
  try {
    if (*validate) {
      auto map = load_map(map_path);
      if (as_json) {
        std::cout << xplain::json{{"valid", true}, {"map", xplain::map_to_json(map)}}.dump(2) << "\n";
      } else {
        std::cout << "ok: " << map.name() << " " << map.width() << "x" << map.height() << "\n";
      }
      return kExitOk;
    }

    if (*plan) {
      auto map = load_map(map_path);
      auto cfg = plan_motion.session_config();
      auto mdp = xplain::build_mdp(map, cfg.motion);
      auto policy = xplain::plan_policy(mdp, *xplain::objective_from_string(objective), cfg.planner);
      auto route = xplain::extract_route(policy, mdp);
      std::cout << xplain::json{{"objective", objective},
                                {"route", xplain::route_to_json(route)},
                                {"metrics", xplain::metrics_to_json(xplain::route_metrics(route, mdp))},
                                {"iterations", policy.iterations}}
                       .dump(2)
                << "\n";
      return kExitOk;
    }

    if (*explain) {
      auto map = load_map(map_path);
      auto pref = explain_pref.resolve();
      if (auto vs = xplain::validate_preference(pref, map); !vs.empty()) throw xplain::PreferenceRejected(vs);
      auto cfg = explain_motion.session_config();
      auto mdp = xplain::build_mdp(map, cfg.motion);
      auto policy = xplain::plan_policy(mdp, pref.objective, cfg.planner);
      auto ex = xplain::generate_explanation(mdp, policy, pref);
      if (as_json) {
        std::cout << xplain::explanation_to_json(ex).dump(2) << "\n";
      } else {
        for (const auto& s : ex.sentences) std::cout << s.text << "\n";
      }
      return kExitOk;
    }

    if (*session) {
      auto map = load_map(map_path);
      std::ifstream script;
      if (!script_path.empty()) {
        script.open(script_path, std::ios::binary);
        if (!script) throw IoError{"cannot read '" + script_path + "'"};
      }
      std::istream& in = script_path.empty() ? std::cin : script;
      xplain::TerminalSession terminal(map, in, std::cout, session_motion.session_config());
      auto result = terminal.run();
      if (result.session) {
        if (!transcript_path.empty()) {
          std::ofstream out(transcript_path, std::ios::binary);
          out << xplain::transcript_to_jsonl(result.session->transcript());
          if (!out) throw IoError{"cannot write '" + transcript_path + "'"};
        }
        if (as_json) std::cout << xplain::session_snapshot(*result.session).dump(2) << "\n";
      }
      return result.exit_code == 0 ? kExitOk : kExitInvalid;
    }

    if (*serve) {
      auto [host, port] = xplain::parse_address(addr);
      xplain::ServiceConfig cfg;
      cfg.data_dir = data_dir;
      cfg.ui_dir = ui_dir;
      cfg.session = serve_motion.session_config();
      xplain::Service service(cfg);
      std::cerr << "listening on http://" << host << ":" << port << "/v1 (data: " << data_dir << ")\n";
      return service.listen(host, port) ? kExitOk : kExitIo;
    }
  } catch (const IoError& e) {
    std::cerr << "error: Io: " << e.message << "\n";
    return kExitIo;
  } catch (const xplain::Error& e) {
    if (e.code() == xplain::ErrorCode::Io) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitIo;
    }
    return report(e);
  } catch (const xplain::json::exception& e) {
    std::cerr << "error: InvalidPreference: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
