#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "temp_dir.hpp"
#include "mash/learning/knowledge_base.hpp"
#include "mash/workbench/http_api.hpp"
#include "mash/workbench/operations.hpp"

using namespace mash;
using namespace mash::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;  // stdout only
  std::string err;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

Run mash_cli(const std::vector<std::string>& args, const fs::path& scratch) {
  std::string cmd = quote(MASH_CLI);
  for (const auto& a : args) cmd += " " + quote(a);
  const fs::path err_file = scratch / "stderr.txt";
  cmd += " 2>" + quote(err_file.string()) + " </dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err_file);
  r.err.assign(std::istreambuf_iterator<char>(in), {});
  return r;
}

bool has(const std::string& text, const std::string& needle) { return text.find(needle) != std::string::npos; }

std::string bundle(const char* name) { return bundle_dir(name).string(); }

// Accepts the first explanation of every candidate until none are left.
void refine_all_cli(const std::string& kb, const fs::path& scratch) {
  for (int round = 0; round < 10; ++round) {
    Run listed = mash_cli({"--json", "refine", "--kb", kb, "--bundle", bundle("bogustan")}, scratch);
    REQUIRE(listed.code == 0);
    std::vector<std::string> args = {"refine", "--kb", kb, "--bundle", bundle("bogustan")};
    const json cands = json::parse(listed.out)["candidates"];
    for (const auto& c : cands) {
      if (c["explanations"].empty()) continue;
      args.push_back("--accept");
      args.push_back(c["rule"].get<std::string>() + ":" + c["explanations"][0]["id"].get<std::string>());
    }
    if (args.size() == 5) return;
    REQUIRE(mash_cli(args, scratch).code == 0);
  }
  FAIL("refinement did not converge");
}

}  // namespace

TEST_CASE("cli: validate reports counts and exit codes") {
  TempDir tmp{"mash-cli"};
  Run ok = mash_cli({"validate", bundle("bogustan")}, tmp.path());
  CHECK(ok.code == 0);
  CHECK(has(ok.out, "26 concepts, 8 instances, 7 facts"));

  Run j = mash_cli({"--json", "validate", bundle("bogustan")}, tmp.path());
  CHECK(j.code == 0);
  json doc = json::parse(j.out);
  CHECK(doc["valid"] == true);
  CHECK(doc["counts"]["concepts"] == 26);

  fs::copy(bundle_dir("wokistan"), tmp / "w", fs::copy_options::recursive);
  fs::remove(tmp / "w" / "catalog.json");
  Run bad = mash_cli({"validate", (tmp / "w").string()}, tmp.path());
  CHECK(bad.code == 1);
  CHECK(has(bad.out, "catalog.json"));

  CHECK(mash_cli({}, tmp.path()).code == 2);
  CHECK(mash_cli({"validate"}, tmp.path()).code == 2);
  CHECK(mash_cli({"solve", "--kb", "x.json", "--scenario", bundle("wokistan"), "--max-depth", "0"}, tmp.path()).code ==
        2);
  CHECK(mash_cli({"frobnicate"}, tmp.path()).code == 2);
}

TEST_CASE("cli: learn, refine, solve, eval and audit") {
  TempDir tmp{"mash-cli"};
  const std::string kb = (tmp / "kb.json").string();

  Run first = mash_cli({"--actor", "erin", "learn", "--bundle", bundle("bogustan"), "--kb", kb}, tmp.path());
  CHECK(first.code == 0);
  CHECK(has(first.out, "12 rules learned"));
  Run second = mash_cli({"--json", "learn", "--bundle", bundle("bogustan"), "--kb", kb}, tmp.path());
  CHECK(second.code == 0);
  CHECK(json::parse(second.out)["learned"] == 0);
  CHECK(json::parse(second.out)["duplicatesSkipped"] == 12);

  Run listed = mash_cli({"refine", "--kb", kb, "--bundle", bundle("bogustan")}, tmp.path());
  CHECK(listed.code == 0);
  CHECK(has(listed.out, "4 rules with unconstrained variables"));
  CHECK(has(listed.out, "?O1 has as enemy ?O3"));

  Run stale = mash_cli({"refine", "--kb", kb, "--bundle", bundle("bogustan"), "--accept", "R2:Cnothing"}, tmp.path());
  CHECK(stale.code == 1);
  CHECK(has(stale.err, "StaleCandidate"));

  refine_all_cli(kb, tmp.path());
  Run none = mash_cli({"refine", "--kb", kb, "--bundle", bundle("bogustan")}, tmp.path());
  CHECK(has(none.out, "0 rules with unconstrained variables"));

  const std::string out = (tmp / "solution.json").string();
  Run solved = mash_cli({"solve", "--kb", kb, "--scenario", bundle("wokistan"), "-o", out}, tmp.path());
  CHECK(solved.code == 0);
  CHECK(has(solved.out, "answer:   Wokistan is producing Wokistan chemical-warfare agents at Bandar chemical plant"));
  REQUIRE(fs::exists(out));

  Run evaluated = mash_cli({"--json", "eval", "--analysis", out, "--bundle", bundle("wokistan")}, tmp.path());
  CHECK(evaluated.code == 0);
  json solution = json::parse(std::ifstream(out));
  CHECK(json::parse(evaluated.out)["answer"] == solution["answer"]);

  Run audit = mash_cli({"audit", "--kb", kb, "--verify"}, tmp.path());
  CHECK(audit.code == 0);
  CHECK(has(audit.out, "replay matches"));
  CHECK(has(audit.out, "erin"));
  json events = json::parse(mash_cli({"--json", "audit", "--kb", kb}, tmp.path()).out)["events"];
  CHECK(events.front()["action"] == "learn-all");
  CHECK(events.back()["action"] == "solve");

  // a KB edited behind the log's back no longer replays
  json stored = json::parse(std::ifstream(kb));
  stored["rules"].erase(stored["rules"].begin());
  std::ofstream(kb) << stored.dump();
  CHECK(mash_cli({"audit", "--kb", kb, "--verify"}, tmp.path()).code == 1);
}

TEST_CASE("cli: missing inputs fail with exit code 1") {
  TempDir tmp{"mash-cli"};
  CHECK(mash_cli({"validate", (tmp / "absent").string()}, tmp.path()).code == 1);
  Run solve = mash_cli({"solve", "--kb", (tmp / "none.json").string(), "--scenario", bundle("wokistan")}, tmp.path());
  CHECK(solve.code == 1);
  CHECK(has(solve.err, "NotFound"));
  CHECK(mash_cli({"learn", "--bundle", bundle("wokistan"), "--kb", (tmp / "kb.json").string()}, tmp.path()).code == 1);
}

TEST_CASE("cli and api produce the same knowledge base and solution") {
  TempDir tmp{"mash-parity"};
  const std::string kb = (tmp / "kb.json").string();
  REQUIRE(mash_cli({"learn", "--bundle", bundle("bogustan"), "--kb", kb}, tmp.path()).code == 0);
  refine_all_cli(kb, tmp.path());
  const std::string out = (tmp / "solution.json").string();
  REQUIRE(mash_cli({"solve", "--kb", kb, "--scenario", bundle("wokistan"), "-o", out}, tmp.path()).code == 0);

  TempDir data{"mash-parity-api"};
  seed_data_dir(data.path());
  Workbench wb(data.path());
  ApiServer api(wb);
  const int port = api.bind("127.0.0.1", 0);
  std::thread server([&] { api.serve(); });
  httplib::Client http("127.0.0.1", port);
  http.set_read_timeout(120);
  auto call = [&](const std::string& method, const std::string& path, const json& body = json::object()) {
    auto r = method == "GET" ? http.Get(path) : http.Post(path, body.dump(), "application/json");
    REQUIRE(r);
    REQUIRE(r->status < 300);
    return json::parse(r->body);
  };
  for (int i = 0; i < 200 && !api.running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));

  const std::string demo = call("POST", "/analysis", {{"bundle", "bogustan"}, {"demonstration", true}})["id"];
  CHECK(demo == "bogustan-demonstration");  // the id the CLI records in provenance
  call("POST", "/kb/main/learn-all", {{"analysis", demo}});
  for (bool again = true; again;) {
    again = false;
    const json cands = call("GET", "/kb/main/refinement-candidates")["candidates"];
    for (const auto& c : cands) {
      const std::string rule = c["rule"];
      const json ex = call("GET", "/kb/main/rules/" + rule + "/explanations")["explanations"];
      if (ex.empty()) continue;
      call("POST", "/kb/main/rules/" + rule + "/explanations/" + ex[0]["id"].get<std::string>() + ":accept");
      again = true;
    }
  }
  const std::string job = call("POST", "/solve", {{"kb", "main"}, {"bundle", "wokistan"}})["job"];
  json status;
  for (int i = 0; i < 3000; ++i) {
    status = call("GET", "/jobs/" + job);
    if (status["status"] != "running") break;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  REQUIRE(status["status"] == "done");
  const json api_rules = call("GET", "/kb/main/rules")["rules"];
  api.stop();
  server.join();
  const json& api_solution = status["result"];

  KnowledgeBase cli_kb = KnowledgeBase::from_json(json::parse(std::ifstream(kb)));
  CHECK(rules_json(cli_kb)["rules"] == api_rules);
  json cli_solution = json::parse(std::ifstream(out));
  CHECK(cli_solution["analysis"] == api_solution["analysis"]);
  CHECK(cli_solution["evaluation"] == api_solution["evaluation"]);
}
