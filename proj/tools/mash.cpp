// mash: command-line front end for bundles, learning, refinement, solving
// and the HTTP service.
//
// Exit codes: 0 success, 1 validation or domain failure, 2 usage error.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mash/common/error.hpp"
#include "mash/workbench/http_api.hpp"
#include "mash/workbench/operations.hpp"

using namespace mash;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

bool g_json = false;

void emit(const json& j, const std::string& text) {
  if (g_json)
    std::cout << j.dump(2) << '\n';
  else
    std::cout << text;
}

json read_json_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::ValidationFailed, "cannot read " + file.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("cannot parse " + file.string(), {file.filename().string() + ": " + e.what()});
  }
}

std::string default_actor() {
  const char* user = std::getenv("USER");
  return user && *user ? user : "cli";
}

std::pair<std::string, std::string> split_pair(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == s.size())
    throw CLI::ValidationError("expected RULE:CANDIDATE, got '" + s + "'");
  return {s.substr(0, colon), s.substr(colon + 1)};
}

// ---- validate ----------------------------------------------------------------

int cmd_validate(const std::string& path) {
  try {
    ScenarioBundle b = load_bundle(path);
    json j = b.summary();
    json out = {{"valid", true}, {"name", b.name}, {"counts", j["counts"]}};
    std::ostringstream text;
    text << b.name << ": valid\n"
         << "  " << b.ontology.concepts().size() << " concepts, " << b.ontology.instances().size() << " instances, "
         << b.ontology.facts().size() << " facts, " << b.ontology.features().size() << " features\n"
         << "  " << b.patterns.size() << " question pattern" << (b.patterns.size() == 1 ? "" : "s") << ", "
         << b.dossier.size() << " dossier items, "
         << b.catalog.list_agents().size() << " collection agents"
         << (b.demonstration ? ", demonstration analysis" : "") << '\n';
    emit(out, text.str());
    return 0;
  } catch (const ValidationError& e) {
    json out = {
        {"valid", false}, {"error", to_string(e.code())}, {"message", e.message()}, {"diagnostics", e.diagnostics()}};
    std::ostringstream text;
    text << e.what() << '\n';
    for (const auto& d : e.diagnostics()) text << "  " << d << '\n';
    emit(out, text.str());
    return 1;
  }
}

// ---- learn -------------------------------------------------------------------

int cmd_learn(const std::string& bundle_path, const std::string& analysis_path, const std::string& kb_path,
              const std::string& actor) {
  ScenarioBundle b = load_bundle(bundle_path);
  Analysis a;
  if (analysis_path.empty()) {
    if (!b.demonstration) throw Error(ErrorCode::NotFound, "bundle '" + b.name + "' has no demonstration; pass --analysis");
    a = *b.demonstration;
  } else {
    a = analysis_from_document(read_json_file(analysis_path));
  }
  KbStore store(kb_path);
  json r = learn_into(store, a, b.ontology, actor);
  std::ostringstream text;
  text << r["learned"].get<std::size_t>() << " rules learned, " << r["duplicatesSkipped"].get<std::size_t>()
       << " duplicates skipped; knowledge base at version " << r["version"].get<std::uint64_t>() << '\n';
  for (const auto& f : r["failures"]) text << "  not learned: " << f.get<std::string>() << '\n';
  emit(r, text.str());
  return 0;
}

// ---- refine ------------------------------------------------------------------

std::string describe_explanation(const json& e) {
  std::ostringstream s;
  s << e["generalized"].get<std::string>() << "   (" << e["text"].get<std::string>() << ")";
  return s.str();
}

int refine_interactive(KbStore& store, const Ontology& onto, int max_len, const std::string& actor) {
  json decisions = json::array();
  for (const auto& c : find_refinement_candidates(store.kb())) {
    json ex = explanations_json(store.kb(), c.rule_id, onto, max_len)["explanations"];
    std::cout << "\nRule " << c.rule_id << ": unconstrained ";
    for (const auto& v : c.variables) std::cout << v << ' ';
    std::cout << '\n';
    if (ex.empty()) {
      std::cout << "  no explanations in the ontology\n";
      continue;
    }
    for (std::size_t i = 0; i < ex.size(); ++i)
      std::cout << "  [" << i + 1 << "] " << describe_explanation(ex[i]) << '\n';
    for (;;) {
      std::cout << "accept <n>, reject <n>, skip, quit> " << std::flush;
      std::string line;
      if (!std::getline(std::cin, line)) return 0;
      std::istringstream in(line);
      std::string verb;
      std::size_t n = 0;
      in >> verb >> n;
      if (verb == "q" || verb == "quit") {
        emit(decisions, "");
        return 0;
      }
      if (verb == "s" || verb == "skip" || verb.empty()) break;
      if ((verb != "a" && verb != "accept" && verb != "r" && verb != "reject") || n < 1 || n > ex.size()) {
        std::cout << "  ?\n";
        continue;
      }
      const std::string id = ex[n - 1]["id"];
      const bool accept = verb[0] == 'a';
      json r = accept ? accept_into(store, c.rule_id, id, onto, actor) : reject_into(store, c.rule_id, id, onto, actor);
      decisions.push_back(r);
      std::cout << "  " << (accept ? "accepted" : "rejected") << ": " << r["condition"].get<std::string>()
                << "  (version " << r["version"].get<std::uint64_t>() << ")\n";
      break;
    }
  }
  if (g_json) std::cout << decisions.dump(2) << '\n';
  return 0;
}

int cmd_refine(const std::string& kb_path, const std::string& bundle_path, bool interactive,
               const std::vector<std::string>& accepts, const std::vector<std::string>& rejects, int max_len,
               const std::string& actor) {
  ScenarioBundle b = load_bundle(bundle_path);
  if (!fs::exists(kb_path)) throw Error(ErrorCode::NotFound, "no knowledge base at " + kb_path);
  KbStore store(kb_path);
  if (interactive) return refine_interactive(store, b.ontology, max_len, actor);

  if (!accepts.empty() || !rejects.empty()) {
    json out = json::array();
    std::ostringstream text;
    for (const auto& a : accepts) {
      auto [rule, cand] = split_pair(a);
      json r = accept_into(store, rule, cand, b.ontology, actor);
      text << "accepted " << rule << ": " << r["condition"].get<std::string>() << '\n';
      out.push_back(r);
    }
    for (const auto& a : rejects) {
      auto [rule, cand] = split_pair(a);
      json r = reject_into(store, rule, cand, b.ontology, actor);
      text << "rejected " << rule << ": " << r["condition"].get<std::string>() << '\n';
      out.push_back(r);
    }
    text << "knowledge base at version " << store.kb().version() << '\n';
    emit(out, text.str());
    return 0;
  }

  json out = candidates_json(store.kb());
  std::ostringstream text;
  text << out["candidates"].size() << " rules with unconstrained variables\n";
  for (auto& c : out["candidates"]) {
    c["explanations"] = explanations_json(store.kb(), c["rule"], b.ontology, max_len)["explanations"];
    text << c["rule"].get<std::string>() << ":";
    for (const auto& v : c["variables"]) text << ' ' << v.get<std::string>();
    text << '\n';
    for (const auto& e : c["explanations"])
      text << "  " << e["id"].get<std::string>() << "  " << describe_explanation(e) << '\n';
  }
  emit(out, text.str());
  return 0;
}

// ---- solve / eval ------------------------------------------------------------

int cmd_solve(const std::string& kb_path, const std::string& scenario, const std::string& question,
              const SolveConfig& config, const std::string& output, const std::string& analysis_id,
              const std::string& actor) {
  if (!fs::exists(kb_path)) throw Error(ErrorCode::NotFound, "no knowledge base at " + kb_path);
  ScenarioBundle b = load_bundle(scenario);
  KbStore store(kb_path);
  const std::string id = analysis_id.empty() ? b.name + "-solution" : analysis_id;
  SolveResult r = solve_bundle(store.kb(), b, question, config, id);
  json doc = solution_json(r, b.ontology);
  const std::uint64_t v = store.kb().version();
  store.record(actor, "solve", KbChange{v, v, {}},
               {{"bundle", b.name},
                {"question", question.empty() ? b.question : question},
                {"analysis", id},
                {"answer", doc["answer"]},
                {"arguments", r.analysis.arguments().size()}});
  if (!output.empty()) {
    std::ofstream out(output);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + output);
    out << doc.dump(2) << '\n';
  }
  std::ostringstream text;
  text << "question: " << (question.empty() ? b.question : question) << '\n'
       << "answer:   " << doc["answerText"].get<std::string>() << '\n'
       << "          " << r.analysis.hypotheses().size() << " hypotheses, " << r.analysis.arguments().size()
       << " arguments, " << r.analysis.attachments().size() << " evidence attachments\n";
  for (const auto& h : r.report.expansion.unexpanded) text << "  unexpanded at depth limit: " << h << '\n';
  for (const auto& t : r.report.expansion.truncated) text << "  bindings truncated: " << t << '\n';
  if (output.empty() && !g_json) text << doc.dump(2) << '\n';
  emit(output.empty() ? doc : json{{"answer", doc["answer"]}, {"answerText", doc["answerText"]}, {"output", output},
                                   {"report", doc["report"]}},
       text.str());
  return 0;
}

int cmd_eval(const std::string& analysis_path, const std::string& bundle_path) {
  Analysis a = analysis_from_document(read_json_file(analysis_path));
  std::optional<ScenarioBundle> b;
  if (!bundle_path.empty()) b = load_bundle(bundle_path);
  const Ontology* onto = b ? &b->ontology : nullptr;
  json j = evaluate_json(a, onto);
  std::ostringstream text;
  for (const auto& c : a.competing()) {
    const auto& h = j["hypotheses"][c];
    text << std::left << std::setw(4) << h["probability"].get<std::string>() << ' ' << c << "  "
         << h["statement"].get<std::string>() << (h["dissonant"].get<bool>() ? "  [dissonant]" : "") << '\n';
  }
  text << "answer: " << j["answerText"].get<std::string>() << '\n';
  for (const auto& line : j["log"]) text << "  note: " << line.get<std::string>() << '\n';
  emit(j, text.str());
  return 0;
}

// ---- audit -------------------------------------------------------------------

int cmd_audit(const std::string& kb_path, bool verify) {
  KbStore store(kb_path);
  auto events = store.events();
  json out = {{"version", store.kb().version()}, {"events", events}};
  std::ostringstream text;
  for (const auto& e : events) {
    text << e.timestamp << "  " << std::left << std::setw(10) << e.action << " " << e.actor << "  v" << e.before
         << " -> v" << e.after;
    if (e.detail.contains("rule")) text << "  " << e.detail["rule"].get<std::string>();
    if (e.detail.contains("condition")) text << "  " << e.detail["condition"].get<std::string>();
    text << '\n';
  }
  int code = 0;
  if (verify) {
    const bool same = replay_audit_log(events) == store.kb();
    out["replayMatches"] = same;
    text << (same ? "replay matches the stored knowledge base\n" : "replay DIFFERS from the stored knowledge base\n");
    code = same ? 0 : 1;
  }
  emit(out, text.str());
  return code;
}

// ---- serve -------------------------------------------------------------------

ApiServer* g_server = nullptr;

int cmd_serve(const std::string& host, int port, const std::string& data_dir, const std::vector<std::string>& bundles) {
  Workbench wb(data_dir);
  for (const auto& b : bundles) wb.load_bundle(b);
  ApiServer server(wb);
  const int bound = server.bind(host, port);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  emit({{"host", host}, {"port", bound}, {"dataDir", data_dir}},
       "serving " + data_dir + " on http://" + host + ":" + std::to_string(bound) + "\n");
  std::cout << std::flush;
  server.serve();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evidence-based analysis workbench: learn argumentation rules from a demonstration and solve new scenarios."};
  app.require_subcommand(1);
  app.add_flag("--json", g_json, "Machine-readable JSON output");
  std::string actor = default_actor();
  app.add_option("--actor", actor, "Name recorded in the audit log");

  std::string bundle, analysis, kb, scenario, question, output, analysis_id;
  auto* validate = app.add_subcommand("validate", "Check a scenario bundle and print its counts");
  validate->add_option("bundle", bundle, "Bundle directory or manifest")->required();

  auto* learn = app.add_subcommand("learn", "Learn rules from an analysis into a knowledge base");
  learn->add_option("--bundle", bundle, "Bundle whose ontology grounds the analysis")->required();
  learn->add_option("--analysis", analysis, "Analysis file (default: the bundle's demonstration)");
  learn->add_option("--kb", kb, "Knowledge base file (created when missing)")->required();

  bool interactive = false;
  std::vector<std::string> accepts, rejects;
  int max_len = 2;
  auto* refine = app.add_subcommand("refine", "Review refinement candidates and their explanations");
  refine->add_option("--kb", kb, "Knowledge base file")->required();
  refine->add_option("--bundle", bundle, "Bundle with the ontology the rules were learned in")->required();
  refine->add_flag("--interactive,-i", interactive, "Prompt to accept or reject each explanation");
  refine->add_option("--accept", accepts, "Accept RULE:CANDIDATE");
  refine->add_option("--reject", rejects, "Reject RULE:CANDIDATE");
  refine->add_option("--max-length", max_len, "Longest explanation path")->check(CLI::Range(1, 3));

  SolveConfig config;
  bool no_collect = false;
  auto* solve = app.add_subcommand("solve", "Generate and evaluate the analysis of a scenario");
  solve->add_option("--kb", kb, "Knowledge base file")->required();
  solve->add_option("--scenario", scenario, "Scenario bundle directory or manifest")->required();
  solve->add_option("--question", question, "Question text (default: the bundle's question)");
  solve->add_option("--max-depth", config.max_depth, "Expansion depth limit")->check(CLI::PositiveNumber);
  solve->add_option("--max-bindings", config.max_bindings_per_rule, "Bindings kept per rule and hypothesis")
      ->check(CLI::PositiveNumber);
  solve->add_flag("--no-collect", no_collect, "Leave collection tasks pending");
  solve->add_option("--id", analysis_id, "Id of the generated analysis");
  solve->add_option("-o,--output", output, "Write the solution document here");

  auto* eval = app.add_subcommand("eval", "Evaluate an analysis file");
  eval->add_option("--analysis", analysis, "Analysis or solution file")->required();
  eval->add_option("--bundle", bundle, "Bundle for rendering instance names");

  bool verify = false;
  auto* audit = app.add_subcommand("audit", "Show a knowledge base's audit log");
  audit->add_option("--kb", kb, "Knowledge base file")->required();
  audit->add_flag("--verify", verify, "Replay the log and compare with the stored knowledge base");

  std::string host = "127.0.0.1", data_dir = "data";
  int port = 8080;
  std::vector<std::string> serve_bundles;
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--port", port, "Listen port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--data-dir", data_dir, "Data directory")->envname("MASH_DATA_DIR");
  serve->add_option("--bundle", serve_bundles, "Extra bundle to register at startup");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*validate) return cmd_validate(bundle);
    if (*learn) return cmd_learn(bundle, analysis, kb, actor);
    if (*refine) return cmd_refine(kb, bundle, interactive, accepts, rejects, max_len, actor);
    if (*solve) {
      config.execute_tasks = !no_collect;
      return cmd_solve(kb, scenario, question, config, output, analysis_id, actor);
    }
    if (*eval) return cmd_eval(analysis, bundle);
    if (*audit) return cmd_audit(kb, verify);
    if (*serve) return cmd_serve(host, port, data_dir, serve_bundles);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "mash: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    if (g_json) {
      json j = error_json(e);
      std::cout << j.dump(2) << '\n';
    }
    std::cerr << "mash: " << e.what() << '\n';
    if (const auto* v = dynamic_cast<const ValidationError*>(&e))
      for (const auto& d : v->diagnostics()) std::cerr << "  " << d << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "mash: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
