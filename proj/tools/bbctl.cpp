#include <benchbrowser/benchbrowser.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

enum class Format { json, tsv, table };

int exit_code(bb_status s) {
  switch (s) {
    case BB_OK: return 0;
    case BB_ERR_IO:
    case BB_ERR_GATEWAY:
    case BB_ERR_ANCHOR_FORMAT:
    case BB_ERR_DEADLINE:
    case BB_ERR_INTERNAL: return 2;
    default: return 1;
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Item ids from a JSON array file or one id per line.
json id_list(const std::string& path) {
  const std::string text = slurp(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') return json::parse(text);
  json out = json::array();
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::string cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else {
    out.emplace_back(prefix, cell(j));
  }
}

void print_rows(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows,
                Format fmt) {
  if (fmt == Format::tsv) {
    for (std::size_t i = 0; i < header.size(); ++i) std::cout << (i ? "\t" : "") << header[i];
    std::cout << '\n';
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) std::cout << (i ? "\t" : "") << r[i];
      std::cout << '\n';
    }
    return;
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      std::cout << (i ? "  " : "") << r[i];
      if (i + 1 < r.size()) std::cout << std::string(width[i] - r[i].size(), ' ');
    }
    std::cout << '\n';
  };
  line(header);
  std::vector<std::string> rule;
  for (auto w : width) rule.emplace_back(w, '-');
  line(rule);
  for (const auto& r : rows) line(r);
}

// Renders a response: list-shaped payloads become one row per entry, other
// records become key/value rows.
void emit(const std::string& body, Format fmt) {
  if (fmt == Format::json) {
    std::cout << body << '\n';
    return;
  }
  const json j = json::parse(body);
  for (const char* key : {"hits", "per_facet", "benchmarks"}) {
    if (!j.contains(key) || !j.at(key).is_array()) continue;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    for (const auto& e : j.at(key)) {
      std::vector<std::pair<std::string, std::string>> flat;
      flatten(e, "", flat);
      if (header.empty())
        for (const auto& [k, v] : flat) header.push_back(k);
      std::vector<std::string> row;
      for (const auto& h : header) {
        auto it = std::find_if(flat.begin(), flat.end(), [&](const auto& p) { return p.first == h; });
        row.push_back(it == flat.end() ? "" : it->second);
      }
      rows.push_back(std::move(row));
    }
    if (header.empty()) header.push_back(key);
    print_rows(header, rows, fmt);
    return;
  }
  std::vector<std::pair<std::string, std::string>> flat;
  flatten(j, "", flat);
  std::vector<std::vector<std::string>> rows;
  for (auto& [k, v] : flat) rows.push_back({k, v});
  print_rows({"field", "value"}, rows, fmt);
}

int report(bb_status st, char* out, Format fmt) {
  if (out) {
    emit(out, fmt);
    bb_string_free(out);
  }
  if (st != BB_OK) std::cerr << "error (" << bb_status_name(st) << "): " << bb_last_error() << '\n';
  return exit_code(st);
}

struct EngineHandle {
  bb_engine* e = nullptr;
  ~EngineHandle() { bb_engine_destroy(e); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bbctl: retrieve benchmark evidence for a use-case and audit its validity"};
  app.require_subcommand(1);

  std::string config_path = std::getenv("BB_CONFIG") ? std::getenv("BB_CONFIG") : "benchbrowser.json";
  std::string format_name = "json";
  app.add_option("--config", config_path, "Engine config file (JSON)");
  app.add_option("--format", format_name, "Output format")
      ->check(CLI::IsMember({"json", "tsv", "table"}));

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate a corpus file and summarise it");
  std::string corpus, shorthand, out;
  bool allow_duplicates = false;
  ingest->add_option("--corpus", corpus, "Corpus JSONL")->required();
  ingest->add_option("--shorthand", shorthand, "Shorthand table JSONL to attach");
  ingest->add_option("--out", out, "Write the normalised corpus here");
  ingest->add_flag("--allow-duplicates", allow_duplicates, "Drop repeated ids instead of failing");

  // index build
  auto* index = app.add_subcommand("index", "Index operations");
  index->require_subcommand(1);
  auto* build = index->add_subcommand("build", "Build a lexical or dense index");
  std::string kind = "lexical", space = "raw", gateway_file;
  build->add_option("--kind", kind, "Index kind")->check(CLI::IsMember({"lexical", "dense"}));
  build->add_option("--space", space, "Item representation")->check(CLI::IsMember({"raw", "shorthand"}));
  build->add_option("--corpus", corpus, "Corpus JSONL")->required();
  build->add_option("--shorthand", shorthand, "Shorthand table JSONL");
  build->add_option("--out", out, "Index file to write")->required();
  build->add_option("--gateway", gateway_file, "Embedding gateway config (JSON)");

  // translate-shorthand
  auto* translate = app.add_subcommand("translate-shorthand", "Rewrite every item into shorthand");
  std::size_t parallelism = 0;
  translate->add_option("--corpus", corpus, "Corpus JSONL")->required();
  translate->add_option("--out", out, "Shorthand table to write")->required();
  translate->add_option("--gateway", gateway_file, "Completion gateway config (JSON)");
  translate->add_option("--parallelism", parallelism, "Concurrent requests (default: gateway limit)");

  // query
  auto* query = app.add_subcommand("query", "Retrieve, filter and judge evidence for a use-case");
  std::string use_case, use_case_id, strategy = "original", backend;
  std::size_t k = 20;
  bool no_filter = false;
  auto* uc_text = query->add_option("--use-case", use_case, "Use-case text");
  auto* uc_id = query->add_option("--use-case-id", use_case_id, "Use-case id from the configured file");
  uc_text->excludes(uc_id);
  query->add_option("--k", k, "Results to return");
  query->add_option("--strategy", strategy, "Anchor strategy")
      ->check(CLI::IsMember({"original", "rephrasing", "example_synthesis", "shorthand"}));
  query->add_option("--backend", backend, "Retrieval backend")->check(CLI::IsMember({"dense", "lexical", "random"}));
  query->add_flag("--no-filter", no_filter, "Skip the relatedness filter and the judge");

  // audit
  auto* audit = app.add_subcommand("audit", "Validity audits");
  audit->require_subcommand(1);
  auto* facets = audit->add_subcommand("facets", "Facet coverage of a skill family");
  std::string family_file;
  facets->add_option("--family", family_file, "Skill family JSON file")->required();
  facets->add_option("--k", k, "Results per facet");
  facets->add_option("--strategy", strategy, "Anchor strategy")
      ->check(CLI::IsMember({"original", "rephrasing", "example_synthesis", "shorthand"}));

  auto* convergence = audit->add_subcommand("convergence", "Rank agreement of retrieved evidence vs gold");
  std::size_t trials = 50, threads = 1;
  std::uint64_t seed = 0;
  std::string retrieved_file;
  bool shared = false;
  convergence->add_option("--use-case", use_case_id, "Use-case id with a gold benchmark")->required();
  convergence->add_option("--trials", trials, "Monte-Carlo trials");
  convergence->add_option("--seed", seed, "Random seed")->required();
  convergence->add_option("--retrieved", retrieved_file, "JSON map model -> item ids (default: run the query)");
  convergence->add_option("--k", k, "Results when running the query");
  convergence->add_option("--strategy", strategy, "Anchor strategy when running the query")
      ->check(CLI::IsMember({"original", "rephrasing", "example_synthesis", "shorthand"}));
  convergence->add_option("--threads", threads, "Worker threads for the trials");
  convergence->add_flag("--shared-subsample", shared, "Share each trial's gold subsample across models");

  // eval metrics
  auto* eval = app.add_subcommand("eval", "Offline evaluation");
  eval->require_subcommand(1);
  auto* metrics = eval->add_subcommand("metrics", "Metrics over a judged hit list");
  std::string judged_file, gold_file, union_file;
  metrics->add_option("--judged", judged_file, "Judged hits JSONL")->required();
  metrics->add_option("--k", k, "Cutoff");
  metrics->add_option("--gold", gold_file, "Gold item ids (JSON array or one per line)");
  metrics->add_option("--union", union_file, "Union of relevant ids across methods");
  metrics->add_option("--use-case-id", use_case_id, "Label for the report");
  metrics->add_option("--strategy", strategy, "Label for the report");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  std::string host;
  int port = 0;
  serve->add_option("--host", host, "Bind address (default from config)");
  serve->add_option("--port", port, "Port (default from config)");
  serve->add_option("--threads", threads, "Worker threads (default from config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  const Format fmt = format_name == "tsv" ? Format::tsv : (format_name == "table" ? Format::table : Format::json);
  char* result = nullptr;
  try {
    if (ingest->parsed()) {
      const bb_status st = bb_ingest(corpus.c_str(), allow_duplicates ? 0 : 1, shorthand.empty() ? nullptr : shorthand.c_str(),
                                     out.empty() ? nullptr : out.c_str(), &result);
      return report(st, result, fmt);
    }
    if (build->parsed()) {
      const std::string gw = gateway_file.empty() ? "" : slurp(gateway_file);
      const bb_status st = bb_index_build(corpus.c_str(), shorthand.empty() ? nullptr : shorthand.c_str(), kind.c_str(),
                                          space.c_str(), out.c_str(), gw.c_str(), &result);
      return report(st, result, fmt);
    }
    if (translate->parsed()) {
      const std::string gw = gateway_file.empty() ? "" : slurp(gateway_file);
      const bb_status st = bb_translate_shorthand(corpus.c_str(), out.c_str(), gw.c_str(), parallelism, &result);
      return report(st, result, fmt);
    }
    if (metrics->parsed()) {
      json req{{"k", k}, {"use_case_id", use_case_id}, {"strategy", strategy}};
      if (!gold_file.empty()) req["gold"] = id_list(gold_file);
      if (!union_file.empty()) req["union_relevant"] = id_list(union_file);
      const bb_status st = bb_eval_metrics(judged_file.c_str(), req.dump().c_str(), &result);
      return report(st, result, fmt);
    }

    EngineHandle engine;
    if (const bb_status st = bb_engine_create(config_path.c_str(), &engine.e); st != BB_OK)
      return report(st, nullptr, fmt);

    if (query->parsed()) {
      if (use_case.empty() && use_case_id.empty()) {
        std::cerr << "query needs --use-case or --use-case-id\n";
        return 1;
      }
      json req{{"k", k}, {"strategy", strategy}, {"filter", !no_filter}};
      if (!use_case_id.empty()) req["use_case_id"] = use_case_id;
      else req["use_case"] = use_case;
      if (!backend.empty()) req["backend"] = backend;
      const bb_status st = bb_engine_query(engine.e, req.dump().c_str(), &result);
      return report(st, result, fmt);
    }
    if (facets->parsed()) {
      json req{{"family", json::parse(slurp(family_file))}, {"k", k}, {"strategy", strategy}};
      const bb_status st = bb_engine_audit_facets(engine.e, req.dump().c_str(), &result);
      return report(st, result, fmt);
    }
    if (convergence->parsed()) {
      json req{{"use_case_id", use_case_id}, {"trials", trials}, {"seed", seed},     {"threads", threads},
               {"k", k},                     {"strategy", strategy}, {"shared_subsample", shared}};
      if (!retrieved_file.empty()) req["retrieved"] = json::parse(slurp(retrieved_file));
      const bb_status st = bb_engine_audit_convergence(engine.e, req.dump().c_str(), &result);
      return report(st, result, fmt);
    }
    if (serve->parsed()) {
      return report(bb_engine_serve(engine.e, host.empty() ? nullptr : host.c_str(), port, threads > 1 ? threads : 0),
                    nullptr, fmt);
    }
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  std::cerr << app.help();
  return 1;
}
