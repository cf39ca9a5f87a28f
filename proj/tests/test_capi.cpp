#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "benchbrowser/benchbrowser.h"

using nlohmann::json;

namespace {

// Takes ownership of a library string.
std::string take(char* s) {
  std::string out = s ? s : "";
  bb_string_free(s);
  return out;
}

struct Engine {
  bb_engine* e = nullptr;
  Engine() { REQUIRE(bb_engine_create(BB_TEST_DATA "/fixture_config.json", &e) == BB_OK); }
  ~Engine() { bb_engine_destroy(e); }
};

}  // namespace

TEST_CASE("engine lifecycle and queries through the C API") {
  Engine eng;
  char* out = nullptr;
  REQUIRE(bb_engine_query(eng.e, R"({"use_case_id":"uc_chess","k":7,"strategy":"shorthand"})", &out) == BB_OK);
  const auto r = json::parse(take(out));
  CHECK(r["hits"].size() == 7);
  CHECK(std::string(bb_last_error()).empty());

  CHECK(bb_engine_query(eng.e, R"({"use_case_id":"uc_chess","k":0})", &out) == BB_ERR_ARGUMENT);
  CHECK(out == nullptr);
  CHECK(std::string(bb_last_error()).find("k") != std::string::npos);
  CHECK(bb_engine_query(eng.e, "{bad", &out) == BB_ERR_ARGUMENT);
  CHECK(bb_engine_query(eng.e, R"({"use_case_id":"zzz"})", &out) == BB_ERR_KEY);
  CHECK(std::string(bb_status_name(BB_ERR_SHAPE)) == "ShapeError");

  REQUIRE(bb_engine_benchmarks(eng.e, &out) == BB_OK);
  CHECK(json::parse(take(out))["benchmarks"].size() == 7);

  const std::string fam = R"({"family":)" + json::parse(std::string(R"({"family_id":"code_generation","base_capability":"c","axis":"language","facets":[{"value":"python","use_case_id":"uc_python"},{"value":"golang","use_case_id":"uc_golang"}]})")).dump() + R"(,"k":20})";
  REQUIRE(bb_engine_audit_facets(eng.e, fam.c_str(), &out) == BB_OK);
  const auto f = json::parse(take(out));
  CHECK(f["per_facet"][0]["relevant_fraction"].get<double>() > f["per_facet"][1]["relevant_fraction"].get<double>());

  REQUIRE(bb_engine_audit_convergence(eng.e, R"({"use_case_id":"uc_chess","seed":3,"trials":10})", &out) == BB_OK);
  CHECK(json::parse(take(out))["trials"] == 10);
  CHECK(bb_engine_audit_convergence(eng.e, R"({"use_case_id":"uc_trivia","seed":3})", &out) == BB_ERR_STATE);

  int status = 0;
  REQUIRE(bb_engine_handle(eng.e, "GET", "/nowhere", "", &status, &out) == BB_OK);
  take(out);
  CHECK(status == 404);
}

TEST_CASE("engine creation failures") {
  bb_engine* e = nullptr;
  CHECK(bb_engine_create("/nonexistent/config.json", &e) == BB_ERR_IO);
  CHECK(e == nullptr);
  CHECK(bb_engine_create(nullptr, &e) == BB_ERR_ARGUMENT);
  CHECK(bb_engine_create_json(R"({"corpus":"fixture_corpus.jsonl"})", BB_TEST_DATA, &e) == BB_OK);
  bb_engine_destroy(e);
  bb_engine_destroy(nullptr);
}

TEST_CASE("standalone operations") {
  const auto dir = std::filesystem::temp_directory_path() / "bb_capi_test";
  std::filesystem::create_directories(dir);
  char* out = nullptr;
  const auto corpus_out = (dir / "corpus.jsonl").string();
  REQUIRE(bb_ingest(BB_TEST_DATA "/fixture_corpus.jsonl", 1, BB_TEST_DATA "/fixture_shorthand.jsonl",
                    corpus_out.c_str(), &out) == BB_OK);
  CHECK(json::parse(take(out))["items"] == 200);

  const auto idx = (dir / "dense.bbdi").string();
  REQUIRE(bb_index_build(BB_TEST_DATA "/fixture_corpus.jsonl", nullptr, "dense", "raw", idx.c_str(), nullptr, &out) ==
          BB_OK);
  take(out);
  CHECK(std::filesystem::file_size(idx) > 200 * 256 * 4);
  CHECK(bb_index_build(BB_TEST_DATA "/fixture_corpus.jsonl", nullptr, "dense", "shorthand", idx.c_str(), nullptr,
                       &out) == BB_ERR_STATE);
  CHECK(bb_index_build(BB_TEST_DATA "/fixture_corpus.jsonl", nullptr, "fuzzy", "raw", idx.c_str(), nullptr, &out) ==
        BB_ERR_ARGUMENT);

  const auto table = (dir / "sh.jsonl").string();
  REQUIRE(bb_translate_shorthand(BB_TEST_DATA "/fixture_corpus.jsonl", table.c_str(), nullptr, 4, &out) == BB_OK);
  CHECK(json::parse(take(out))["translated"] == 200);

  const auto judged = (dir / "judged.jsonl").string();
  {
    std::FILE* fp = std::fopen(judged.c_str(), "w");
    std::fputs(R"({"item_id":"a","benchmark":"B","score":0.9,"selection":1,"label":"relevant","judge_id":"s"}
{"item_id":"b","benchmark":"B","score":0.8,"selection":-1,"label":null,"judge_id":"s"}
{"item_id":"c","benchmark":"B","score":0.7,"selection":0,"label":"irrelevant","judge_id":"s"}
)",
               fp);
    std::fclose(fp);
  }
  REQUIRE(bb_eval_metrics(judged.c_str(), R"({"k":2,"gold":["a","b"]})", &out) == BB_OK);
  const auto m = json::parse(take(out));
  CHECK(m["method_precision"] == 0.5);
  CHECK(m["system_precision"] == 0.5);
  CHECK(m["recall"] == 0.5);
  CHECK(bb_eval_metrics(judged.c_str(), R"({"k":0})", &out) == BB_ERR_ARGUMENT);
  std::filesystem::remove_all(dir);
}
