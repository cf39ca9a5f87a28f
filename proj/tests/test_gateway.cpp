#include <doctest.h>

#include <atomic>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "bb/anchors.h"
#include "bb/errors.h"
#include "bb/gateway.h"
#include "bb/judge.h"

using namespace bb;
using nlohmann::json;

namespace {

// Scripted transport: answers with `respond(call_index, body)` and records
// the peak number of requests in flight.
class FakeTransport : public HttpTransport {
 public:
  std::function<HttpResponse(int, const std::string&)> respond;
  std::atomic<int> calls{0};
  std::atomic<int> in_flight{0};
  std::atomic<int> peak{0};
  std::chrono::milliseconds hold{0};

  HttpResponse post(const std::string&, const std::string& body, const std::vector<std::pair<std::string, std::string>>&,
                    std::chrono::milliseconds) override {
    const int n = calls++;
    const int now = ++in_flight;
    int p = peak.load();
    while (now > p && !peak.compare_exchange_weak(p, now)) {
    }
    if (hold.count()) std::this_thread::sleep_for(hold);
    HttpResponse r = respond(n, body);
    --in_flight;
    return r;
  }
};

GatewayConfig remote_config(std::size_t parallel = 2) {
  GatewayConfig c;
  c.mode = GatewayMode::remote;
  c.endpoint = "http://fake.invalid/v1";
  c.max_parallel = parallel;
  c.retries = 2;
  c.backoff = std::chrono::milliseconds(1);
  c.dimension = 4;
  return c;
}

HttpResponse text(const std::string& t) { return {200, json{{"text", t}}.dump()}; }

UseCase use_case(const std::string& text) {
  UseCase u;
  u.use_case_id = "u";
  u.text = text;
  u.category = UseCaseCategory::topics;
  return u;
}

Corpus small_corpus() {
  std::vector<BenchmarkItem> items;
  for (const auto& [id, t] : std::vector<std::pair<std::string, std::string>>{
           {"c1", "chess tactics puzzle"}, {"c2", "chess endgame"}, {"m1", "algebra equation"}}) {
    BenchmarkItem it;
    it.item_id = id;
    it.benchmark_id = id.substr(0, 1);
    it.text = t;
    it.answer = "a";
    items.push_back(it);
  }
  return Corpus::from_items(items);
}

}  // namespace

TEST_CASE("stub completion is deterministic and well-formed") {
  StubCompletionGateway lm;
  const Variables q{{"query", "chess tactics"}};
  const auto a = lm.complete(TemplateId::rephrasing, q);
  CHECK(a == lm.complete(TemplateId::rephrasing, q));
  CHECK_NOTHROW(validate_response(TemplateId::rephrasing, a));
  CHECK_NOTHROW(validate_response(TemplateId::example_synthesis, lm.complete(TemplateId::example_synthesis, q)));
  CHECK_NOTHROW(validate_response(TemplateId::shorthand_rewrite,
                                  lm.complete(TemplateId::shorthand_rewrite, {{"text", "Chess, tactics!"}})));
  CHECK(lm.complete(TemplateId::selection_judge, {{"user_intent", "chess tactics"}, {"test_case", "a chess puzzle"}}) ==
        "<score>1</score>");
  CHECK(lm.complete(TemplateId::evaluation_judge, {{"user_intent", "chess tactics"}, {"test_case", "algebra"}}) ==
        "<label>IRRELEVANT</label>");
  CHECK_THROWS_AS(lm.complete(TemplateId::rephrasing, {}), TemplateError);
}

TEST_CASE("stub embeddings are unit length and deterministic") {
  StubEmbeddingGateway e(64, 3);
  const auto v = e.embed({"hello world", "hello world", "!!!"}, "", {});
  REQUIRE(v.size() == 3);
  CHECK(v[0] == v[1]);
  for (const auto& x : v) CHECK(is_normalized(x));
  CHECK(v[0].dimension() == 64);
  CHECK_THROWS_AS(e.embed({}, "", {}), ArgumentError);
  StubEmbeddingGateway other_seed(64, 4);
  CHECK(other_seed.embed_one("hello world") != v[0]);
}

TEST_CASE("remote completion retries transient failures") {
  auto t = std::make_shared<FakeTransport>();
  t->respond = [](int n, const std::string&) { return n < 2 ? HttpResponse{503, ""} : text("<score>0</score>"); };
  RemoteCompletionGateway lm(remote_config(), t);
  CHECK(lm.complete(TemplateId::selection_judge, {{"user_intent", "a"}, {"test_case", "b"}}) == "<score>0</score>");
  CHECK(t->calls == 3);
}

TEST_CASE("remote completion gives up after the retry budget") {
  auto t = std::make_shared<FakeTransport>();
  t->respond = [](int, const std::string&) -> HttpResponse { throw TransportFailure("connection refused"); };
  RemoteCompletionGateway lm(remote_config(), t);
  CHECK_THROWS_AS(lm.complete(TemplateId::selection_judge, {{"user_intent", "a"}, {"test_case", "b"}}), GatewayError);
  CHECK(t->calls == 3);

  auto bad = std::make_shared<FakeTransport>();
  bad->respond = [](int, const std::string&) { return HttpResponse{401, "nope"}; };
  RemoteCompletionGateway lm2(remote_config(), bad);
  CHECK_THROWS_AS(lm2.complete(TemplateId::selection_judge, {{"user_intent", "a"}, {"test_case", "b"}}),
                  GatewayError);
  CHECK(bad->calls == 1);
}

TEST_CASE("an unreachable endpoint is a GatewayError") {
  auto cfg = remote_config();
  cfg.endpoint = "http://127.0.0.1:1/v1";
  cfg.retries = 0;
  cfg.timeout = std::chrono::milliseconds(500);
  RemoteCompletionGateway lm(cfg, make_http_transport());
  CHECK_THROWS_AS(lm.complete(TemplateId::selection_judge, {{"user_intent", "a"}, {"test_case", "b"}}), GatewayError);
}

TEST_CASE("remote completion flags malformed answers") {
  auto t = std::make_shared<FakeTransport>();
  t->respond = [](int, const std::string&) { return text("I think it is relevant"); };
  RemoteCompletionGateway lm(remote_config(), t);
  CHECK_THROWS_AS(lm.complete(TemplateId::selection_judge, {{"user_intent", "a"}, {"test_case", "b"}}),
                  ResponseFormatError);
  t->respond = [](int, const std::string&) { return HttpResponse{200, "not json"}; };
  CHECK_THROWS_AS(lm.complete(TemplateId::selection_judge, {{"user_intent", "a"}, {"test_case", "b"}}),
                  ResponseFormatError);
}

TEST_CASE("remote embeddings batch, normalise and respect max_parallel") {
  auto t = std::make_shared<FakeTransport>();
  t->hold = std::chrono::milliseconds(20);
  t->respond = [](int, const std::string& body) {
    const auto req = json::parse(body);
    json vecs = json::array();
    for (std::size_t i = 0; i < req["inputs"].size(); ++i) vecs.push_back({3.0, 4.0, 0.0, 0.0});
    return HttpResponse{200, json{{"vectors", vecs}}.dump()};
  };
  RemoteEmbeddingGateway e(remote_config(2), t);
  std::vector<std::string> texts(300, "x");
  const auto v = e.embed(texts, "inst", {{"q", "d"}});
  REQUIRE(v.size() == 300);
  CHECK(v[299].values[0] == doctest::Approx(0.6));
  CHECK(t->calls == 5);
  CHECK(t->peak <= 2);
  CHECK(t->peak >= 1);

  t->respond = [](int, const std::string&) { return HttpResponse{200, R"({"vectors":[[1,2]]})"}; };
  CHECK_THROWS_AS(e.embed({"x"}, "", {}), ResponseFormatError);
}

TEST_CASE("completion concurrency cap holds under fan-out") {
  auto t = std::make_shared<FakeTransport>();
  t->hold = std::chrono::milliseconds(5);
  t->respond = [](int, const std::string&) { return text("<score>1</score>"); };
  auto lm = std::make_shared<RemoteCompletionGateway>(remote_config(3), t);
  std::vector<RetrievalHit> hits;
  const auto c = small_corpus();
  for (int i = 0; i < 30; ++i) hits.push_back({c.items()[i % 3].item_id, 1.0, 0, static_cast<std::size_t>(i + 1)});
  const auto r = filter_hits(use_case("chess"), hits, c, *lm);
  CHECK(r.kept.size() == 30);
  CHECK(t->peak <= 3);
}

TEST_CASE("anchor strategies") {
  StubCompletionGateway lm;
  const auto uc = use_case("chess tactics");
  const auto orig = generate_anchors(uc, AnchorStrategy::original, lm);
  CHECK(orig.anchors == std::vector<std::string>{"chess tactics"});
  for (auto s : {AnchorStrategy::rephrasing, AnchorStrategy::example_synthesis, AnchorStrategy::shorthand}) {
    const auto a = generate_anchors(uc, s, lm);
    CHECK(a.anchors.size() == expected_anchor_count(s));
    CHECK(a.target_space == (s == AnchorStrategy::shorthand ? Space::shorthand : Space::raw));
    CHECK(parse_strategy(strategy_name(s)) == s);
  }
  CHECK(generate_anchors(uc, AnchorStrategy::shorthand, lm).anchors[0] == "chess & tactics");
  CHECK_THROWS_AS(generate_anchors(use_case(""), AnchorStrategy::original, lm), ArgumentError);
}

TEST_CASE("anchors re-ask once, then fail") {
  auto t = std::make_shared<FakeTransport>();
  t->respond = [](int n, const std::string&) {
    return n == 0 ? text("garbage")
                  : text("<refinements><refinement>a</refinement><refinement>b</refinement>"
                         "<refinement>c</refinement></refinements>");
  };
  RemoteCompletionGateway lm(remote_config(), t);
  CHECK(generate_anchors(use_case("q"), AnchorStrategy::rephrasing, lm).anchors ==
        std::vector<std::string>{"a", "b", "c"});
  CHECK(t->calls == 2);

  t->calls = 0;
  t->respond = [](int, const std::string&) { return text("<refinements><refinement>a</refinement></refinements>"); };
  CHECK_THROWS_AS(generate_anchors(use_case("q"), AnchorStrategy::rephrasing, lm), AnchorFormatError);
  CHECK(t->calls == 2);

  t->respond = [](int, const std::string&) { return HttpResponse{500, ""}; };
  CHECK_THROWS_AS(generate_anchors(use_case("q"), AnchorStrategy::rephrasing, lm), GatewayError);
}

TEST_CASE("corpus translation reports rejects and gateway failures") {
  StubCompletionGateway stub;
  const auto c = small_corpus();
  const auto ok = translate_corpus_to_shorthand(c, stub, 4);
  CHECK(ok.table.size() == 3);
  CHECK(ok.table.at("c1") == "chess & tactics & puzzle");

  auto t = std::make_shared<FakeTransport>();
  t->respond = [](int, const std::string& body) {
    const auto full = json::parse(body)["prompt"].get<std::string>();
    const auto prompt = full.substr(full.rfind("Text:"));
    if (prompt.find("endgame") != std::string::npos) return HttpResponse{500, ""};
    if (prompt.find("algebra") != std::string::npos) return text("<shorthand>a & b & c & d & e</shorthand>");
    return text("<shorthand>chess & tactics</shorthand>");
  };
  auto cfg = remote_config();
  cfg.retries = 0;
  RemoteCompletionGateway lm(cfg, t);
  const auto mixed = translate_corpus_to_shorthand(c, lm, 2);
  CHECK(mixed.table.size() == 1);
  CHECK(mixed.rejects == std::vector<std::string>{"m1"});
  CHECK(mixed.gateway_failures == std::vector<std::string>{"c2"});
  CHECK_FALSE(mixed.gateway_error.empty());
}

TEST_CASE("filter and judge keep input order and count failures") {
  StubCompletionGateway lm;
  const auto c = small_corpus();
  std::vector<RetrievalHit> hits{{"m1", 0.9, 0, 1}, {"c1", 0.8, 0, 2}, {"c2", 0.7, 0, 3}};
  const auto f = filter_hits(use_case("chess tactics"), hits, c, lm);
  REQUIRE(f.judged.size() == 3);
  CHECK(f.judged[0].selection == SelectionScore::negative);
  CHECK(f.judged[1].selection == SelectionScore::positive);
  CHECK(f.judged[2].selection == SelectionScore::positive);
  CHECK(f.removed == 1);
  REQUIRE(f.kept.size() == 2);
  CHECK(f.kept[0].hit.item_id == "c1");
  const auto j = judge_relevance(use_case("chess tactics"), f.kept, c, lm);
  CHECK(j.hits[0].label == RelevanceLabel::relevant);
  CHECK(j.hits[1].label == RelevanceLabel::relevant);
  CHECK(j.failures == 0);

  auto t = std::make_shared<FakeTransport>();
  t->respond = [](int, const std::string&) { return text("unparseable"); };
  RemoteCompletionGateway bad(remote_config(), t);
  const auto jf = judge_relevance(use_case("chess"), f.kept, c, bad);
  CHECK(jf.failures == 2);
  CHECK(jf.hits[0].label_failed);
  const auto ff = filter_hits(use_case("chess"), hits, c, bad);
  CHECK(ff.failures == 3);
  CHECK(ff.kept.empty());
}

TEST_CASE("judged JSONL round trip and mean relevance") {
  JudgedHit a;
  a.hit = {"x", 0.5, 1, 1};
  a.benchmark_id = "B";
  a.selection = SelectionScore::maybe;
  a.label = RelevanceLabel::partially_relevant;
  a.judge_id = "stub";
  JudgedHit b = a;
  b.hit = {"y", 0.25, 0, 2};
  b.selection.reset();
  b.label.reset();
  b.label_failed = true;
  const auto back = parse_judged_jsonl(judged_to_jsonl({a, b}));
  REQUIRE(back.size() == 2);
  CHECK(back[0].hit.item_id == "x");
  CHECK(back[0].selection == SelectionScore::maybe);
  CHECK(back[0].label == RelevanceLabel::partially_relevant);
  CHECK(back[1].label_failed);
  CHECK_FALSE(back[1].label.has_value());

  CHECK(mean_relevance({RelevanceLabel::relevant, RelevanceLabel::partially_relevant, RelevanceLabel::irrelevant}) ==
        doctest::Approx(0.5));
  CHECK_THROWS_AS(mean_relevance({}), ArgumentError);
}
