#include <doctest.h>

#include <json.hpp>

#include <memory>
#include <vector>

#include "ptts/diversity.hpp"
#include "ptts/gateway.hpp"
#include "test_support.hpp"

using namespace ptts;
using ptts::testing::fresh_dir;

namespace {

struct RecordedCall {
  std::string path;
  std::string body;
  std::map<std::string, std::string> headers;
};

// Scripted HTTP endpoint: pops one result per call, records everything.
class ScriptedPoster : public HttpPoster {
 public:
  explicit ScriptedPoster(std::vector<HttpResult> script)
      : script_(std::move(script)) {}

  HttpResult post(const std::string& path, const std::string& body,
                  const std::map<std::string, std::string>& headers) override {
    calls.push_back({path, body, headers});
    if (script_.empty()) return {500, "script exhausted", ""};
    HttpResult next = script_.front();
    script_.erase(script_.begin());
    return next;
  }

  std::vector<RecordedCall> calls;

 private:
  std::vector<HttpResult> script_;
};

CompletionRequest request_fixture() {
  CompletionRequest request;
  request.model_id = "DeepSeek-R1";
  request.prompt_text = "Think step by step. Find p+q.";
  request.temperature = 0.0;
  request.max_output_tokens = 2048;
  request.system_text = "You are a careful solver.";
  return request;
}

std::shared_ptr<ChatCompletionsProvider> provider_with(
    std::unique_ptr<HttpPoster> poster) {
  ChatCompletionsOptions options;
  options.base_url = "https://example.invalid";
  options.api_key = "sk-test";
  return std::make_shared<ChatCompletionsProvider>(std::move(options),
                                                   std::move(poster));
}

}  // namespace

TEST_CASE("chat request bodies carry the full decoding protocol") {
  const std::string body =
      ChatCompletionsProvider::build_request_body(request_fixture());
  const auto parsed = nlohmann::json::parse(body);
  CHECK(parsed["model"] == "DeepSeek-R1");
  CHECK(parsed["temperature"] == 0.0);
  CHECK(parsed["max_tokens"] == 2048);
  CHECK(parsed["stream"] == false);
  REQUIRE(parsed["messages"].size() == 2);
  CHECK(parsed["messages"][0]["role"] == "system");
  CHECK(parsed["messages"][1]["role"] == "user");
  CHECK(parsed["messages"][1]["content"] == "Think step by step. Find p+q.");

  // no system message when system_text is empty
  CompletionRequest bare = request_fixture();
  bare.system_text.clear();
  const auto no_system = nlohmann::json::parse(
      ChatCompletionsProvider::build_request_body(bare));
  REQUIRE(no_system["messages"].size() == 1);
  CHECK(no_system["messages"][0]["role"] == "user");
}

TEST_CASE("successful chat replies flow through the gateway") {
  auto poster = std::make_unique<ScriptedPoster>(std::vector<HttpResult>{
      {200,
       R"({"choices":[{"message":{"content":"y text","reasoning_content":"r text"}}],)"
       R"("usage":{"prompt_tokens":11,"completion_tokens":22,"total_tokens":33}})",
       ""}});
  auto* recorder = poster.get();
  TeacherGateway gateway(provider_with(std::move(poster)), fresh_dir("http_ok"),
                         4);

  const TeacherTrace trace = gateway.query(request_fixture());
  CHECK(trace.reasoning_text == "r text");
  CHECK(trace.response_text == "y text");
  CHECK(trace.usage.prompt_tokens == 11);
  CHECK(trace.usage.completion_tokens == 22);
  CHECK(trace.usage.total_tokens == 33);

  REQUIRE(recorder->calls.size() == 1);
  CHECK(recorder->calls[0].path == "/v1/chat/completions");
  CHECK(recorder->calls[0].headers.at("Authorization") == "Bearer sk-test");
}

TEST_CASE("status codes map to the right error classes") {
  RetryPolicy fast;
  fast.initial_backoff = std::chrono::milliseconds(1);
  fast.jitter = 0.0;

  SUBCASE("401 is an auth error, not retried") {
    auto poster = std::make_unique<ScriptedPoster>(
        std::vector<HttpResult>{{401, "bad key", ""}});
    auto provider = provider_with(std::move(poster));
    TeacherGateway gateway(provider, fresh_dir("http_401"), 4, fast);
    try {
      gateway.query(request_fixture());
      FAIL("expected auth_error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::auth_error);
    }
    CHECK(provider->calls_made() == 1);
  }

  SUBCASE("429 retries then surfaces rate_limited") {
    auto poster = std::make_unique<ScriptedPoster>(std::vector<HttpResult>(
        10, HttpResult{429, "slow down", ""}));
    auto provider = provider_with(std::move(poster));
    TeacherGateway gateway(provider, fresh_dir("http_429"), 4, fast);
    try {
      gateway.query(request_fixture());
      FAIL("expected rate_limited");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::rate_limited);
    }
    CHECK(provider->calls_made() == 5);  // full retry budget
  }

  SUBCASE("5xx retries and recovers") {
    auto poster = std::make_unique<ScriptedPoster>(std::vector<HttpResult>{
        {503, "overloaded", ""},
        {0, "", "connection timed out"},
        {200, R"({"choices":[{"message":{"content":"recovered"}}]})", ""}});
    auto provider = provider_with(std::move(poster));
    TeacherGateway gateway(provider, fresh_dir("http_5xx"), 4, fast);
    CHECK(gateway.query(request_fixture()).response_text == "recovered");
    CHECK(provider->calls_made() == 3);
  }

  SUBCASE("4xx other than auth/429 fails fast") {
    auto poster = std::make_unique<ScriptedPoster>(
        std::vector<HttpResult>{{400, "bad request", ""}});
    auto provider = provider_with(std::move(poster));
    TeacherGateway gateway(provider, fresh_dir("http_400"), 4, fast);
    try {
      gateway.query(request_fixture());
      FAIL("expected provider_error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::provider_error);
    }
    CHECK(provider->calls_made() == 1);
  }
}

TEST_CASE("malformed payloads raise trace_parse_error") {
  MockProvider provider;
  CHECK_THROWS_AS(provider.parse_payload("not json"), Error);
  CHECK_THROWS_AS(provider.parse_payload(R"({"choices":[]})"), Error);
  CHECK_THROWS_AS(
      provider.parse_payload(R"({"choices":[{"message":{}}]})"), Error);
  // reasoning-only content leaves an empty response
  CHECK_THROWS_AS(provider.parse_payload(
                      R"({"choices":[{"message":{"content":"<think>r</think>"}}]})"),
                  Error);
}

TEST_CASE("http embedder caches per text") {
  const std::string vector_reply =
      R"({"data":[{"embedding":[0.25,-0.5,1.0]}]})";
  auto poster = std::make_unique<ScriptedPoster>(std::vector<HttpResult>{
      {200, vector_reply, ""}, {200, vector_reply, ""}});
  auto* recorder = poster.get();

  HttpEmbedderOptions options;
  options.base_url = "https://example.invalid";
  options.api_key = "sk-embed";
  const auto cache_dir = fresh_dir("embed_cache");
  HttpEmbedder embedder(options, cache_dir, std::move(poster));

  const auto vectors = embedder.embed({"alpha", "alpha"});
  REQUIRE(vectors.size() == 2);
  CHECK(vectors[0] == EmbeddingVector{0.25, -0.5, 1.0});
  CHECK(vectors[0] == vectors[1]);
  CHECK(embedder.network_calls() == 1);  // second hit came from cache
  REQUIRE(recorder->calls.size() == 1);
  CHECK(recorder->calls[0].path == "/v1/embeddings");
  const auto sent = nlohmann::json::parse(recorder->calls[0].body);
  CHECK(sent["model"] == "text-embedding-ada-002");
  CHECK(sent["input"] == "alpha");

  // a new embedder over the same cache directory stays offline
  auto offline_poster = std::make_unique<ScriptedPoster>(std::vector<HttpResult>{});
  HttpEmbedder offline(options, cache_dir, std::move(offline_poster));
  CHECK(offline.embed({"alpha"})[0] == EmbeddingVector{0.25, -0.5, 1.0});
  CHECK(offline.network_calls() == 0);
}
