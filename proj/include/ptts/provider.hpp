#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "ptts/errors.hpp"

namespace ptts {

struct CompletionRequest {
  std::string model_id;
  std::string prompt_text;
  double temperature = 0.0;
  int max_output_tokens = 1;
  std::string system_text;
};

struct TokenUsage {
  long prompt_tokens = 0;
  long completion_tokens = 0;
  long total_tokens = 0;
};

struct TeacherTrace {
  std::string reasoning_text;
  std::string response_text;
  std::string raw_payload;
  TokenUsage usage;
  bool cache_hit = false;
};

struct TraceSplit {
  std::string reasoning;
  std::string response;
};

// Single-channel split: reasoning is the span between the first open/close
// delimiter pair, response is everything outside it. No delimiters means the
// whole text is response. Throws trace_parse_error when an open delimiter has
// no matching close. No byte outside the delimiters is dropped.
TraceSplit split_trace(std::string_view text, std::string_view open_delim,
                       std::string_view close_delim);

struct HttpResult {
  int status = 0;  // 0 = transport failure (connect/timeout)
  std::string body;
  std::string error;  // transport-level detail when status == 0
};

// Thin POST seam so providers can be exercised without a network.
class HttpPoster {
 public:
  virtual ~HttpPoster() = default;
  virtual HttpResult post(const std::string& path, const std::string& body,
                          const std::map<std::string, std::string>& headers) = 0;
};

// cpp-httplib implementation; base_url like "https://api.example.com".
std::unique_ptr<HttpPoster> make_httplib_poster(const std::string& base_url,
                                                int timeout_seconds = 600);

// A teacher endpoint adapter. complete() is the one network effect and is
// instrumented: calls_made() counts every attempt that reached do_complete.
class Provider {
 public:
  virtual ~Provider() = default;

  virtual std::string name() const = 0;
  // Participates in the cache key; bump when request/parse mechanics change.
  virtual std::string adapter_version() const = 0;

  std::string complete(const CompletionRequest& request) {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return do_complete(request);
  }
  long calls_made() const { return calls_.load(std::memory_order_relaxed); }

  // Splits a raw payload into (reasoning, response) and usage.
  // Throws trace_parse_error on malformed payloads or empty response text.
  virtual TeacherTrace parse_payload(const std::string& raw_payload) const = 0;

 protected:
  virtual std::string do_complete(const CompletionRequest& request) = 0;

 private:
  std::atomic<long> calls_{0};
};

struct ChatCompletionsOptions {
  std::string base_url;
  std::string api_key;  // resolved from the configured env var by the caller
  std::string path = "/v1/chat/completions";
  std::string reasoning_open = "<think>";
  std::string reasoning_close = "</think>";
  int timeout_seconds = 600;
};

// OpenAI-style chat completions. Replies with a dedicated reasoning channel
// (message.reasoning_content) map channels directly; single-channel replies
// go through split_trace with the configured delimiters.
class ChatCompletionsProvider : public Provider {
 public:
  explicit ChatCompletionsProvider(ChatCompletionsOptions options);
  ChatCompletionsProvider(ChatCompletionsOptions options,
                          std::unique_ptr<HttpPoster> poster);

  std::string name() const override { return "chat_completions"; }
  std::string adapter_version() const override { return "1"; }
  TeacherTrace parse_payload(const std::string& raw_payload) const override;

 protected:
  std::string do_complete(const CompletionRequest& request) override;

 public:
  static std::string build_request_body(const CompletionRequest& request);

 private:
  ChatCompletionsOptions options_;
  std::unique_ptr<HttpPoster> poster_;
};

struct MockProviderOptions {
  // Fixture payloads live at <fixture_dir>/<request digest>.json.
  std::filesystem::path fixture_dir;
  // When no fixture matches, synthesize a deterministic payload instead of
  // failing. The payload is a pure function of the request.
  bool synthesize_missing = true;
  std::string reasoning_open = "<think>";
  std::string reasoning_close = "</think>";
};

// Hermetic stand-in speaking the same wire format as ChatCompletionsProvider.
class MockProvider : public Provider {
 public:
  explicit MockProvider(MockProviderOptions options = {});

  std::string name() const override { return "mock"; }
  std::string adapter_version() const override { return "1"; }
  TeacherTrace parse_payload(const std::string& raw_payload) const override;

  static std::string synthesize_payload(const CompletionRequest& request);

 protected:
  std::string do_complete(const CompletionRequest& request) override;

 private:
  MockProviderOptions options_;
};

// Digest material shared by the gateway and the mock fixture lookup.
std::string request_digest(const Provider& provider,
                           const CompletionRequest& request);

}  // namespace ptts
