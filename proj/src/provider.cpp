#include "ptts/provider.hpp"

#include <json.hpp>

#include <httplib.h>

#include <fstream>
#include <sstream>

#include "ptts/hash.hpp"

namespace ptts {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

long usage_field(const json& usage, const char* field) {
  auto it = usage.find(field);
  if (it != usage.end() && it->is_number()) {
    return it->get<long>();
  }
  return 0;
}

// Shared by the HTTP and mock adapters: both speak the chat-completions
// wire format.
TeacherTrace parse_chat_payload(const std::string& raw_payload,
                                std::string_view open_delim,
                                std::string_view close_delim) {
  json payload;
  try {
    payload = json::parse(raw_payload);
  } catch (const json::parse_error& e) {
    throw Error(Errc::trace_parse_error,
                std::string("payload is not JSON: ") + e.what());
  }
  auto choices = payload.find("choices");
  if (choices == payload.end() || !choices->is_array() || choices->empty()) {
    throw Error(Errc::trace_parse_error, "payload has no choices");
  }
  const json& message = choices->front().value("message", json::object());
  if (!message.contains("content") || !message["content"].is_string()) {
    throw Error(Errc::trace_parse_error, "choice has no message content");
  }

  TeacherTrace trace;
  trace.raw_payload = raw_payload;
  const std::string content = message["content"].get<std::string>();
  auto reasoning = message.find("reasoning_content");
  if (reasoning != message.end() && reasoning->is_string()) {
    // Dedicated reasoning channel: map channels directly.
    trace.reasoning_text = reasoning->get<std::string>();
    trace.response_text = content;
  } else {
    TraceSplit split = split_trace(content, open_delim, close_delim);
    trace.reasoning_text = std::move(split.reasoning);
    trace.response_text = std::move(split.response);
  }
  if (trace.response_text.empty()) {
    throw Error(Errc::trace_parse_error, "empty response text");
  }
  if (payload.contains("usage") && payload["usage"].is_object()) {
    const json& usage = payload["usage"];
    trace.usage.prompt_tokens = usage_field(usage, "prompt_tokens");
    trace.usage.completion_tokens = usage_field(usage, "completion_tokens");
    trace.usage.total_tokens = usage_field(usage, "total_tokens");
  }
  return trace;
}

class HttplibPoster : public HttpPoster {
 public:
  HttplibPoster(std::string base_url, int timeout_seconds)
      : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {}

  HttpResult post(const std::string& path, const std::string& body,
                  const std::map<std::string, std::string>& headers) override {
    httplib::Client client(base_url_);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);
    client.set_write_timeout(timeout_seconds_, 0);
    httplib::Headers request_headers;
    for (const auto& [key, value] : headers) {
      request_headers.emplace(key, value);
    }
    auto result = client.Post(path, request_headers, body, "application/json");
    if (!result) {
      return {0, "", httplib::to_string(result.error())};
    }
    return {result->status, result->body, ""};
  }

 private:
  std::string base_url_;
  int timeout_seconds_;
};

[[noreturn]] void throw_for_status(const HttpResult& result) {
  if (result.status == 0) {
    throw Error(Errc::provider_error, "transport failure: " + result.error,
                /*retryable=*/true);
  }
  const std::string excerpt = result.body.substr(0, 200);
  if (result.status == 401 || result.status == 403) {
    throw Error(Errc::auth_error,
                "status " + std::to_string(result.status) + ": " + excerpt);
  }
  if (result.status == 429) {
    throw Error(Errc::rate_limited, "status 429: " + excerpt,
                /*retryable=*/true);
  }
  throw Error(Errc::provider_error,
              "status " + std::to_string(result.status) + ": " + excerpt,
              /*retryable=*/result.status >= 500 || result.status == 408);
}

}  // namespace

TraceSplit split_trace(std::string_view text, std::string_view open_delim,
                       std::string_view close_delim) {
  TraceSplit split;
  if (open_delim.empty() || close_delim.empty()) {
    split.response = std::string(text);
    return split;
  }
  const std::size_t open_at = text.find(open_delim);
  if (open_at == std::string_view::npos) {
    split.response = std::string(text);
    return split;
  }
  const std::size_t inner_start = open_at + open_delim.size();
  const std::size_t close_at = text.find(close_delim, inner_start);
  if (close_at == std::string_view::npos) {
    throw Error(Errc::trace_parse_error,
                "unbalanced reasoning delimiters: open without close");
  }
  split.reasoning = std::string(text.substr(inner_start, close_at - inner_start));
  split.response = std::string(text.substr(0, open_at)) +
                   std::string(text.substr(close_at + close_delim.size()));
  return split;
}

std::unique_ptr<HttpPoster> make_httplib_poster(const std::string& base_url,
                                                int timeout_seconds) {
  return std::make_unique<HttplibPoster>(base_url, timeout_seconds);
}

ChatCompletionsProvider::ChatCompletionsProvider(ChatCompletionsOptions options)
    : options_(std::move(options)),
      poster_(make_httplib_poster(options_.base_url, options_.timeout_seconds)) {}

ChatCompletionsProvider::ChatCompletionsProvider(
    ChatCompletionsOptions options, std::unique_ptr<HttpPoster> poster)
    : options_(std::move(options)), poster_(std::move(poster)) {}

std::string ChatCompletionsProvider::build_request_body(
    const CompletionRequest& request) {
  ordered_json body;
  body["model"] = request.model_id;
  auto messages = ordered_json::array();
  if (!request.system_text.empty()) {
    messages.push_back({{"role", "system"}, {"content", request.system_text}});
  }
  messages.push_back({{"role", "user"}, {"content", request.prompt_text}});
  body["messages"] = messages;
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_output_tokens;
  body["stream"] = false;
  return body.dump();
}

std::string ChatCompletionsProvider::do_complete(
    const CompletionRequest& request) {
  std::map<std::string, std::string> headers;
  if (!options_.api_key.empty()) {
    headers["Authorization"] = "Bearer " + options_.api_key;
  }
  const HttpResult result =
      poster_->post(options_.path, build_request_body(request), headers);
  if (result.status != 200) {
    throw_for_status(result);
  }
  return result.body;
}

TeacherTrace ChatCompletionsProvider::parse_payload(
    const std::string& raw_payload) const {
  return parse_chat_payload(raw_payload, options_.reasoning_open,
                            options_.reasoning_close);
}

MockProvider::MockProvider(MockProviderOptions options)
    : options_(std::move(options)) {}

std::string MockProvider::synthesize_payload(const CompletionRequest& request) {
  // Pure function of the request; distinct prompts get distinct traces.
  const std::string digest =
      sha256_hex(request.model_id + "\x1f" + request.system_text + "\x1f" +
                 request.prompt_text);
  const std::string tag = digest.substr(0, 12);
  // Three digest hex chars -> a stable pseudo-answer in [0, 999].
  const unsigned answer =
      static_cast<unsigned>(std::stoul(digest.substr(12, 3), nullptr, 16)) % 1000u;

  const std::string reasoning =
      "Working through the problem (trace " + tag +
      "). First restate the givens, then derive the quantity asked for. "
      "After checking the arithmetic the result is " +
      std::to_string(answer) + ".";
  const std::string response = "The final answer is \\boxed{" +
                               std::to_string(answer) + "}. (mock " + tag + ")";

  ordered_json payload;
  payload["id"] = "mock-" + tag;
  payload["model"] = request.model_id;
  auto message = ordered_json::object();
  message["role"] = "assistant";
  message["content"] = "<think>" + reasoning + "</think>" + response;
  payload["choices"] = ordered_json::array({ordered_json{
      {"index", 0}, {"message", message}, {"finish_reason", "stop"}}});
  const long prompt_tokens = static_cast<long>(request.prompt_text.size() / 4 + 1);
  const long completion_tokens =
      static_cast<long>((reasoning.size() + response.size()) / 4 + 1);
  payload["usage"] = {{"prompt_tokens", prompt_tokens},
                      {"completion_tokens", completion_tokens},
                      {"total_tokens", prompt_tokens + completion_tokens}};
  return payload.dump();
}

std::string MockProvider::do_complete(const CompletionRequest& request) {
  const std::string digest = request_digest(*this, request);
  if (!options_.fixture_dir.empty()) {
    const auto fixture = options_.fixture_dir / (digest + ".json");
    std::ifstream in(fixture, std::ios::binary);
    if (in) {
      std::ostringstream buffer;
      buffer << in.rdbuf();
      return buffer.str();
    }
  }
  if (!options_.synthesize_missing) {
    throw Error(Errc::provider_error, "no fixture payload for " + digest);
  }
  return synthesize_payload(request);
}

TeacherTrace MockProvider::parse_payload(const std::string& raw_payload) const {
  return parse_chat_payload(raw_payload, options_.reasoning_open,
                            options_.reasoning_close);
}

std::string request_digest(const Provider& provider,
                           const CompletionRequest& request) {
  ordered_json material;
  material["adapter"] = provider.name();
  material["adapter_version"] = provider.adapter_version();
  material["model_id"] = request.model_id;
  material["system_text"] = request.system_text;
  material["prompt_text"] = request.prompt_text;
  material["temperature"] = request.temperature;
  material["max_output_tokens"] = request.max_output_tokens;
  return sha256_hex(material.dump());
}

}  // namespace ptts
