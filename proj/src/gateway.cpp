#include "ptts/gateway.hpp"

#include <json.hpp>

#include <algorithm>
#include <random>
#include <thread>

namespace ptts {

namespace {

using ordered_json = nlohmann::ordered_json;

std::chrono::milliseconds jittered(std::chrono::milliseconds base,
                                   double jitter) {
  if (jitter <= 0.0) return base;
  thread_local std::mt19937 rng{std::random_device{}()};
  std::uniform_real_distribution<double> spread(1.0 - jitter, 1.0 + jitter);
  const double ms = static_cast<double>(base.count()) * spread(rng);
  return std::chrono::milliseconds(std::max<long>(0, std::lround(ms)));
}

ordered_json request_echo(const CompletionRequest& request) {
  ordered_json echo;
  echo["model_id"] = request.model_id;
  echo["system_text"] = request.system_text;
  echo["prompt_text"] = request.prompt_text;
  echo["temperature"] = request.temperature;
  echo["max_output_tokens"] = request.max_output_tokens;
  return echo;
}

}  // namespace

TeacherGateway::TeacherGateway(std::shared_ptr<Provider> provider,
                               std::filesystem::path cache_dir,
                               int max_in_flight, RetryPolicy retry)
    : provider_(std::move(provider)),
      cache_(std::move(cache_dir)),
      retry_(retry),
      free_slots_(std::max(1, max_in_flight)) {}

CacheKey TeacherGateway::cache_key(const CompletionRequest& request) const {
  return {request_digest(*provider_, request)};
}

std::string TeacherGateway::fetch_with_retries(
    const CompletionRequest& request) {
  auto delay = retry_.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      return provider_->complete(request);
    } catch (const Error& e) {
      if (!e.retryable() || attempt >= retry_.max_attempts) {
        throw;
      }
    }
    std::this_thread::sleep_for(jittered(delay, retry_.jitter));
    delay = std::chrono::milliseconds(
        static_cast<long>(static_cast<double>(delay.count()) * retry_.multiplier));
  }
}

std::string TeacherGateway::obtain_payload(const CompletionRequest& request,
                                           const std::string& digest,
                                           bool& was_cached) {
  if (auto envelope = cache_.load(digest)) {
    try {
      auto parsed = ordered_json::parse(*envelope);
      if (parsed.contains("payload") && parsed["payload"].is_string()) {
        was_cached = true;
        return parsed["payload"].get<std::string>();
      }
    } catch (const nlohmann::json::parse_error&) {
      // Corrupt entry: fall through and refetch; store() overwrites it.
    }
  }

  was_cached = false;
  {
    std::unique_lock<std::mutex> lock(slots_mutex_);
    slots_cv_.wait(lock, [this] { return free_slots_ > 0; });
    --free_slots_;
  }
  std::string payload;
  try {
    payload = fetch_with_retries(request);
  } catch (...) {
    {
      std::lock_guard<std::mutex> lock(slots_mutex_);
      ++free_slots_;
    }
    slots_cv_.notify_one();
    throw;
  }
  {
    std::lock_guard<std::mutex> lock(slots_mutex_);
    ++free_slots_;
  }
  slots_cv_.notify_one();

  ordered_json envelope;
  envelope["adapter"] = provider_->name();
  envelope["adapter_version"] = provider_->adapter_version();
  envelope["request"] = request_echo(request);
  envelope["payload"] = payload;
  cache_.store(digest, envelope.dump());
  return payload;
}

TeacherTrace TeacherGateway::query(const CompletionRequest& request) {
  if (request.temperature < 0.0) {
    throw Error(Errc::config_error, "temperature must be >= 0");
  }
  if (request.max_output_tokens <= 0) {
    throw Error(Errc::config_error, "max_output_tokens must be > 0");
  }

  const std::string digest = cache_key(request).digest;

  // Single-flight: the first caller on a digest fetches, the rest share.
  std::shared_future<std::string> future;
  bool leader = false;
  std::promise<std::string> promise;
  {
    std::lock_guard<std::mutex> lock(inflight_mutex_);
    auto it = inflight_.find(digest);
    if (it == inflight_.end()) {
      future = promise.get_future().share();
      inflight_.emplace(digest, future);
      leader = true;
    } else {
      future = it->second;
    }
  }

  bool was_cached = false;
  if (leader) {
    try {
      promise.set_value(obtain_payload(request, digest, was_cached));
    } catch (...) {
      promise.set_exception(std::current_exception());
    }
    {
      std::lock_guard<std::mutex> lock(inflight_mutex_);
      inflight_.erase(digest);
    }
  }

  const std::string payload = future.get();  // rethrows the leader's error
  TeacherTrace trace = provider_->parse_payload(payload);
  trace.cache_hit = leader ? was_cached : true;
  return trace;
}

}  // namespace ptts
