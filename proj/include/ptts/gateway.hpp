#pragma once

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <future>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include "ptts/cache.hpp"
#include "ptts/provider.hpp"

namespace ptts {

struct CacheKey {
  std::string digest;
  bool operator==(const CacheKey&) const = default;
};

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds initial_backoff{1000};
  double multiplier = 2.0;
  double jitter = 0.1;  // +/- fraction applied to each delay
};

// Wraps a provider with a content-addressed cache, capped exponential-backoff
// retries, a bounded in-flight limit, and single-flight coalescing of
// concurrent identical requests. With a warm cache, query() performs zero
// network calls.
class TeacherGateway {
 public:
  TeacherGateway(std::shared_ptr<Provider> provider,
                 std::filesystem::path cache_dir, int max_in_flight = 4,
                 RetryPolicy retry = {});

  CacheKey cache_key(const CompletionRequest& request) const;

  // Cached trace when the key exists, otherwise one provider call (retried
  // per policy), persisted atomically. Throws auth_error, rate_limited,
  // provider_error, or trace_parse_error.
  TeacherTrace query(const CompletionRequest& request);

  long network_calls() const { return provider_->calls_made(); }
  const Provider& provider() const { return *provider_; }
  const ResponseCache& cache() const { return cache_; }

 private:
  std::string fetch_with_retries(const CompletionRequest& request);
  std::string obtain_payload(const CompletionRequest& request,
                             const std::string& digest, bool& was_cached);

  std::shared_ptr<Provider> provider_;
  ResponseCache cache_;
  RetryPolicy retry_;

  // Bounded concurrency across all callers.
  std::mutex slots_mutex_;
  std::condition_variable slots_cv_;
  int free_slots_;

  // Single-flight: concurrent misses on one digest share one fetch.
  std::mutex inflight_mutex_;
  std::unordered_map<std::string, std::shared_future<std::string>> inflight_;
};

}  // namespace ptts
