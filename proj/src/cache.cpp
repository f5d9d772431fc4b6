#include "ptts/cache.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace ptts {

namespace {

std::string unique_suffix() {
  static std::atomic<unsigned long> counter{0};
  return std::to_string(counter.fetch_add(1, std::memory_order_relaxed));
}

}  // namespace

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path ResponseCache::entry_path(const std::string& digest) const {
  return dir_ / (digest + ".json");
}

bool ResponseCache::contains(const std::string& digest) const {
  return std::filesystem::exists(entry_path(digest));
}

std::optional<std::string> ResponseCache::load(const std::string& digest) const {
  std::ifstream in(entry_path(digest), std::ios::binary);
  if (!in) {
    return std::nullopt;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void ResponseCache::store(const std::string& digest,
                          std::string_view content) const {
  const auto target = entry_path(digest);
  const auto tmp = dir_ / (digest + ".tmp." + unique_suffix());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cache write failed: " + tmp.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw std::runtime_error("cache write failed: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace ptts
