#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace ptts {

// One file per digest under a directory; inspectable and rsync-able.
// Writes go to a temp file first and are renamed into place, so concurrent
// readers never observe a partial entry.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<std::string> load(const std::string& digest) const;
  void store(const std::string& digest, std::string_view content) const;
  bool contains(const std::string& digest) const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path entry_path(const std::string& digest) const;

  std::filesystem::path dir_;
};

}  // namespace ptts
