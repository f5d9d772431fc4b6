#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "ptts/corpus.hpp"

namespace ptts {

struct ProviderSettings {
  std::string adapter = "chat_completions";  // or "mock"
  std::string model_id = "DeepSeek-R1";
  std::string base_url;
  std::string base_url_env = "PTTS_BASE_URL";  // set -> overrides base_url
  std::string api_key_env = "PTTS_API_KEY";
  int max_in_flight = 4;
  std::string cache_dir = ".ptts-cache";
  std::string fixture_dir;     // mock adapter fixture payloads
  bool mock_synthesize = true;  // mock adapter: synthesize missing fixtures
};

struct DecodingSettings {
  double temperature = 0.0;
  int max_output_tokens = 20000;
  std::string system_text;
};

// One structured config file, sections per module; every field has a
// default so an empty file is valid. Command-line flags win over the file.
struct RunConfig {
  std::string seeds_path;
  CorpusConfig corpus;
  ProviderSettings provider;
  DecodingSettings decoding;
  std::string tokenizer_name = "whitespace";
  std::string output_dir = "out";
  std::size_t sequence_limit = 20000;
};

// Throws config_error with "<path>: <field>" context on bad values.
RunConfig load_run_config(const std::filesystem::path& path);

RunConfig default_run_config();

// Validates ranges (temperature >= 0, K >= 1, max_in_flight >= 1, ...).
void validate_run_config(const RunConfig& config);

}  // namespace ptts
