#include "ptts/config.hpp"

#include <json.hpp>

#include <fstream>

namespace ptts {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void bad_field(const std::filesystem::path& path,
                            const std::string& field,
                            const std::string& detail) {
  throw Error(Errc::config_error,
              path.string() + ": " + field + ": " + detail);
}

template <typename T>
void read_into(const ordered_json& section, const char* key, T& target,
               const std::filesystem::path& path, const std::string& prefix) {
  auto it = section.find(key);
  if (it == section.end()) return;
  try {
    target = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    bad_field(path, prefix + key, "wrong type");
  }
}

}  // namespace

RunConfig default_run_config() { return RunConfig{}; }

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::config_error, path.string() + ": cannot open");
  }
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::config_error, path.string() + ": " + e.what());
  }
  if (!doc.is_object()) {
    bad_field(path, "<root>", "must be a JSON object");
  }

  RunConfig config;
  if (doc.contains("seeds")) {
    read_into(doc["seeds"], "path", config.seeds_path, path, "seeds.");
  }
  if (doc.contains("corpus")) {
    const auto& section = doc["corpus"];
    std::string mode_name(to_string(config.corpus.mode));
    read_into(section, "mode", mode_name, path, "corpus.");
    auto mode = corpus_mode_from(mode_name);
    if (!mode) bad_field(path, "corpus.mode", "unknown mode '" + mode_name + "'");
    config.corpus.mode = *mode;

    std::string principle_name(to_string(config.corpus.single_principle));
    read_into(section, "single_principle", principle_name, path, "corpus.");
    auto principle = principle_id_from(principle_name);
    if (!principle) {
      bad_field(path, "corpus.single_principle",
                "unknown principle '" + principle_name + "'");
    }
    config.corpus.single_principle = *principle;
    read_into(section, "reward_variant_count", config.corpus.reward_variant_count,
              path, "corpus.");
  }
  if (doc.contains("provider")) {
    const auto& section = doc["provider"];
    read_into(section, "adapter", config.provider.adapter, path, "provider.");
    read_into(section, "model_id", config.provider.model_id, path, "provider.");
    read_into(section, "base_url", config.provider.base_url, path, "provider.");
    read_into(section, "base_url_env", config.provider.base_url_env, path,
              "provider.");
    read_into(section, "api_key_env", config.provider.api_key_env, path,
              "provider.");
    read_into(section, "max_in_flight", config.provider.max_in_flight, path,
              "provider.");
    read_into(section, "cache_dir", config.provider.cache_dir, path, "provider.");
    read_into(section, "fixture_dir", config.provider.fixture_dir, path,
              "provider.");
    read_into(section, "mock_synthesize", config.provider.mock_synthesize, path,
              "provider.");
  }
  if (doc.contains("decoding")) {
    const auto& section = doc["decoding"];
    read_into(section, "temperature", config.decoding.temperature, path,
              "decoding.");
    read_into(section, "max_output_tokens", config.decoding.max_output_tokens,
              path, "decoding.");
    read_into(section, "system_text", config.decoding.system_text, path,
              "decoding.");
  }
  if (doc.contains("tokenizer")) {
    read_into(doc["tokenizer"], "name", config.tokenizer_name, path,
              "tokenizer.");
  }
  if (doc.contains("output")) {
    read_into(doc["output"], "dir", config.output_dir, path, "output.");
    read_into(doc["output"], "sequence_limit", config.sequence_limit, path,
              "output.");
  }
  validate_run_config(config);
  return config;
}

void validate_run_config(const RunConfig& config) {
  if (config.decoding.temperature < 0.0) {
    throw Error(Errc::config_error, "decoding.temperature: must be >= 0");
  }
  if (config.decoding.max_output_tokens <= 0) {
    throw Error(Errc::config_error, "decoding.max_output_tokens: must be > 0");
  }
  if (config.corpus.reward_variant_count < 1) {
    throw Error(Errc::config_error, "corpus.reward_variant_count: must be >= 1");
  }
  if (config.provider.max_in_flight < 1) {
    throw Error(Errc::config_error, "provider.max_in_flight: must be >= 1");
  }
  if (config.provider.adapter != "chat_completions" &&
      config.provider.adapter != "mock") {
    throw Error(Errc::config_error,
                "provider.adapter: unknown adapter '" + config.provider.adapter +
                    "' (expected chat_completions or mock)");
  }
}

}  // namespace ptts
