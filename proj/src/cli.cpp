#include "ptts/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "ptts/config.hpp"
#include "ptts/corpus.hpp"
#include "ptts/diversity.hpp"
#include "ptts/eval.hpp"
#include "ptts/principles.hpp"
#include "ptts/seeds.hpp"
#include "ptts/sft.hpp"

namespace ptts {

namespace {

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::config_error:
    case Errc::unknown_subcommand:
      return kExitConfigError;
    case Errc::build_incomplete:
      return kExitBuildIncomplete;
    case Errc::auth_error:
    case Errc::rate_limited:
    case Errc::provider_error:
      return kExitProviderFailure;
    default:
      return kExitFailure;
  }
}

std::string env_or_empty(const std::string& name) {
  if (name.empty()) return {};
  const char* value = std::getenv(name.c_str());
  return value ? value : "";
}

std::string resolve_base_url(const ProviderSettings& settings) {
  const std::string from_env = env_or_empty(settings.base_url_env);
  if (!from_env.empty()) return from_env;
  return settings.base_url;
}

std::shared_ptr<Provider> make_provider(const ProviderSettings& settings) {
  if (settings.adapter == "mock") {
    MockProviderOptions options;
    options.fixture_dir = settings.fixture_dir;
    options.synthesize_missing = settings.mock_synthesize;
    return std::make_shared<MockProvider>(options);
  }
  ChatCompletionsOptions options;
  options.base_url = resolve_base_url(settings);
  if (options.base_url.empty()) {
    throw Error(Errc::config_error,
                "provider.base_url: empty (set it in the config file or via $" +
                    settings.base_url_env + ")");
  }
  options.api_key = env_or_empty(settings.api_key_env);
  return std::make_shared<ChatCompletionsProvider>(options);
}

std::unique_ptr<TeacherGateway> make_gateway(const RunConfig& config) {
  return std::make_unique<TeacherGateway>(make_provider(config.provider),
                                          config.provider.cache_dir,
                                          config.provider.max_in_flight);
}

std::unique_ptr<Tokenizer> tokenizer_for(const RunConfig& config) {
  auto tokenizer = make_tokenizer(config.tokenizer_name);
  if (!tokenizer) {
    throw Error(Errc::config_error,
                "tokenizer.name: unknown tokenizer '" + config.tokenizer_name +
                    "' (built-in: whitespace)");
  }
  return tokenizer;
}

std::ofstream open_output(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::filesystem::create_directories(parent);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(Errc::io_error, "cannot write: " + path);
  }
  return out;
}

// Flags shared by every subcommand; command line wins over the config file.
struct CommonFlags {
  std::string config_path;
  std::string seeds_path;
  std::string cache_dir;
  std::string provider_adapter;
  std::string model_id;
  int max_in_flight = 0;

  RunConfig resolve() const {
    RunConfig config = config_path.empty() ? default_run_config()
                                           : load_run_config(config_path);
    if (!seeds_path.empty()) config.seeds_path = seeds_path;
    if (!cache_dir.empty()) config.provider.cache_dir = cache_dir;
    if (!provider_adapter.empty()) config.provider.adapter = provider_adapter;
    if (!model_id.empty()) config.provider.model_id = model_id;
    if (max_in_flight > 0) config.provider.max_in_flight = max_in_flight;
    validate_run_config(config);
    return config;
  }

  void attach(CLI::App* cmd, bool with_provider = true) {
    cmd->add_option("--config", config_path, "Run configuration file (JSON)");
    if (with_provider) {
      cmd->add_option("--cache-dir", cache_dir,
                      "Content-addressed response cache directory");
      cmd->add_option("--provider", provider_adapter,
                      "Provider adapter: chat_completions or mock");
      cmd->add_option("--model", model_id, "Teacher model identifier");
      cmd->add_option("--max-in-flight", max_in_flight,
                      "Concurrent request limit");
    }
  }
};

int run_seeds_validate(const CommonFlags& flags, std::ostream& out) {
  const RunConfig config = flags.resolve();
  if (config.seeds_path.empty()) {
    throw Error(Errc::config_error, "seeds.path: no seed file given (--seeds)");
  }
  const SeedSet seeds = load_seed_file(config.seeds_path);
  std::size_t violation_count = 0;
  for (const SeedProblem& problem : seeds) {
    for (const SeedViolation& violation : validate_seed(problem)) {
      out << problem.seed_id << ": " << errc_name(violation.code) << ": "
          << violation.detail << "\n";
      ++violation_count;
    }
  }
  if (seeds.empty()) {
    out << "warning: seed set is empty\n";
  }
  out << "seeds: " << seeds.size() << " problems, " << violation_count
      << " violations\n";
  return violation_count == 0 ? kExitOk : kExitFailure;
}

int run_templates_export(const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    export_templates(out);
  } else {
    auto file = open_output(out_path);
    export_templates(file);
    out << "templates: wrote " << registry().size() << " wrappers to "
        << out_path << "\n";
  }
  return kExitOk;
}

int run_corpus_build(const CommonFlags& flags, const std::string& mode_name,
                     const std::string& principle_name, int variant_count,
                     const std::string& out_path, std::ostream& out,
                     std::ostream& err) {
  RunConfig config = flags.resolve();
  if (!mode_name.empty()) {
    auto mode = corpus_mode_from(mode_name);
    if (!mode) {
      throw Error(Errc::config_error, "corpus.mode: unknown mode '" + mode_name + "'");
    }
    config.corpus.mode = *mode;
  }
  if (!principle_name.empty()) {
    auto principle = principle_id_from(principle_name);
    if (!principle) {
      throw Error(Errc::config_error,
                  "corpus.single_principle: unknown principle '" +
                      principle_name + "'");
    }
    config.corpus.single_principle = *principle;
  }
  if (variant_count > 0) config.corpus.reward_variant_count = variant_count;
  if (config.seeds_path.empty()) {
    throw Error(Errc::config_error, "seeds.path: no seed file given (--seeds)");
  }

  const SeedSet seeds = load_seed_file(config.seeds_path);
  auto gateway = make_gateway(config);
  BuildOptions options;
  options.model_id = config.provider.model_id;
  options.temperature = config.decoding.temperature;
  options.max_output_tokens = config.decoding.max_output_tokens;
  options.system_text = config.decoding.system_text;

  const BuildResult result =
      build_corpus(config.corpus, seeds, *gateway, options);
  {
    auto file = open_output(out_path);
    write_corpus(result.corpus, file);
  }
  if (!result.complete()) {
    auto gaps = open_output(out_path + ".gaps");
    write_gap_manifest(result.gaps, gaps);
  }
  out << "corpus: " << result.corpus.records.size() << " records from "
      << seeds.size() << " seeds (mode " << to_string(config.corpus.mode)
      << ", network calls " << gateway->network_calls() << ")\n";
  if (!result.complete()) {
    err << errc_name(Errc::build_incomplete) << ": " << result.gaps.size()
        << " items failed; manifest at " << out_path << ".gaps\n";
    return kExitBuildIncomplete;
  }
  return kExitOk;
}

int run_corpus_stats(const std::string& corpus_path, std::ostream& out) {
  const auto records = load_corpus_file(corpus_path);
  const CorpusStats stats = corpus_stats(records);
  nlohmann::ordered_json doc;
  doc["seed_count"] = stats.seed_count;
  doc["record_count"] = stats.record_count;
  doc["multiplier"] = stats.multiplier;
  auto per_principle = nlohmann::ordered_json::object();
  for (const auto& [principle, count] : stats.per_principle) {
    per_principle[std::string(to_string(principle))] = count;
  }
  doc["per_principle"] = per_principle;
  out << doc.dump() << "\n";
  return kExitOk;
}

int run_diversity_report(const CommonFlags& flags,
                         const std::string& corpus_path,
                         const std::string& baseline_path,
                         const std::string& out_path,
                         const std::string& embedder_name,
                         const std::string& channel_name, std::ostream& out) {
  const RunConfig config = flags.resolve();
  const auto corpus = load_corpus_file(corpus_path);
  const auto baseline = load_corpus_file(baseline_path);
  auto channel = trace_channel_from(channel_name);
  if (!channel) {
    throw Error(Errc::config_error,
                "channel: unknown channel '" + channel_name + "'");
  }

  std::unique_ptr<Embedder> embedder;
  if (embedder_name == "stub") {
    embedder = std::make_unique<StubEmbedder>();
  } else if (embedder_name == "provider") {
    HttpEmbedderOptions options;
    options.base_url = resolve_base_url(config.provider);
    if (options.base_url.empty()) {
      throw Error(Errc::config_error,
                  "provider.base_url: empty (needed for --embedder provider)");
    }
    options.api_key = env_or_empty(config.provider.api_key_env);
    embedder = std::make_unique<HttpEmbedder>(
        options,
        std::filesystem::path(config.provider.cache_dir) / "embeddings");
  } else {
    throw Error(Errc::config_error,
                "embedder: expected 'stub' or 'provider', got '" +
                    embedder_name + "'");
  }

  const auto tokenizer = tokenizer_for(config);
  const auto reports =
      diversity_reports(corpus, baseline, *embedder, *tokenizer, *channel);
  {
    auto file = open_output(out_path);
    write_reports(reports, file);
  }
  out << "diversity: " << reports.size() << " variant reports -> " << out_path
      << "\n";
  return kExitOk;
}

int run_eval(const CommonFlags& flags, const std::string& benchmark_path,
             const std::string& out_path, std::ostream& out) {
  const RunConfig config = flags.resolve();
  const auto benchmark = load_benchmark_file(benchmark_path);
  auto gateway = make_gateway(config);

  EvalOptions options;
  options.benchmark_name =
      std::filesystem::path(benchmark_path).stem().string();
  options.model_id = config.provider.model_id;
  options.temperature = config.decoding.temperature;
  options.max_output_tokens = config.decoding.max_output_tokens;
  options.system_text = config.decoding.system_text;

  const EvalReport report = run_eval(benchmark, *gateway, options);
  if (!out_path.empty()) {
    auto file = open_output(out_path);
    write_eval_report(report, file);
  }
  out << "eval: " << report.benchmark_name << " " << report.correct << "/"
      << report.total << " correct, accuracy "
      << format_fixed(report.accuracy_percent, 2) << "%\n";
  return kExitOk;
}

int run_export_sft(const CommonFlags& flags, const std::string& corpus_path,
                   const std::string& layout_name, std::size_t limit,
                   const std::string& out_path, std::ostream& out) {
  const RunConfig config = flags.resolve();
  auto layout = sft_layout_from(layout_name);
  if (!layout) {
    throw Error(Errc::config_error,
                "layout: expected reasoning_then_response or response_only, "
                "got '" + layout_name + "'");
  }
  Corpus corpus;
  corpus.records = load_corpus_file(corpus_path);
  corpus.seed_count = corpus_stats(corpus.records).seed_count;

  const auto tokenizer = tokenizer_for(config);
  ExportSummary summary;
  {
    auto file = open_output(out_path);
    summary = export_sft(corpus, *layout, *tokenizer, limit, file);
  }
  {
    auto audit = open_output(out_path + ".audit");
    write_length_audit(summary.audit, audit);
  }
  std::size_t over = 0;
  for (const LengthAuditEntry& entry : summary.audit) {
    if (entry.over_limit) ++over;
  }
  out << "sft: wrote " << summary.written << " examples (" << over
      << " over the " << limit << "-token limit) -> " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"P-TTS corpus forging toolkit"};
  app.require_subcommand(1);

  CommonFlags seeds_flags;
  auto* seeds_cmd = app.add_subcommand("seeds", "Seed set operations");
  seeds_cmd->require_subcommand(1);
  auto* seeds_validate =
      seeds_cmd->add_subcommand("validate", "Validate a seed problem file");
  seeds_validate->add_option("--seeds", seeds_flags.seeds_path,
                             "Seed file (line-delimited records)");
  seeds_flags.attach(seeds_validate, /*with_provider=*/false);

  auto* templates_cmd =
      app.add_subcommand("templates", "Instructional wrapper operations");
  templates_cmd->require_subcommand(1);
  std::string templates_out;
  auto* templates_export = templates_cmd->add_subcommand(
      "export", "Dump the wrapper registry for byte-level audit");
  templates_export->add_option("--out", templates_out,
                               "Output path (default: stdout)");

  auto* corpus_cmd = app.add_subcommand("corpus", "Corpus assembly");
  corpus_cmd->require_subcommand(1);
  CommonFlags build_flags;
  std::string build_mode, build_principle, build_out;
  int build_variants = 0;
  auto* corpus_build = corpus_cmd->add_subcommand(
      "build", "Collect teacher traces for every (seed, principle) pair");
  corpus_build->add_option("--seeds", build_flags.seeds_path, "Seed file");
  corpus_build->add_option("--mode", build_mode,
                           "single | core | seed_plus_core | full");
  corpus_build->add_option("--principle", build_principle,
                           "Principle for single mode");
  corpus_build->add_option("--variants", build_variants,
                           "Reward variant count K");
  corpus_build->add_option("--out", build_out, "Corpus output path")
      ->required();
  build_flags.attach(corpus_build);

  std::string stats_corpus;
  auto* corpus_stats_cmd =
      corpus_cmd->add_subcommand("stats", "Size and multiplier accounting");
  corpus_stats_cmd->add_option("--corpus", stats_corpus, "Corpus file")
      ->required();

  auto* diversity_cmd = app.add_subcommand("diversity", "Diversity analytics");
  diversity_cmd->require_subcommand(1);
  CommonFlags diversity_flags;
  std::string div_corpus, div_baseline, div_out;
  std::string div_embedder = "stub";
  std::string div_channel = "responses";
  auto* diversity_report_cmd = diversity_cmd->add_subcommand(
      "report", "Diversity gain, trigram diversity, and verbosity stats");
  diversity_report_cmd->add_option("--corpus", div_corpus, "Variant corpus")
      ->required();
  diversity_report_cmd
      ->add_option("--baseline", div_baseline, "Null-prompt baseline corpus")
      ->required();
  diversity_report_cmd->add_option("--out", div_out, "Report output path")
      ->required();
  diversity_report_cmd->add_option("--embedder", div_embedder,
                                   "stub | provider");
  diversity_report_cmd->add_option(
      "--channel", div_channel,
      "Diversity-gain text channel: responses | reasoning | questions");
  diversity_flags.attach(diversity_report_cmd);

  auto* eval_cmd = app.add_subcommand("eval", "Benchmark grading");
  eval_cmd->require_subcommand(1);
  CommonFlags eval_flags;
  std::string eval_benchmark, eval_out;
  auto* eval_run_cmd = eval_cmd->add_subcommand(
      "run", "Grade greedy completions against gold answers");
  eval_run_cmd->add_option("--benchmark", eval_benchmark, "Benchmark file")
      ->required();
  eval_run_cmd->add_option("--out", eval_out, "Report output path");
  eval_flags.attach(eval_run_cmd);

  auto* export_cmd = app.add_subcommand("export", "Training data export");
  export_cmd->require_subcommand(1);
  CommonFlags sft_flags;
  std::string sft_corpus, sft_out;
  std::string sft_layout = "reasoning_then_response";
  std::size_t sft_limit = kDefaultSequenceLimit;
  auto* export_sft_cmd = export_cmd->add_subcommand(
      "sft", "Chat-format examples with loss masks and a length audit");
  export_sft_cmd->add_option("--corpus", sft_corpus, "Corpus file")->required();
  export_sft_cmd->add_option("--layout", sft_layout,
                             "reasoning_then_response | response_only");
  export_sft_cmd->add_option("--limit", sft_limit,
                             "Sequence length audit limit in tokens");
  export_sft_cmd->add_option("--out", sft_out, "Output path")->required();
  sft_flags.attach(export_sft_cmd, /*with_provider=*/false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() != 0) {
      err << errc_name(Errc::unknown_subcommand) << ": " << e.what() << "\n";
      return kExitConfigError;
    }
    return app.exit(e, out, err);  // --help and friends
  }

  try {
    if (seeds_validate->parsed()) {
      return run_seeds_validate(seeds_flags, out);
    }
    if (templates_export->parsed()) {
      return run_templates_export(templates_out, out);
    }
    if (corpus_build->parsed()) {
      return run_corpus_build(build_flags, build_mode, build_principle,
                              build_variants, build_out, out, err);
    }
    if (corpus_stats_cmd->parsed()) {
      return run_corpus_stats(stats_corpus, out);
    }
    if (diversity_report_cmd->parsed()) {
      return run_diversity_report(diversity_flags, div_corpus, div_baseline,
                                  div_out, div_embedder, div_channel, out);
    }
    if (eval_run_cmd->parsed()) {
      return run_eval(eval_flags, eval_benchmark, eval_out, out);
    }
    if (export_sft_cmd->parsed()) {
      return run_export_sft(sft_flags, sft_corpus, sft_layout, sft_limit,
                            sft_out, out);
    }
    err << errc_name(Errc::unknown_subcommand) << ": no subcommand\n";
    return kExitConfigError;
  } catch (const Error& e) {
    err << e.formatted() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace ptts
