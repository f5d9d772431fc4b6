#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ptts/cli.hpp"
#include "ptts/corpus.hpp"
#include "test_support.hpp"

using namespace ptts;
using ptts::testing::fresh_dir;

namespace {

int run(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

std::string help_for(const std::vector<std::string>& command) {
  std::vector<std::string> args = command;
  args.push_back("--help");
  std::string out;
  run(args, &out);
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// A workspace with a seed file and a mock-provider config.
struct Workspace {
  std::filesystem::path dir;
  std::filesystem::path seeds;
  std::filesystem::path config;

  explicit Workspace(const std::string& tag, std::size_t seed_count) {
    dir = fresh_dir("cli_" + tag);
    seeds = dir / "seeds.jsonl";
    config = dir / "config.json";
    {
      std::ofstream out(seeds);
      serialize_seeds(ptts::testing::synthetic_seeds(seed_count), out);
    }
    write_file(config, std::string("{\n") +
                           "  \"seeds\": {\"path\": \"" + seeds.string() +
                           "\"},\n" +
                           "  \"provider\": {\"adapter\": \"mock\", "
                           "\"cache_dir\": \"" +
                           (dir / "cache").string() + "\"}\n}\n");
  }
};

}  // namespace

TEST_CASE("help enumerates the documented flags per subcommand") {
  struct Expectation {
    std::vector<std::string> command;
    std::vector<std::string> flags;
  };
  const Expectation expectations[] = {
      {{"seeds", "validate"}, {"--seeds", "--config"}},
      {{"templates", "export"}, {"--out"}},
      {{"corpus", "build"},
       {"--config", "--seeds", "--mode", "--principle", "--variants", "--out",
        "--cache-dir", "--provider", "--model", "--max-in-flight"}},
      {{"corpus", "stats"}, {"--corpus"}},
      {{"diversity", "report"},
       {"--corpus", "--baseline", "--out", "--embedder", "--channel"}},
      {{"eval", "run"},
       {"--benchmark", "--out", "--model", "--cache-dir", "--provider",
        "--max-in-flight"}},
      {{"export", "sft"}, {"--corpus", "--layout", "--limit", "--out"}},
  };
  for (const Expectation& expectation : expectations) {
    const std::string help = help_for(expectation.command);
    for (const std::string& flag : expectation.flags) {
      CAPTURE(expectation.command[0]);
      CAPTURE(flag);
      CHECK(help.find(flag) != std::string::npos);
    }
  }
  // top-level help lists every subcommand group
  const std::string top = help_for({});
  for (const char* name :
       {"seeds", "templates", "corpus", "diversity", "eval", "export"}) {
    CHECK(top.find(name) != std::string::npos);
  }
}

TEST_CASE("unknown subcommands exit with the config-error status") {
  std::string err;
  CHECK(run({"frobnicate"}, nullptr, &err) == kExitConfigError);
  CHECK(err.find("unknown_subcommand") != std::string::npos);
}

TEST_CASE("seeds validate reports violations and duplicate ids") {
  const Workspace ws("seeds", 3);
  std::string out;
  CHECK(run({"seeds", "validate", "--seeds", ws.seeds.string()}, &out) ==
        kExitOk);
  CHECK(out.find("3 problems") != std::string::npos);

  const auto bad = ws.dir / "bad.jsonl";
  write_file(bad,
             R"({"seed_id":"dup","question_text":"Q","gold_answer":"1","answer_kind":"integer_0_999","source_tag":"t"})"
             "\n"
             R"({"seed_id":"dup","question_text":"Q2","gold_answer":"2","answer_kind":"integer_0_999","source_tag":"t"})"
             "\n");
  std::string err;
  CHECK(run({"seeds", "validate", "--seeds", bad.string()}, nullptr, &err) ==
        kExitFailure);
  CHECK(err.find("duplicate_seed_id") != std::string::npos);

  // an empty seed file is valid but flagged
  const auto empty = ws.dir / "empty.jsonl";
  write_file(empty, "");
  std::string warn;
  CHECK(run({"seeds", "validate", "--seeds", empty.string()}, &warn) ==
        kExitOk);
  CHECK(warn.find("warning") != std::string::npos);
}

TEST_CASE("missing seed file is a config error") {
  std::string err;
  CHECK(run({"corpus", "build", "--out", "/tmp/ptts_nowhere.jsonl"}, nullptr,
            &err) == kExitConfigError);
  CHECK(err.find("config_error") != std::string::npos);
}

TEST_CASE("templates export writes the registry") {
  const auto dir = fresh_dir("cli_templates");
  const auto path = dir / "templates.jsonl";
  std::string out;
  CHECK(run({"templates", "export", "--out", path.string()}, &out) == kExitOk);
  const std::string dumped = read_file(path);
  CHECK(dumped.find("\"Reward\"") != std::string::npos);
  CHECK(dumped.find("I am going to tip $200,000 for a better solution!") !=
        std::string::npos);

  // stdout variant is identical content
  std::string direct;
  CHECK(run({"templates", "export"}, &direct) == kExitOk);
  CHECK(direct == dumped);
}

TEST_CASE("corpus build, stats, rebuild idempotence, and export pipeline") {
  const Workspace ws("pipeline", 5);
  const auto corpus_path = (ws.dir / "full.jsonl").string();

  std::string out;
  REQUIRE(run({"corpus", "build", "--config", ws.config.string(), "--mode",
               "full", "--out", corpus_path},
              &out) == kExitOk);
  CHECK(out.find("50 records") != std::string::npos);

  const std::string first_bytes = read_file(corpus_path);
  CHECK(std::count(first_bytes.begin(), first_bytes.end(), '\n') == 50);

  // rerun against the warm cache: byte-identical output, zero calls
  std::string rerun_out;
  REQUIRE(run({"corpus", "build", "--config", ws.config.string(), "--mode",
               "full", "--out", corpus_path},
              &rerun_out) == kExitOk);
  CHECK(read_file(corpus_path) == first_bytes);
  CHECK(rerun_out.find("network calls 0") != std::string::npos);

  std::string stats;
  REQUIRE(run({"corpus", "stats", "--corpus", corpus_path}, &stats) == kExitOk);
  CHECK(stats.find("\"record_count\":50") != std::string::npos);
  CHECK(stats.find("\"multiplier\":10") != std::string::npos);

  // a baseline corpus with null-prompt records for diversity pairing
  const auto baseline_path = (ws.dir / "baseline.jsonl").string();
  REQUIRE(run({"corpus", "build", "--config", ws.config.string(), "--mode",
               "seed_plus_core", "--out", baseline_path}) == kExitOk);

  const auto report_path = (ws.dir / "diversity.jsonl").string();
  REQUIRE(run({"diversity", "report", "--config", ws.config.string(),
               "--corpus", corpus_path, "--baseline", baseline_path, "--out",
               report_path, "--embedder", "stub"}) == kExitOk);
  const std::string report = read_file(report_path);
  CHECK(std::count(report.begin(), report.end(), '\n') == 9);  // non-null variants
  CHECK(report.find("\"variant_id\":\"Reward\"") != std::string::npos);

  const auto sft_path = (ws.dir / "sft.jsonl").string();
  std::string sft_out;
  REQUIRE(run({"export", "sft", "--corpus", corpus_path, "--layout",
               "reasoning_then_response", "--limit", "20000", "--out",
               sft_path},
              &sft_out) == kExitOk);
  CHECK(sft_out.find("wrote 50 examples") != std::string::npos);
  const std::string sft_bytes = read_file(sft_path);
  CHECK(std::count(sft_bytes.begin(), sft_bytes.end(), '\n') == 50);
  CHECK(std::filesystem::exists(sft_path + ".audit"));

  // eval against the same mock teacher and the seed file as benchmark
  const auto eval_path = (ws.dir / "eval.json").string();
  std::string eval_out;
  REQUIRE(run({"eval", "run", "--config", ws.config.string(), "--benchmark",
               ws.seeds.string(), "--out", eval_path},
              &eval_out) == kExitOk);
  CHECK(eval_out.find("eval: seeds") != std::string::npos);
  CHECK(read_file(eval_path).find("accuracy_percent") != std::string::npos);
}

TEST_CASE("single-mode builds honor the principle flag") {
  const Workspace ws("single", 4);
  const auto corpus_path = (ws.dir / "single.jsonl").string();
  REQUIRE(run({"corpus", "build", "--config", ws.config.string(), "--mode",
               "single", "--principle", "Penalty", "--out", corpus_path}) ==
          kExitOk);
  const auto records = load_corpus_file(corpus_path);
  REQUIRE(records.size() == 4);
  for (const CorpusRecord& record : records) {
    CHECK(record.principle_id == PrincipleId::Penalty);
  }

  std::string err;
  CHECK(run({"corpus", "build", "--config", ws.config.string(), "--mode",
             "single", "--principle", "Null", "--out", corpus_path},
            nullptr, &err) == kExitConfigError);
}

TEST_CASE("a 90-seed full build writes a 900-record corpus") {
  const Workspace ws("n90", 90);
  const auto corpus_path = (ws.dir / "full90.jsonl").string();
  REQUIRE(run({"corpus", "build", "--config", ws.config.string(), "--mode",
               "full", "--out", corpus_path}) == kExitOk);
  const std::string bytes = read_file(corpus_path);
  CHECK(std::count(bytes.begin(), bytes.end(), '\n') == 900);

  std::string stats;
  REQUIRE(run({"corpus", "stats", "--corpus", corpus_path}, &stats) == kExitOk);
  CHECK(stats.find("\"seed_count\":90") != std::string::npos);
  CHECK(stats.find("\"multiplier\":10") != std::string::npos);

  // the full corpus exports one chat example per record
  const auto sft_path = (ws.dir / "full90_sft.jsonl").string();
  std::string sft_out;
  REQUIRE(run({"export", "sft", "--corpus", corpus_path, "--layout",
               "reasoning_then_response", "--out", sft_path},
              &sft_out) == kExitOk);
  CHECK(sft_out.find("wrote 900 examples") != std::string::npos);
}

TEST_CASE("fixture-only mock builds emit a gap manifest and exit 3") {
  const Workspace ws("gaps", 2);
  // fixture replay with an empty fixture directory and no synthesis
  write_file(ws.config,
             std::string("{\n") + "  \"seeds\": {\"path\": \"" +
                 ws.seeds.string() + "\"},\n" +
                 "  \"provider\": {\"adapter\": \"mock\", \"cache_dir\": \"" +
                 (ws.dir / "cache2").string() + "\", \"fixture_dir\": \"" +
                 (ws.dir / "fixtures").string() +
                 "\", \"mock_synthesize\": false}\n}\n");
  std::filesystem::create_directories(ws.dir / "fixtures");

  const auto corpus_path = (ws.dir / "gappy.jsonl").string();
  std::string err;
  CHECK(run({"corpus", "build", "--config", ws.config.string(), "--mode",
             "core", "--out", corpus_path},
            nullptr, &err) == kExitBuildIncomplete);
  CHECK(err.find("build_incomplete") != std::string::npos);

  const std::string manifest = read_file(corpus_path + ".gaps");
  CHECK(std::count(manifest.begin(), manifest.end(), '\n') == 8);
  CHECK(manifest.find("provider_error") != std::string::npos);
  CHECK(read_file(corpus_path).empty());  // corpus emitted, just empty
}

TEST_CASE("bad config files exit with status 2 and name the field") {
  const auto dir = fresh_dir("cli_badcfg");
  const auto config = dir / "bad.json";
  write_file(config, R"({"decoding": {"temperature": -1}})");
  std::string err;
  CHECK(run({"seeds", "validate", "--config", config.string(), "--seeds",
             "/tmp/none.jsonl"},
            nullptr, &err) == kExitConfigError);
  CHECK(err.find("temperature") != std::string::npos);
}
