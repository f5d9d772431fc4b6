#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ptts/gateway.hpp"
#include "ptts/principles.hpp"
#include "ptts/seeds.hpp"

namespace ptts {

// One (wrapped question, reasoning, response, gold answer) tuple.
// created_from_cache is in-memory provenance only; it is not serialized so
// cold and warm builds of the same corpus are byte-identical on disk.
struct CorpusRecord {
  std::string seed_id;
  PrincipleId principle_id = PrincipleId::Null;
  std::string wrapped_question;
  std::string reasoning_text;
  std::string response_text;
  std::string gold_answer;
  std::string teacher_model_id;
  bool created_from_cache = false;
};

enum class CorpusMode { single, core, seed_plus_core, full };

std::string_view to_string(CorpusMode mode);
std::optional<CorpusMode> corpus_mode_from(std::string_view name);

struct CorpusConfig {
  CorpusMode mode = CorpusMode::full;
  // Single mode only; must be one of the four core principles.
  PrincipleId single_principle = PrincipleId::Reward;
  int reward_variant_count = 6;  // K
};

struct Corpus {
  std::vector<CorpusRecord> records;
  CorpusConfig config;
  std::size_t seed_count = 0;
};

// Single -> N, Core -> 4N, SeedPlusCore -> 5N, Full -> (1 + 4 + (K-1))N.
// Pure arithmetic; throws config_error when K < 1 or the Single principle
// is outside the core set.
std::size_t expected_size(const CorpusConfig& config, std::size_t seed_count);

// The per-seed principle sequence for a mode, in the pinned global order
// Null, Reward, Correctness, Penalty, StepByStep, R2..R6. Full deduplicates
// R1 against the core Reward entry, so K variants contribute K-1 extras.
// Throws no_such_variant when K exceeds the built-in variant inventory.
std::vector<PrincipleId> principles_for(const CorpusConfig& config);

struct WorkItem {
  std::size_t seed_index = 0;
  PrincipleId principle_id = PrincipleId::Null;
};

// Ordered work items: seed index ascending, then the pinned principle order.
std::vector<WorkItem> plan(const CorpusConfig& config, const SeedSet& seeds);

struct GapEntry {
  std::string seed_id;
  PrincipleId principle_id = PrincipleId::Null;
  std::string error;
};

struct BuildOptions {
  std::string model_id;
  double temperature = 0.0;
  int max_output_tokens = 20000;
  std::string system_text;
};

struct BuildResult {
  Corpus corpus;
  std::vector<GapEntry> gaps;  // items that exhausted retries
  bool complete() const { return gaps.empty(); }
};

// Algorithm: enumerate work items, collect teacher traces through the
// gateway, assemble records in plan order. Items that fail after the retry
// budget become gap entries; completed work is never discarded. Interrupted
// builds resume via the gateway cache.
BuildResult build_corpus(const CorpusConfig& config, const SeedSet& seeds,
                         TeacherGateway& gateway, const BuildOptions& options);

// Augmentation multiplier m = records / N. Throws empty_seed_set.
double multiplier(const Corpus& corpus);

// Trims a float to its minimal decimal form ("10", "4.5").
std::string format_multiplier(double m);

void write_corpus(const Corpus& corpus, std::ostream& out);
std::vector<CorpusRecord> read_corpus(std::istream& in);
std::vector<CorpusRecord> load_corpus_file(const std::filesystem::path& path);

void write_gap_manifest(const std::vector<GapEntry>& gaps, std::ostream& out);

struct CorpusStats {
  std::size_t seed_count = 0;
  std::size_t record_count = 0;
  double multiplier = 0.0;
  std::map<PrincipleId, std::size_t> per_principle;
};

CorpusStats corpus_stats(const std::vector<CorpusRecord>& records);

}  // namespace ptts
