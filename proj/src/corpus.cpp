#include "ptts/corpus.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace ptts {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr PrincipleId kCoreOrder[] = {PrincipleId::Reward,
                                      PrincipleId::Correctness,
                                      PrincipleId::Penalty,
                                      PrincipleId::StepByStep};

constexpr PrincipleId kRewardVariants[] = {PrincipleId::R1, PrincipleId::R2,
                                           PrincipleId::R3, PrincipleId::R4,
                                           PrincipleId::R5, PrincipleId::R6};
constexpr int kVariantInventory = 6;

bool is_core_principle(PrincipleId id) {
  for (PrincipleId core : kCoreOrder) {
    if (core == id) return true;
  }
  return false;
}

void check_config(const CorpusConfig& config) {
  if (config.reward_variant_count < 1) {
    throw Error(Errc::config_error, "reward_variant_count must be >= 1");
  }
  if (config.mode == CorpusMode::single &&
      !is_core_principle(config.single_principle)) {
    throw Error(Errc::config_error,
                "single mode requires a core principle, got " +
                    std::string(to_string(config.single_principle)));
  }
}

}  // namespace

std::string_view to_string(CorpusMode mode) {
  switch (mode) {
    case CorpusMode::single: return "single";
    case CorpusMode::core: return "core";
    case CorpusMode::seed_plus_core: return "seed_plus_core";
    case CorpusMode::full: return "full";
  }
  return "full";
}

std::optional<CorpusMode> corpus_mode_from(std::string_view name) {
  if (name == "single") return CorpusMode::single;
  if (name == "core") return CorpusMode::core;
  if (name == "seed_plus_core") return CorpusMode::seed_plus_core;
  if (name == "full") return CorpusMode::full;
  return std::nullopt;
}

std::size_t expected_size(const CorpusConfig& config, std::size_t seed_count) {
  check_config(config);
  const std::size_t k = static_cast<std::size_t>(config.reward_variant_count);
  switch (config.mode) {
    case CorpusMode::single: return seed_count;
    case CorpusMode::core: return 4 * seed_count;
    case CorpusMode::seed_plus_core: return 5 * seed_count;
    case CorpusMode::full: return (1 + 4 + (k - 1)) * seed_count;
  }
  return 0;
}

std::vector<PrincipleId> principles_for(const CorpusConfig& config) {
  check_config(config);
  switch (config.mode) {
    case CorpusMode::single:
      return {config.single_principle};
    case CorpusMode::core:
      return {kCoreOrder, kCoreOrder + 4};
    case CorpusMode::seed_plus_core: {
      std::vector<PrincipleId> order{PrincipleId::Null};
      order.insert(order.end(), kCoreOrder, kCoreOrder + 4);
      return order;
    }
    case CorpusMode::full: {
      if (config.reward_variant_count > kVariantInventory) {
        throw Error(Errc::no_such_variant,
                    "only " + std::to_string(kVariantInventory) +
                        " reward variants exist, requested K=" +
                        std::to_string(config.reward_variant_count));
      }
      std::vector<PrincipleId> order{PrincipleId::Null};
      order.insert(order.end(), kCoreOrder, kCoreOrder + 4);
      // R1 restates the core Reward wrapper, so K variants add K-1 records.
      for (int j = 1; j < config.reward_variant_count; ++j) {
        order.push_back(kRewardVariants[j]);
      }
      return order;
    }
  }
  return {};
}

std::vector<WorkItem> plan(const CorpusConfig& config, const SeedSet& seeds) {
  const std::vector<PrincipleId> order = principles_for(config);
  std::vector<WorkItem> items;
  items.reserve(order.size() * seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    for (PrincipleId principle : order) {
      items.push_back({i, principle});
    }
  }
  return items;
}

BuildResult build_corpus(const CorpusConfig& config, const SeedSet& seeds,
                         TeacherGateway& gateway, const BuildOptions& options) {
  const std::vector<WorkItem> items = plan(config, seeds);

  struct Slot {
    CorpusRecord record;
    bool ok = false;
    std::string error;
  };
  std::vector<Slot> slots(items.size());

  // Dispatch concurrently; the gateway enforces the in-flight cap and
  // coalesces duplicates. Slot order pins the final corpus order.
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t index = next.fetch_add(1);
      if (index >= items.size()) return;
      const WorkItem& item = items[index];
      const SeedProblem& seed = seeds[item.seed_index];
      Slot& slot = slots[index];
      slot.record.seed_id = seed.seed_id;
      slot.record.principle_id = item.principle_id;
      try {
        const PrincipleTemplate& tmpl = registry_template(item.principle_id);
        slot.record.wrapped_question = wrap(tmpl, seed.question_text);
        CompletionRequest request;
        request.model_id = options.model_id;
        request.prompt_text = slot.record.wrapped_question;
        request.temperature = options.temperature;
        request.max_output_tokens = options.max_output_tokens;
        request.system_text = options.system_text;
        TeacherTrace trace = gateway.query(request);
        slot.record.reasoning_text = std::move(trace.reasoning_text);
        slot.record.response_text = std::move(trace.response_text);
        slot.record.gold_answer = seed.gold_answer;
        slot.record.teacher_model_id = options.model_id;
        slot.record.created_from_cache = trace.cache_hit;
        slot.ok = true;
      } catch (const Error& e) {
        slot.error = e.formatted();
      } catch (const std::exception& e) {
        slot.error = std::string("error: ") + e.what();
      }
    }
  };

  const std::size_t thread_count = std::min<std::size_t>(
      {items.size(), std::size_t{8},
       std::max<std::size_t>(1, std::thread::hardware_concurrency())});
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(thread_count);
    for (std::size_t t = 0; t < thread_count; ++t) {
      threads.emplace_back(worker);
    }
    for (std::thread& thread : threads) {
      thread.join();
    }
  }

  BuildResult result;
  result.corpus.config = config;
  result.corpus.seed_count = seeds.size();
  result.corpus.records.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    Slot& slot = slots[i];
    if (slot.ok) {
      result.corpus.records.push_back(std::move(slot.record));
    } else {
      result.gaps.push_back(
          {slot.record.seed_id, slot.record.principle_id, slot.error});
    }
  }
  return result;
}

double multiplier(const Corpus& corpus) {
  if (corpus.seed_count == 0) {
    throw Error(Errc::empty_seed_set, "multiplier undefined for N = 0");
  }
  return static_cast<double>(corpus.records.size()) /
         static_cast<double>(corpus.seed_count);
}

std::string format_multiplier(double m) {
  std::ostringstream out;
  out << m;
  return out.str();
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const CorpusRecord& record : corpus.records) {
    ordered_json line;
    line["seed_id"] = record.seed_id;
    line["principle_id"] = std::string(to_string(record.principle_id));
    line["wrapped_question"] = record.wrapped_question;
    line["reasoning_text"] = record.reasoning_text;
    line["response_text"] = record.response_text;
    line["gold_answer"] = record.gold_answer;
    line["teacher_model_id"] = record.teacher_model_id;
    out << line.dump() << '\n';
  }
}

std::vector<CorpusRecord> read_corpus(std::istream& in) {
  std::vector<CorpusRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    ordered_json parsed;
    try {
      parsed = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(Errc::malformed_record,
                  "corpus line " + std::to_string(line_number) + ": " + e.what());
    }
    CorpusRecord record;
    record.seed_id = parsed.value("seed_id", "");
    auto principle = principle_id_from(parsed.value("principle_id", ""));
    if (!principle) {
      throw Error(Errc::malformed_record,
                  "corpus line " + std::to_string(line_number) +
                      ": unknown principle_id");
    }
    record.principle_id = *principle;
    record.wrapped_question = parsed.value("wrapped_question", "");
    record.reasoning_text = parsed.value("reasoning_text", "");
    record.response_text = parsed.value("response_text", "");
    record.gold_answer = parsed.value("gold_answer", "");
    record.teacher_model_id = parsed.value("teacher_model_id", "");
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<CorpusRecord> load_corpus_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::io_error, "cannot open corpus file: " + path.string());
  }
  return read_corpus(in);
}

void write_gap_manifest(const std::vector<GapEntry>& gaps, std::ostream& out) {
  for (const GapEntry& gap : gaps) {
    ordered_json line;
    line["seed_id"] = gap.seed_id;
    line["principle_id"] = std::string(to_string(gap.principle_id));
    line["error"] = gap.error;
    out << line.dump() << '\n';
  }
}

CorpusStats corpus_stats(const std::vector<CorpusRecord>& records) {
  CorpusStats stats;
  stats.record_count = records.size();
  std::set<std::string> seeds;
  for (const CorpusRecord& record : records) {
    seeds.insert(record.seed_id);
    ++stats.per_principle[record.principle_id];
  }
  stats.seed_count = seeds.size();
  stats.multiplier = stats.seed_count == 0
                         ? 0.0
                         : static_cast<double>(stats.record_count) /
                               static_cast<double>(stats.seed_count);
  return stats;
}

}  // namespace ptts
