#pragma once

#include <iosfwd>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ptts/cache.hpp"
#include "ptts/corpus.hpp"
#include "ptts/provider.hpp"
#include "ptts/textnorm.hpp"

namespace ptts {

using EmbeddingVector = std::vector<double>;

// Order-preserving: one vector per input text, all of equal dimension.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::string name() const = 0;
  virtual std::vector<EmbeddingVector> embed(
      const std::vector<std::string>& texts) = 0;
};

// Deterministic offline embedder: text -> 1-D vector of its byte length.
class StubEmbedder : public Embedder {
 public:
  std::string name() const override { return "stub"; }
  std::vector<EmbeddingVector> embed(
      const std::vector<std::string>& texts) override;
};

struct HttpEmbedderOptions {
  std::string base_url;
  std::string api_key;
  std::string model_id = "text-embedding-ada-002";
  std::string path = "/v1/embeddings";
  int timeout_seconds = 600;
};

// Embeddings-over-HTTP with the same one-file-per-digest cache mechanics as
// the teacher gateway, keyed by (provider, model, text).
class HttpEmbedder : public Embedder {
 public:
  HttpEmbedder(HttpEmbedderOptions options, std::filesystem::path cache_dir);
  HttpEmbedder(HttpEmbedderOptions options, std::filesystem::path cache_dir,
               std::unique_ptr<HttpPoster> poster);

  std::string name() const override { return "provider"; }
  std::vector<EmbeddingVector> embed(
      const std::vector<std::string>& texts) override;

  long network_calls() const { return calls_; }

 private:
  EmbeddingVector embed_one(const std::string& text);

  HttpEmbedderOptions options_;
  ResponseCache cache_;
  std::unique_ptr<HttpPoster> poster_;
  long calls_ = 0;
};

// Mean over new items of the squared Euclidean distance to the nearest
// baseline embedding. Exact brute-force search; corpora here are small.
double diversity_gain_vectors(const std::vector<EmbeddingVector>& new_items,
                              const std::vector<EmbeddingVector>& baseline);

double diversity_gain(const std::vector<std::string>& new_texts,
                      const std::vector<std::string>& baseline_texts,
                      Embedder& embedder);

// Distinct word-level trigrams after NFC normalization and whitespace
// tokenization. Fewer than three tokens yields the empty set.
std::set<Trigram> trigram_set(std::string_view text);

// 1 - |Tri(x) n Tri(y)| / |Tri(x) u Tri(y)|, in [0, 1].
// Two under-length texts (both sets empty) score 0.
double trigram_diversity(std::string_view x, std::string_view y);

enum class TraceChannel { responses, reasoning, questions };

std::string_view to_string(TraceChannel channel);
std::optional<TraceChannel> trace_channel_from(std::string_view name);

const std::string& channel_text(const CorpusRecord& record,
                                TraceChannel channel);

// Mean TD between each variant record's channel text and the null-prompt
// record for the same seed. Throws missing_counterpart / empty_set.
double paired_trigram_diversity(const std::vector<CorpusRecord>& variant,
                                const std::vector<CorpusRecord>& baseline,
                                TraceChannel channel);

struct TokenStats {
  double mean = 0.0;  // exact; presentation rounds to one decimal
  std::size_t min = 0;
  std::size_t max = 0;
  std::size_t total = 0;
  std::size_t count = 0;
  bool operator==(const TokenStats&) const = default;
};

// Throws empty_list.
TokenStats token_stats(const std::vector<std::string>& texts,
                       const Tokenizer& tokenizer);

// Half-up fixed-point formatting ("597.3", "73.33").
std::string format_fixed(double value, int decimals);

struct DiversityReport {
  std::string variant_id;
  double diversity_gain = 0.0;
  double trigram_diversity_responses = 0.0;
  double trigram_diversity_reasoning = 0.0;
  TokenStats token_stats_responses;
  TokenStats token_stats_reasoning;
  bool operator==(const DiversityReport&) const = default;
};

std::string serialize_report(const DiversityReport& report);
DiversityReport parse_report(const std::string& line);

// One report per non-null variant present in the corpus, in pinned principle
// order. dg_channel selects which text channel feeds the diversity gain.
std::vector<DiversityReport> diversity_reports(
    const std::vector<CorpusRecord>& corpus,
    const std::vector<CorpusRecord>& baseline, Embedder& embedder,
    const Tokenizer& tokenizer, TraceChannel dg_channel);

void write_reports(const std::vector<DiversityReport>& reports,
                   std::ostream& out);

}  // namespace ptts
