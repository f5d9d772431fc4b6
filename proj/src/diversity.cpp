#include "ptts/diversity.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include "ptts/hash.hpp"

namespace ptts {

namespace {

using ordered_json = nlohmann::ordered_json;

void check_finite_dimensions(const std::vector<EmbeddingVector>& vectors) {
  if (vectors.empty()) return;
  const std::size_t dimension = vectors.front().size();
  for (const EmbeddingVector& v : vectors) {
    if (v.size() != dimension) {
      throw Error(Errc::dimension_mismatch,
                  "embedding dimensions differ: " + std::to_string(dimension) +
                      " vs " + std::to_string(v.size()));
    }
    for (double component : v) {
      if (!std::isfinite(component)) {
        throw Error(Errc::dimension_mismatch, "non-finite embedding component");
      }
    }
  }
}

double squared_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

ordered_json stats_to_json(const TokenStats& stats) {
  ordered_json out;
  out["mean"] = stats.mean;
  out["min"] = stats.min;
  out["max"] = stats.max;
  out["total"] = stats.total;
  out["count"] = stats.count;
  return out;
}

TokenStats stats_from_json(const ordered_json& in) {
  TokenStats stats;
  stats.mean = in.at("mean").get<double>();
  stats.min = in.at("min").get<std::size_t>();
  stats.max = in.at("max").get<std::size_t>();
  stats.total = in.at("total").get<std::size_t>();
  stats.count = in.at("count").get<std::size_t>();
  return stats;
}

}  // namespace

std::vector<EmbeddingVector> StubEmbedder::embed(
    const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> vectors;
  vectors.reserve(texts.size());
  for (const std::string& text : texts) {
    vectors.push_back({static_cast<double>(text.size())});
  }
  return vectors;
}

HttpEmbedder::HttpEmbedder(HttpEmbedderOptions options,
                           std::filesystem::path cache_dir)
    : options_(std::move(options)),
      cache_(std::move(cache_dir)),
      poster_(make_httplib_poster(options_.base_url, options_.timeout_seconds)) {}

HttpEmbedder::HttpEmbedder(HttpEmbedderOptions options,
                           std::filesystem::path cache_dir,
                           std::unique_ptr<HttpPoster> poster)
    : options_(std::move(options)),
      cache_(std::move(cache_dir)),
      poster_(std::move(poster)) {}

EmbeddingVector HttpEmbedder::embed_one(const std::string& text) {
  ordered_json material;
  material["provider"] = "embeddings";
  material["model_id"] = options_.model_id;
  material["text"] = text;
  const std::string digest = sha256_hex(material.dump());

  std::string body;
  if (auto cached = cache_.load(digest)) {
    body = *cached;
  } else {
    ordered_json request;
    request["model"] = options_.model_id;
    request["input"] = text;
    std::map<std::string, std::string> headers;
    if (!options_.api_key.empty()) {
      headers["Authorization"] = "Bearer " + options_.api_key;
    }
    ++calls_;
    const HttpResult result =
        poster_->post(options_.path, request.dump(), headers);
    if (result.status != 200) {
      if (result.status == 401 || result.status == 403) {
        throw Error(Errc::auth_error,
                    "embeddings status " + std::to_string(result.status));
      }
      throw Error(Errc::provider_error,
                  "embeddings status " + std::to_string(result.status) + ": " +
                      result.body.substr(0, 200));
    }
    body = result.body;
    cache_.store(digest, body);
  }

  try {
    const auto parsed = nlohmann::json::parse(body);
    const auto& values = parsed.at("data").at(0).at("embedding");
    EmbeddingVector vector;
    vector.reserve(values.size());
    for (const auto& component : values) {
      vector.push_back(component.get<double>());
    }
    return vector;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::trace_parse_error,
                std::string("embedding payload malformed: ") + e.what());
  }
}

std::vector<EmbeddingVector> HttpEmbedder::embed(
    const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> vectors;
  vectors.reserve(texts.size());
  for (const std::string& text : texts) {
    vectors.push_back(embed_one(text));
  }
  return vectors;
}

double diversity_gain_vectors(const std::vector<EmbeddingVector>& new_items,
                              const std::vector<EmbeddingVector>& baseline) {
  if (new_items.empty() || baseline.empty()) {
    throw Error(Errc::empty_set, "diversity gain needs non-empty sets");
  }
  if (new_items.front().size() != baseline.front().size()) {
    throw Error(Errc::dimension_mismatch,
                "new and baseline embeddings differ in dimension");
  }
  check_finite_dimensions(new_items);
  check_finite_dimensions(baseline);

  double sum = 0.0;
  for (const EmbeddingVector& item : new_items) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const EmbeddingVector& anchor : baseline) {
      nearest = std::min(nearest, squared_distance(item, anchor));
    }
    sum += nearest;
  }
  return sum / static_cast<double>(new_items.size());
}

double diversity_gain(const std::vector<std::string>& new_texts,
                      const std::vector<std::string>& baseline_texts,
                      Embedder& embedder) {
  if (new_texts.empty() || baseline_texts.empty()) {
    throw Error(Errc::empty_set, "diversity gain needs non-empty sets");
  }
  return diversity_gain_vectors(embedder.embed(new_texts),
                                embedder.embed(baseline_texts));
}

std::set<Trigram> trigram_set(std::string_view text) {
  const std::vector<std::string> tokens =
      whitespace_tokens(nfc_normalize(text));
  std::set<Trigram> trigrams;
  if (tokens.size() < 3) return trigrams;
  for (std::size_t i = 0; i + 3 <= tokens.size(); ++i) {
    trigrams.insert({tokens[i], tokens[i + 1], tokens[i + 2]});
  }
  return trigrams;
}

double trigram_diversity(std::string_view x, std::string_view y) {
  const std::set<Trigram> a = trigram_set(x);
  const std::set<Trigram> b = trigram_set(y);
  if (a.empty() && b.empty()) {
    return 0.0;  // no measurable surface divergence
  }
  std::size_t intersection = 0;
  for (const Trigram& t : a) {
    if (b.count(t)) ++intersection;
  }
  const std::size_t unions = a.size() + b.size() - intersection;
  // (|u| - |n|) / |u| rather than 1 - |n|/|u|: algebraically identical and
  // exact for small integer set sizes.
  return static_cast<double>(unions - intersection) /
         static_cast<double>(unions);
}

std::string_view to_string(TraceChannel channel) {
  switch (channel) {
    case TraceChannel::responses: return "responses";
    case TraceChannel::reasoning: return "reasoning";
    case TraceChannel::questions: return "questions";
  }
  return "responses";
}

std::optional<TraceChannel> trace_channel_from(std::string_view name) {
  if (name == "responses") return TraceChannel::responses;
  if (name == "reasoning") return TraceChannel::reasoning;
  if (name == "questions") return TraceChannel::questions;
  return std::nullopt;
}

const std::string& channel_text(const CorpusRecord& record,
                                TraceChannel channel) {
  switch (channel) {
    case TraceChannel::responses: return record.response_text;
    case TraceChannel::reasoning: return record.reasoning_text;
    case TraceChannel::questions: return record.wrapped_question;
  }
  return record.response_text;
}

double paired_trigram_diversity(const std::vector<CorpusRecord>& variant,
                                const std::vector<CorpusRecord>& baseline,
                                TraceChannel channel) {
  if (variant.empty()) {
    throw Error(Errc::empty_set, "variant corpus is empty");
  }
  std::map<std::string, const CorpusRecord*> by_seed;
  for (const CorpusRecord& record : baseline) {
    if (record.principle_id == PrincipleId::Null) {
      by_seed[record.seed_id] = &record;
    }
  }
  double sum = 0.0;
  for (const CorpusRecord& record : variant) {
    auto it = by_seed.find(record.seed_id);
    if (it == by_seed.end()) {
      throw Error(Errc::missing_counterpart,
                  "no null-prompt baseline for seed '" + record.seed_id + "'");
    }
    sum += trigram_diversity(channel_text(record, channel),
                             channel_text(*it->second, channel));
  }
  return sum / static_cast<double>(variant.size());
}

TokenStats token_stats(const std::vector<std::string>& texts,
                       const Tokenizer& tokenizer) {
  if (texts.empty()) {
    throw Error(Errc::empty_list, "token stats need at least one text");
  }
  TokenStats stats;
  stats.count = texts.size();
  stats.min = std::numeric_limits<std::size_t>::max();
  for (const std::string& text : texts) {
    const std::size_t tokens = tokenizer.count_tokens(text);
    stats.total += tokens;
    stats.min = std::min(stats.min, tokens);
    stats.max = std::max(stats.max, tokens);
  }
  stats.mean =
      static_cast<double>(stats.total) / static_cast<double>(stats.count);
  return stats;
}

std::string format_fixed(double value, int decimals) {
  double scale = 1.0;
  for (int i = 0; i < decimals; ++i) scale *= 10.0;
  const double rounded = std::floor(value * scale + 0.5) / scale;
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, rounded);
  return buffer;
}

std::string serialize_report(const DiversityReport& report) {
  ordered_json line;
  line["variant_id"] = report.variant_id;
  line["diversity_gain"] = report.diversity_gain;
  line["trigram_diversity_responses"] = report.trigram_diversity_responses;
  line["trigram_diversity_reasoning"] = report.trigram_diversity_reasoning;
  line["token_stats_responses"] = stats_to_json(report.token_stats_responses);
  line["token_stats_reasoning"] = stats_to_json(report.token_stats_reasoning);
  // Table-style presentation fields, denormalized for human diffing.
  line["display"] = {
      {"responses_mean", format_fixed(report.token_stats_responses.mean, 1)},
      {"reasoning_mean", format_fixed(report.token_stats_reasoning.mean, 1)},
  };
  return line.dump();
}

DiversityReport parse_report(const std::string& line) {
  ordered_json parsed;
  try {
    parsed = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::malformed_record,
                std::string("diversity report line: ") + e.what());
  }
  DiversityReport report;
  report.variant_id = parsed.at("variant_id").get<std::string>();
  report.diversity_gain = parsed.at("diversity_gain").get<double>();
  report.trigram_diversity_responses =
      parsed.at("trigram_diversity_responses").get<double>();
  report.trigram_diversity_reasoning =
      parsed.at("trigram_diversity_reasoning").get<double>();
  report.token_stats_responses =
      stats_from_json(parsed.at("token_stats_responses"));
  report.token_stats_reasoning =
      stats_from_json(parsed.at("token_stats_reasoning"));
  return report;
}

std::vector<DiversityReport> diversity_reports(
    const std::vector<CorpusRecord>& corpus,
    const std::vector<CorpusRecord>& baseline, Embedder& embedder,
    const Tokenizer& tokenizer, TraceChannel dg_channel) {
  std::map<PrincipleId, std::vector<const CorpusRecord*>> by_principle;
  for (const CorpusRecord& record : corpus) {
    if (record.principle_id != PrincipleId::Null) {
      by_principle[record.principle_id].push_back(&record);
    }
  }

  std::vector<std::string> baseline_dg_texts;
  for (const CorpusRecord& record : baseline) {
    if (record.principle_id == PrincipleId::Null) {
      baseline_dg_texts.push_back(channel_text(record, dg_channel));
    }
  }

  std::vector<DiversityReport> reports;
  for (const PrincipleTemplate& tmpl : registry()) {
    auto it = by_principle.find(tmpl.principle_id);
    if (it == by_principle.end()) continue;
    const std::vector<const CorpusRecord*>& group = it->second;

    std::vector<CorpusRecord> variant;
    variant.reserve(group.size());
    std::vector<std::string> responses;
    std::vector<std::string> reasonings;
    std::vector<std::string> dg_texts;
    for (const CorpusRecord* record : group) {
      variant.push_back(*record);
      responses.push_back(record->response_text);
      reasonings.push_back(record->reasoning_text);
      dg_texts.push_back(channel_text(*record, dg_channel));
    }

    DiversityReport report;
    report.variant_id = std::string(to_string(tmpl.principle_id));
    report.diversity_gain =
        diversity_gain(dg_texts, baseline_dg_texts, embedder);
    report.trigram_diversity_responses =
        paired_trigram_diversity(variant, baseline, TraceChannel::responses);
    report.trigram_diversity_reasoning =
        paired_trigram_diversity(variant, baseline, TraceChannel::reasoning);
    report.token_stats_responses = token_stats(responses, tokenizer);
    report.token_stats_reasoning = token_stats(reasonings, tokenizer);
    reports.push_back(std::move(report));
  }
  return reports;
}

void write_reports(const std::vector<DiversityReport>& reports,
                   std::ostream& out) {
  for (const DiversityReport& report : reports) {
    out << serialize_report(report) << '\n';
  }
}

}  // namespace ptts
