#include "ptts/sft.hpp"

#include <json.hpp>

#include <algorithm>
#include <istream>
#include <ostream>

namespace ptts {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string_view cover_name(MaskCover cover) {
  return cover == MaskCover::masked ? "masked" : "supervised";
}

MaskCover cover_from(std::string_view name) {
  if (name == "masked") return MaskCover::masked;
  if (name == "supervised") return MaskCover::supervised;
  throw Error(Errc::malformed_record,
              "unknown mask cover '" + std::string(name) + "'");
}

}  // namespace

std::string_view to_string(SftLayout layout) {
  return layout == SftLayout::reasoning_then_response ? "reasoning_then_response"
                                                      : "response_only";
}

std::optional<SftLayout> sft_layout_from(std::string_view name) {
  if (name == "reasoning_then_response") return SftLayout::reasoning_then_response;
  if (name == "response_only") return SftLayout::response_only;
  return std::nullopt;
}

ChatExample to_chat_example(const CorpusRecord& record, SftLayout layout) {
  if (record.response_text.empty()) {
    throw Error(Errc::empty_assistant_content,
                "record (" + record.seed_id + ", " +
                    std::string(to_string(record.principle_id)) +
                    ") has no response text");
  }
  std::string assistant;
  if (layout == SftLayout::reasoning_then_response &&
      !record.reasoning_text.empty()) {
    assistant = record.reasoning_text + std::string(kAssistantSeparator) +
                record.response_text;
  } else {
    assistant = record.response_text;
  }
  ChatExample example;
  example.messages.push_back({"user", record.wrapped_question});
  example.messages.push_back({"assistant", std::move(assistant)});
  example.mask_spans.push_back({0, MaskCover::masked});
  example.mask_spans.push_back({1, MaskCover::supervised});
  return example;
}

std::vector<LengthAuditEntry> length_audit(const Corpus& corpus,
                                           SftLayout layout,
                                           const Tokenizer& tokenizer,
                                           std::size_t limit) {
  std::vector<LengthAuditEntry> audit;
  audit.reserve(corpus.records.size());
  for (const CorpusRecord& record : corpus.records) {
    const ChatExample example = to_chat_example(record, layout);
    LengthAuditEntry entry;
    entry.seed_id = record.seed_id;
    entry.principle_id = record.principle_id;
    for (const ChatMessage& message : example.messages) {
      entry.token_count += tokenizer.count_tokens(message.content);
    }
    entry.over_limit = entry.token_count > limit;
    audit.push_back(std::move(entry));
  }
  std::stable_sort(audit.begin(), audit.end(),
                   [](const LengthAuditEntry& a, const LengthAuditEntry& b) {
                     return a.over_limit > b.over_limit;
                   });
  return audit;
}

std::string serialize_chat_example(const ChatExample& example) {
  ordered_json line;
  auto messages = ordered_json::array();
  for (const ChatMessage& message : example.messages) {
    messages.push_back({{"role", message.role}, {"content", message.content}});
  }
  line["messages"] = messages;
  auto spans = ordered_json::array();
  for (const MaskSpan& span : example.mask_spans) {
    spans.push_back({{"message", span.message_index},
                     {"cover", std::string(cover_name(span.cover))}});
  }
  line["mask_spans"] = spans;
  return line.dump();
}

ChatExample parse_chat_example(const std::string& line) {
  ordered_json parsed;
  try {
    parsed = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::malformed_record, std::string("chat example: ") + e.what());
  }
  ChatExample example;
  for (const auto& message : parsed.at("messages")) {
    example.messages.push_back({message.at("role").get<std::string>(),
                                message.at("content").get<std::string>()});
  }
  for (const auto& span : parsed.at("mask_spans")) {
    example.mask_spans.push_back(
        {span.at("message").get<std::size_t>(),
         cover_from(span.at("cover").get<std::string>())});
  }
  return example;
}

std::vector<ChatExample> read_chat_examples(std::istream& in) {
  std::vector<ChatExample> examples;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    examples.push_back(parse_chat_example(line));
  }
  return examples;
}

ExportSummary export_sft(const Corpus& corpus, SftLayout layout,
                         const Tokenizer& tokenizer, std::size_t limit,
                         std::ostream& out) {
  ExportSummary summary;
  for (const CorpusRecord& record : corpus.records) {
    out << serialize_chat_example(to_chat_example(record, layout)) << '\n';
    ++summary.written;
  }
  summary.audit = length_audit(corpus, layout, tokenizer, limit);
  return summary;
}

void write_length_audit(const std::vector<LengthAuditEntry>& audit,
                        std::ostream& out) {
  for (const LengthAuditEntry& entry : audit) {
    ordered_json line;
    line["seed_id"] = entry.seed_id;
    line["principle_id"] = std::string(to_string(entry.principle_id));
    line["token_count"] = entry.token_count;
    line["over_limit"] = entry.over_limit;
    out << line.dump() << '\n';
  }
}

}  // namespace ptts
