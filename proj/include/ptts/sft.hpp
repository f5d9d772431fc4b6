#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ptts/corpus.hpp"
#include "ptts/textnorm.hpp"

namespace ptts {

enum class SftLayout { reasoning_then_response, response_only };

std::string_view to_string(SftLayout layout);
std::optional<SftLayout> sft_layout_from(std::string_view name);

enum class MaskCover { masked, supervised };

struct ChatMessage {
  std::string role;  // "user" | "assistant"
  std::string content;
  bool operator==(const ChatMessage&) const = default;
};

struct MaskSpan {
  std::size_t message_index = 0;
  MaskCover cover = MaskCover::masked;
  bool operator==(const MaskSpan&) const = default;
};

// One user message (masked) followed by one assistant message (supervised).
struct ChatExample {
  std::vector<ChatMessage> messages;
  std::vector<MaskSpan> mask_spans;
  bool operator==(const ChatExample&) const = default;
};

// Blank line between reasoning and response inside the assistant turn.
inline constexpr std::string_view kAssistantSeparator = "\n\n";

// Throws empty_assistant_content when the record's response text is empty.
ChatExample to_chat_example(const CorpusRecord& record, SftLayout layout);

struct LengthAuditEntry {
  std::string seed_id;
  PrincipleId principle_id = PrincipleId::Null;
  std::size_t token_count = 0;  // whole example: user + assistant content
  bool over_limit = false;
};

inline constexpr std::size_t kDefaultSequenceLimit = 20000;

// One entry per record; over-limit entries first (stable otherwise).
// Over-limit records are flagged, never dropped.
std::vector<LengthAuditEntry> length_audit(
    const Corpus& corpus, SftLayout layout, const Tokenizer& tokenizer,
    std::size_t limit = kDefaultSequenceLimit);

struct ExportSummary {
  std::size_t written = 0;
  std::vector<LengthAuditEntry> audit;
};

// One line-delimited chat example per record, in corpus order.
ExportSummary export_sft(const Corpus& corpus, SftLayout layout,
                         const Tokenizer& tokenizer, std::size_t limit,
                         std::ostream& out);

std::string serialize_chat_example(const ChatExample& example);
ChatExample parse_chat_example(const std::string& line);
std::vector<ChatExample> read_chat_examples(std::istream& in);

void write_length_audit(const std::vector<LengthAuditEntry>& audit,
                        std::ostream& out);

}  // namespace ptts
