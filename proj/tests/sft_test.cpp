#include <doctest.h>

#include <sstream>

#include "ptts/sft.hpp"
#include "test_support.hpp"

using namespace ptts;

namespace {

CorpusRecord sample_record(const std::string& seed_id = "s1") {
  CorpusRecord record;
  record.seed_id = seed_id;
  record.principle_id = PrincipleId::Reward;
  record.wrapped_question = "wrapped question for " + seed_id;
  record.reasoning_text = "step one\nstep two";
  record.response_text = "the answer is \\boxed{23}";
  record.gold_answer = "23";
  record.teacher_model_id = "mock-teacher";
  return record;
}

std::string tokens_of(std::size_t n) {
  std::string text;
  text.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!text.empty()) text += ' ';
    text += "t";
  }
  return text;
}

}  // namespace

TEST_CASE("chat examples mask the user turn and supervise the assistant") {
  const ChatExample example =
      to_chat_example(sample_record(), SftLayout::reasoning_then_response);
  REQUIRE(example.messages.size() == 2);
  CHECK(example.messages[0].role == "user");
  CHECK(example.messages[0].content == "wrapped question for s1");
  CHECK(example.messages[1].role == "assistant");
  CHECK(example.messages[1].content ==
        "step one\nstep two\n\nthe answer is \\boxed{23}");
  REQUIRE(example.mask_spans.size() == 2);
  CHECK(example.mask_spans[0] == MaskSpan{0, MaskCover::masked});
  CHECK(example.mask_spans[1] == MaskSpan{1, MaskCover::supervised});
}

TEST_CASE("response_only layout drops the reasoning") {
  const ChatExample example =
      to_chat_example(sample_record(), SftLayout::response_only);
  CHECK(example.messages[1].content == "the answer is \\boxed{23}");
}

TEST_CASE("a record without reasoning skips the separator") {
  CorpusRecord record = sample_record();
  record.reasoning_text.clear();
  const ChatExample example =
      to_chat_example(record, SftLayout::reasoning_then_response);
  CHECK(example.messages[1].content == "the answer is \\boxed{23}");
}

TEST_CASE("an empty response is unexportable") {
  CorpusRecord record = sample_record();
  record.response_text.clear();
  CHECK_THROWS_AS(to_chat_example(record, SftLayout::reasoning_then_response),
                  Error);
  CHECK_THROWS_AS(to_chat_example(record, SftLayout::response_only), Error);
}

TEST_CASE("chat examples round-trip through serialization") {
  const ChatExample example =
      to_chat_example(sample_record(), SftLayout::reasoning_then_response);
  CHECK(parse_chat_example(serialize_chat_example(example)) == example);

  // unicode and embedded quotes survive
  CorpusRecord exotic = sample_record("sé");
  exotic.wrapped_question = "ask \"this\" — exactly";
  const ChatExample round =
      to_chat_example(exotic, SftLayout::reasoning_then_response);
  CHECK(parse_chat_example(serialize_chat_example(round)) == round);
}

TEST_CASE("export writes one line per record in corpus order") {
  Corpus corpus;
  corpus.seed_count = 3;
  for (int i = 0; i < 3; ++i) {
    corpus.records.push_back(sample_record("s" + std::to_string(i)));
  }

  WhitespaceTokenizer tokenizer;
  std::ostringstream out;
  const ExportSummary summary = export_sft(
      corpus, SftLayout::reasoning_then_response, tokenizer, 20000, out);
  CHECK(summary.written == 3);
  CHECK(summary.audit.size() == 3);

  std::istringstream in(out.str());
  const auto examples = read_chat_examples(in);
  REQUIRE(examples.size() == 3);
  for (int i = 0; i < 3; ++i) {
    // parse-back recovers the wrapped question and assistant content
    CHECK(examples[i].messages[0].content ==
          corpus.records[i].wrapped_question);
    CHECK(examples[i].messages[1].content ==
          corpus.records[i].reasoning_text + "\n\n" +
              corpus.records[i].response_text);
  }

  // re-export of the identical corpus is byte-identical
  std::ostringstream again;
  export_sft(corpus, SftLayout::reasoning_then_response, tokenizer, 20000,
             again);
  CHECK(again.str() == out.str());
}

TEST_CASE("empty corpus exports an empty, valid file") {
  Corpus corpus;
  WhitespaceTokenizer tokenizer;
  std::ostringstream out;
  const ExportSummary summary = export_sft(
      corpus, SftLayout::reasoning_then_response, tokenizer, 20000, out);
  CHECK(summary.written == 0);
  CHECK(out.str().empty());
  std::istringstream in(out.str());
  CHECK(read_chat_examples(in).empty());
}

TEST_CASE("length audit flags records over the sequence limit") {
  Corpus corpus;
  corpus.seed_count = 3;

  // user + assistant token totals of 19999, 20000 + 1, and a small one.
  CorpusRecord under = sample_record("under");
  under.wrapped_question = tokens_of(9999);
  under.reasoning_text = tokens_of(5000);
  under.response_text = tokens_of(5000);  // 19999 total

  CorpusRecord over = sample_record("over");
  over.wrapped_question = tokens_of(10001);
  over.reasoning_text = tokens_of(5000);
  over.response_text = tokens_of(5000);  // 20001 total

  CorpusRecord tiny = sample_record("tiny");

  corpus.records = {under, over, tiny};

  WhitespaceTokenizer tokenizer;
  const auto audit = length_audit(corpus, SftLayout::reasoning_then_response,
                                  tokenizer, 20000);
  REQUIRE(audit.size() == 3);
  // over-limit entries come first
  CHECK(audit[0].seed_id == "over");
  CHECK(audit[0].token_count == 20001);
  CHECK(audit[0].over_limit);
  CHECK(audit[1].seed_id == "under");
  CHECK(audit[1].token_count == 19999);
  CHECK_FALSE(audit[1].over_limit);
  CHECK_FALSE(audit[2].over_limit);

  std::ostringstream manifest;
  write_length_audit(audit, manifest);
  CHECK(manifest.str().find("\"over_limit\":true") != std::string::npos);
}

TEST_CASE("length audit respects the layout") {
  Corpus corpus;
  corpus.seed_count = 1;
  CorpusRecord record = sample_record();
  record.wrapped_question = tokens_of(10);
  record.reasoning_text = tokens_of(100);
  record.response_text = tokens_of(5);
  corpus.records = {record};

  WhitespaceTokenizer tokenizer;
  const auto with_reasoning = length_audit(
      corpus, SftLayout::reasoning_then_response, tokenizer, 20000);
  const auto without = length_audit(corpus, SftLayout::response_only,
                                    tokenizer, 20000);
  CHECK(with_reasoning[0].token_count == 115);
  CHECK(without[0].token_count == 15);
}
