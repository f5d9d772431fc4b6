#include <doctest.h>

#include <sstream>

#include "ptts/seeds.hpp"

using namespace ptts;

namespace {

std::string seed_line(const std::string& id, const std::string& question,
                      const std::string& answer,
                      const std::string& kind = "integer_0_999") {
  return "{\"seed_id\":\"" + id + "\",\"question_text\":\"" + question +
         "\",\"gold_answer\":\"" + answer + "\",\"answer_kind\":\"" + kind +
         "\",\"source_tag\":\"test\"}\n";
}

}  // namespace

TEST_CASE("ingest preserves order and computes the size") {
  std::string data;
  for (int i = 0; i < 90; ++i) {
    data += seed_line("aime-" + std::to_string(i), "Problem " + std::to_string(i),
                      std::to_string(i % 1000));
  }
  std::istringstream in(data);
  const SeedSet seeds = ingest_seeds(in);
  REQUIRE(seeds.size() == 90);
  CHECK(seeds[0].seed_id == "aime-0");
  CHECK(seeds[89].seed_id == "aime-89");
}

TEST_CASE("empty stream yields an empty, valid seed set") {
  std::istringstream in("");
  CHECK(ingest_seeds(in).size() == 0);
}

TEST_CASE("integer answers are canonicalized on ingest") {
  std::istringstream in(seed_line("s1", "Q", "023"));
  const SeedSet seeds = ingest_seeds(in);
  CHECK(seeds[0].gold_answer == "23");
  CHECK(validate_seed(seeds[0]).empty());
}

TEST_CASE("out-of-range and signed integer answers are rejected") {
  for (const std::string answer : {"1000", "-1", "12.5", "abc"}) {
    std::istringstream in(seed_line("s1", "Q", answer));
    CHECK_THROWS_WITH_AS(ingest_seeds(in), doctest::Contains("s1"), Error);
  }
  std::istringstream boundary(seed_line("s1", "Q", "999") +
                              seed_line("s2", "Q", "0"));
  CHECK(ingest_seeds(boundary).size() == 2);
}

TEST_CASE("duplicate ids and malformed lines carry their context") {
  std::istringstream dup(seed_line("same", "Q", "1") + seed_line("same", "Q", "2"));
  try {
    ingest_seeds(dup);
    FAIL("expected duplicate_seed_id");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::duplicate_seed_id);
  }

  std::istringstream junk(seed_line("ok", "Q", "1") + "not json\n");
  try {
    ingest_seeds(junk);
    FAIL("expected malformed_record");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::malformed_record);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }

  std::istringstream missing("{\"seed_id\":\"x\"}\n");
  CHECK_THROWS_AS(ingest_seeds(missing), Error);
}

TEST_CASE("validate_seed enumerates violations as data") {
  SeedProblem blank;
  blank.seed_id = "v";
  blank.question_text = "   ";
  blank.gold_answer = "-1";
  const auto violations = validate_seed(blank);
  REQUIRE(violations.size() == 2);
  CHECK(violations[0].code == Errc::empty_question);
  CHECK(violations[1].code == Errc::answer_out_of_range);
}

TEST_CASE("ingest after serialize is the identity") {
  std::istringstream in(
      seed_line("a", "What is 2+2?", "4") +
      "{\"seed_id\":\"b\",\"question_text\":\"Pick one\",\"gold_answer\":\"C\","
      "\"answer_kind\":\"multiple_choice\",\"source_tag\":\"quiz\","
      "\"difficulty\":\"hard\"}\n");
  const SeedSet original = ingest_seeds(in);
  CHECK(original[1].extras.at("difficulty") == "hard");

  std::ostringstream serialized;
  serialize_seeds(original, serialized);
  std::istringstream again(serialized.str());
  const SeedSet reparsed = ingest_seeds(again);
  CHECK(reparsed == original);

  // Canonical serialization is a fixed point byte-for-byte.
  std::ostringstream twice;
  serialize_seeds(reparsed, twice);
  CHECK(twice.str() == serialized.str());
}

TEST_CASE("ingest is deterministic") {
  const std::string data = seed_line("a", "Q1", "7") + seed_line("b", "Q2", "8");
  std::istringstream in1(data), in2(data);
  CHECK(ingest_seeds(in1) == ingest_seeds(in2));
}

TEST_CASE("every accepted seed validates clean") {
  std::string data;
  for (int i = 0; i < 25; ++i) {
    data += seed_line("s" + std::to_string(i), "Q" + std::to_string(i),
                      std::to_string(i * 37 % 1000));
  }
  std::istringstream in(data);
  for (const SeedProblem& problem : ingest_seeds(in)) {
    CHECK(validate_seed(problem).empty());
  }
}
