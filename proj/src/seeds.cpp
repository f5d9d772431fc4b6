#include "ptts/seeds.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

namespace ptts {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* const kKnownFields[] = {"seed_id", "question_text", "gold_answer",
                                    "answer_kind", "source_tag"};

bool is_known_field(const std::string& key) {
  for (const char* field : kKnownFields) {
    if (key == field) return true;
  }
  return false;
}

std::string trimmed(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return std::string(s.substr(begin, end - begin));
}

std::string require_string(const ordered_json& record, const char* field,
                           std::size_t line_number) {
  auto it = record.find(field);
  if (it == record.end() || !it->is_string()) {
    throw Error(Errc::malformed_record,
                "line " + std::to_string(line_number) +
                    ": missing or non-string field '" + field + "'");
  }
  return it->get<std::string>();
}

}  // namespace

std::string_view to_string(AnswerKind kind) {
  switch (kind) {
    case AnswerKind::integer_0_999: return "integer_0_999";
    case AnswerKind::numeric_expression: return "numeric_expression";
    case AnswerKind::multiple_choice: return "multiple_choice";
  }
  return "integer_0_999";
}

std::optional<AnswerKind> answer_kind_from(std::string_view name) {
  if (name == "integer_0_999") return AnswerKind::integer_0_999;
  if (name == "numeric_expression") return AnswerKind::numeric_expression;
  if (name == "multiple_choice") return AnswerKind::multiple_choice;
  return std::nullopt;
}

std::optional<std::string> canonical_integer_answer(std::string_view raw) {
  const std::string text = trimmed(raw);
  if (text.empty() || text.size() > 16) return std::nullopt;
  for (char c : text) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
  }
  std::size_t first = text.find_first_not_of('0');
  std::string canonical = first == std::string::npos ? "0" : text.substr(first);
  if (canonical.size() > 3) return std::nullopt;  // > 999
  return canonical;
}

std::vector<SeedViolation> validate_seed(const SeedProblem& problem) {
  std::vector<SeedViolation> violations;
  if (problem.seed_id.empty()) {
    violations.push_back({Errc::malformed_record, "empty seed_id"});
  }
  if (trimmed(problem.question_text).empty()) {
    violations.push_back({Errc::empty_question,
                          "question_text empty after whitespace trimming"});
  }
  if (problem.answer_kind == AnswerKind::integer_0_999 &&
      !canonical_integer_answer(problem.gold_answer)) {
    violations.push_back(
        {Errc::answer_out_of_range,
         "gold_answer '" + problem.gold_answer + "' is not an integer in [0, 999]"});
  }
  if (problem.gold_answer.empty()) {
    violations.push_back({Errc::malformed_record, "empty gold_answer"});
  }
  return violations;
}

SeedSet ingest_seeds(std::istream& source) {
  std::vector<SeedProblem> problems;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(source, line)) {
    ++line_number;
    if (trimmed(line).empty()) continue;

    ordered_json record;
    try {
      record = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(Errc::malformed_record,
                  "line " + std::to_string(line_number) + ": " + e.what());
    }
    if (!record.is_object()) {
      throw Error(Errc::malformed_record,
                  "line " + std::to_string(line_number) + ": not a JSON object");
    }

    SeedProblem problem;
    problem.seed_id = require_string(record, "seed_id", line_number);
    problem.question_text = require_string(record, "question_text", line_number);
    problem.gold_answer = require_string(record, "gold_answer", line_number);
    const std::string kind_name = require_string(record, "answer_kind", line_number);
    auto kind = answer_kind_from(kind_name);
    if (!kind) {
      throw Error(Errc::malformed_record,
                  "line " + std::to_string(line_number) +
                      ": unknown answer_kind '" + kind_name + "'");
    }
    problem.answer_kind = *kind;
    problem.source_tag = require_string(record, "source_tag", line_number);

    for (auto it = record.begin(); it != record.end(); ++it) {
      if (!is_known_field(it.key())) {
        problem.extras[it.key()] = it.value();
      }
    }

    if (problem.seed_id.empty() || trimmed(problem.question_text).empty()) {
      throw Error(Errc::malformed_record,
                  "line " + std::to_string(line_number) +
                      ": empty seed_id or question_text");
    }
    if (problem.answer_kind == AnswerKind::integer_0_999) {
      auto canonical = canonical_integer_answer(problem.gold_answer);
      if (!canonical) {
        throw Error(Errc::answer_out_of_range,
                    "seed '" + problem.seed_id + "': gold_answer '" +
                        problem.gold_answer + "' is not an integer in [0, 999]");
      }
      problem.gold_answer = *canonical;
    }
    if (!seen_ids.insert(problem.seed_id).second) {
      throw Error(Errc::duplicate_seed_id, "seed '" + problem.seed_id + "'");
    }
    problems.push_back(std::move(problem));
  }
  return SeedSet(std::move(problems));
}

SeedSet load_seed_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::io_error, "cannot open seed file: " + path.string());
  }
  return ingest_seeds(in);
}

void serialize_seeds(const SeedSet& seeds, std::ostream& out) {
  for (const SeedProblem& problem : seeds) {
    ordered_json record;
    record["seed_id"] = problem.seed_id;
    record["question_text"] = problem.question_text;
    record["gold_answer"] = problem.gold_answer;
    record["answer_kind"] = std::string(to_string(problem.answer_kind));
    record["source_tag"] = problem.source_tag;
    for (auto it = problem.extras.begin(); it != problem.extras.end(); ++it) {
      record[it.key()] = it.value();
    }
    out << record.dump() << '\n';
  }
}

}  // namespace ptts
