#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ptts/errors.hpp"

namespace ptts {

enum class AnswerKind { integer_0_999, numeric_expression, multiple_choice };

std::string_view to_string(AnswerKind kind);
std::optional<AnswerKind> answer_kind_from(std::string_view name);

// One competition problem with a definitive gold answer.
struct SeedProblem {
  std::string seed_id;
  std::string question_text;
  std::string gold_answer;  // canonical form; integers have no sign or leading zeros
  AnswerKind answer_kind = AnswerKind::integer_0_999;
  std::string source_tag;
  // Unknown input fields ride along untouched so a rewrite loses nothing.
  nlohmann::ordered_json extras = nlohmann::ordered_json::object();

  bool operator==(const SeedProblem&) const = default;
};

// Immutable after construction; iteration order is ingestion order.
class SeedSet {
 public:
  SeedSet() = default;
  explicit SeedSet(std::vector<SeedProblem> problems)
      : problems_(std::move(problems)) {}

  std::size_t size() const { return problems_.size(); }
  bool empty() const { return problems_.empty(); }
  const SeedProblem& operator[](std::size_t i) const { return problems_[i]; }
  const std::vector<SeedProblem>& problems() const { return problems_; }
  auto begin() const { return problems_.begin(); }
  auto end() const { return problems_.end(); }

  bool operator==(const SeedSet&) const = default;

 private:
  std::vector<SeedProblem> problems_;
};

struct SeedViolation {
  Errc code;
  std::string detail;
};

// Canonical integer answer in [0, 999]: digits only, leading zeros stripped.
// nullopt when the candidate is signed, non-numeric, or out of range.
std::optional<std::string> canonical_integer_answer(std::string_view raw);

// Violations are data, not faults; ok iff the returned list is empty.
std::vector<SeedViolation> validate_seed(const SeedProblem& problem);

// Parses line-delimited JSON records. Throws Error with code
// malformed_record (carrying the 1-based line number), duplicate_seed_id,
// or answer_out_of_range. Blank lines are skipped.
SeedSet ingest_seeds(std::istream& source);

SeedSet load_seed_file(const std::filesystem::path& path);

// Canonical serialization: one record per line, fixed field order, then any
// preserved unknown fields. ingest_seeds(serialize_seeds(s)) == s.
void serialize_seeds(const SeedSet& seeds, std::ostream& out);

}  // namespace ptts
