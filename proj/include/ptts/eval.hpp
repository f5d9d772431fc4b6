#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ptts/gateway.hpp"
#include "ptts/seeds.hpp"

namespace ptts {

struct BenchmarkItem {
  std::string item_id;
  std::string question_text;
  std::string gold_answer;
  AnswerKind answer_kind = AnswerKind::integer_0_999;
};

struct GradeResult {
  std::string item_id;
  std::optional<std::string> extracted_answer;
  bool correct = false;
  std::string response_text;
  std::string error;  // gateway failure note, empty otherwise
};

struct EvalReport {
  std::string benchmark_name;
  std::size_t total = 0;
  std::size_t correct = 0;
  double accuracy_percent = 0.0;  // two-decimal, half-up
  std::vector<GradeResult> per_item;
};

// Candidate answer span, in priority order: last balanced \boxed{...}, then
// the last "Final Answer" line's trailing token, then (multiple choice only)
// the last standalone option letter. Absence is data, not a fault.
std::optional<std::string> extract_answer(std::string_view response_text,
                                          AnswerKind answer_kind);

// Canonical comparison form per answer kind. Throws unnormalizable_candidate.
std::string normalize_answer(std::string_view candidate,
                             AnswerKind answer_kind);

// Deterministic and pure in (response_text, item).
GradeResult grade_item(std::string_view response_text,
                       const BenchmarkItem& item);

// 100 * correct / total, rounded half-up to two decimals. Throws
// empty_results.
double accuracy(const std::vector<GradeResult>& results);

struct EvalOptions {
  std::string benchmark_name;
  std::string model_id;
  double temperature = 0.0;  // greedy decoding per protocol
  int max_output_tokens = 20000;
  std::string system_text;
};

// Queries each item once through the gateway (same cache semantics), grades,
// and aggregates in benchmark order. Per-item gateway errors grade as
// incorrect and are flagged, never aborting the run.
EvalReport run_eval(const std::vector<BenchmarkItem>& benchmark,
                    TeacherGateway& gateway, const EvalOptions& options);

// Benchmark files use the seed record format plus answer_kind.
std::vector<BenchmarkItem> load_benchmark_file(
    const std::filesystem::path& path);

void write_eval_report(const EvalReport& report, std::ostream& out);

}  // namespace ptts
