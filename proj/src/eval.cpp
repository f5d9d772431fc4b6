#include "ptts/eval.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <ostream>
#include <thread>

#include "ptts/textnorm.hpp"

namespace ptts {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trimmed(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return std::string(s.substr(begin, end - begin));
}

// Content of the last \boxed{...} whose braces balance.
std::optional<std::string> last_boxed(std::string_view text) {
  static constexpr std::string_view kMarker = "\\boxed{";
  std::optional<std::string> result;
  std::size_t at = 0;
  while ((at = text.find(kMarker, at)) != std::string_view::npos) {
    const std::size_t inner = at + kMarker.size();
    int depth = 1;
    std::size_t i = inner;
    for (; i < text.size(); ++i) {
      if (text[i] == '{') {
        ++depth;
      } else if (text[i] == '}') {
        if (--depth == 0) break;
      }
    }
    if (depth == 0) {
      result = std::string(text.substr(inner, i - inner));
    }
    at = inner;
  }
  return result;
}

bool iequals_at(std::string_view text, std::size_t pos, std::string_view phrase) {
  if (pos + phrase.size() > text.size()) return false;
  for (std::size_t i = 0; i < phrase.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[pos + i])) !=
        std::tolower(static_cast<unsigned char>(phrase[i]))) {
      return false;
    }
  }
  return true;
}

// Trailing token of the last line mentioning "Final Answer", taken from the
// text after the phrase so the phrase itself never becomes the candidate.
std::optional<std::string> final_answer_token(std::string_view text) {
  static constexpr std::string_view kPhrase = "final answer";
  std::size_t line_start = 0;
  std::optional<std::string> result;
  while (line_start <= text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    const std::string_view line = text.substr(line_start, line_end - line_start);
    std::size_t phrase_at = std::string_view::npos;
    for (std::size_t i = 0; i + kPhrase.size() <= line.size(); ++i) {
      if (iequals_at(line, i, kPhrase)) phrase_at = i;
    }
    if (phrase_at != std::string_view::npos) {
      const auto tokens =
          whitespace_tokens(line.substr(phrase_at + kPhrase.size()));
      if (!tokens.empty()) {
        result = tokens.back();
      }
    }
    if (line_end == text.size()) break;
    line_start = line_end + 1;
  }
  return result;
}

std::optional<std::string> last_option_letter(std::string_view text) {
  std::optional<std::string> result;
  for (const std::string& token : whitespace_tokens(text)) {
    std::size_t begin = 0;
    std::size_t end = token.size();
    while (begin < end && !std::isalnum(static_cast<unsigned char>(token[begin])))
      ++begin;
    while (end > begin && !std::isalnum(static_cast<unsigned char>(token[end - 1])))
      --end;
    if (end - begin == 1) {
      const char c = static_cast<char>(
          std::toupper(static_cast<unsigned char>(token[begin])));
      if (c >= 'A' && c <= 'D') {
        result = std::string(1, c);
      }
    }
  }
  return result;
}

std::string strip_math_wrappers(std::string value) {
  // Enclosing $...$ / $$...$$.
  while (value.size() >= 2 && value.front() == '$' && value.back() == '$') {
    value = trimmed(value.substr(1, value.size() - 2));
  }
  // \left and \right sizing commands.
  for (std::string_view command : {"\\left", "\\right"}) {
    std::size_t at;
    while ((at = value.find(command)) != std::string::npos) {
      value.erase(at, command.size());
    }
  }
  // Thousands separators: latex "{,}" and plain digit,digit commas.
  std::size_t at;
  while ((at = value.find("{,}")) != std::string::npos) {
    value.erase(at, 3);
  }
  for (std::size_t i = 1; i + 1 < value.size();) {
    if (value[i] == ',' &&
        std::isdigit(static_cast<unsigned char>(value[i - 1])) &&
        std::isdigit(static_cast<unsigned char>(value[i + 1]))) {
      value.erase(i, 1);
    } else {
      ++i;
    }
  }
  return value;
}

}  // namespace

std::optional<std::string> extract_answer(std::string_view response_text,
                                          AnswerKind answer_kind) {
  if (auto boxed = last_boxed(response_text)) {
    return boxed;
  }
  if (auto token = final_answer_token(response_text)) {
    return token;
  }
  if (answer_kind == AnswerKind::multiple_choice) {
    return last_option_letter(response_text);
  }
  return std::nullopt;
}

std::string normalize_answer(std::string_view candidate,
                             AnswerKind answer_kind) {
  std::string value = trimmed(candidate);
  switch (answer_kind) {
    case AnswerKind::integer_0_999: {
      // Integers may arrive wrapped ("$023$", "42.").
      value = strip_math_wrappers(std::move(value));
      if (!value.empty() && value.back() == '.') value.pop_back();
      auto canonical = canonical_integer_answer(value);
      if (!canonical) {
        throw Error(Errc::unnormalizable_candidate,
                    "'" + std::string(candidate) +
                        "' is not an integer in [0, 999]");
      }
      return *canonical;
    }
    case AnswerKind::numeric_expression: {
      value = strip_math_wrappers(std::move(value));
      if (!value.empty() && value.back() == '.') value.pop_back();
      std::string collapsed;
      collapsed.reserve(value.size());
      for (char c : value) {
        if (!std::isspace(static_cast<unsigned char>(c))) collapsed.push_back(c);
      }
      if (collapsed.empty()) {
        throw Error(Errc::unnormalizable_candidate, "empty numeric expression");
      }
      return collapsed;
    }
    case AnswerKind::multiple_choice: {
      std::size_t begin = 0;
      std::size_t end = value.size();
      while (begin < end && !std::isalnum(static_cast<unsigned char>(value[begin])))
        ++begin;
      while (end > begin && !std::isalnum(static_cast<unsigned char>(value[end - 1])))
        --end;
      if (end - begin != 1) {
        throw Error(Errc::unnormalizable_candidate,
                    "'" + std::string(candidate) + "' is not a single option letter");
      }
      const char c = static_cast<char>(
          std::toupper(static_cast<unsigned char>(value[begin])));
      if (c < 'A' || c > 'D') {
        throw Error(Errc::unnormalizable_candidate,
                    "'" + std::string(candidate) + "' is not in {A, B, C, D}");
      }
      return std::string(1, c);
    }
  }
  throw Error(Errc::unnormalizable_candidate, "unknown answer kind");
}

GradeResult grade_item(std::string_view response_text,
                       const BenchmarkItem& item) {
  GradeResult result;
  result.item_id = item.item_id;
  result.response_text = std::string(response_text);
  result.extracted_answer = extract_answer(response_text, item.answer_kind);
  if (!result.extracted_answer) {
    return result;  // correct stays false
  }
  try {
    result.correct =
        normalize_answer(*result.extracted_answer, item.answer_kind) ==
        normalize_answer(item.gold_answer, item.answer_kind);
  } catch (const Error& e) {
    result.correct = false;
    result.error = e.formatted();
  }
  return result;
}

double accuracy(const std::vector<GradeResult>& results) {
  if (results.empty()) {
    throw Error(Errc::empty_results, "accuracy undefined for zero items");
  }
  const std::size_t correct = static_cast<std::size_t>(
      std::count_if(results.begin(), results.end(),
                    [](const GradeResult& r) { return r.correct; }));
  const double percent =
      100.0 * static_cast<double>(correct) / static_cast<double>(results.size());
  return std::floor(percent * 100.0 + 0.5) / 100.0;
}

EvalReport run_eval(const std::vector<BenchmarkItem>& benchmark,
                    TeacherGateway& gateway, const EvalOptions& options) {
  EvalReport report;
  report.benchmark_name = options.benchmark_name;
  report.total = benchmark.size();
  report.per_item.resize(benchmark.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t index = next.fetch_add(1);
      if (index >= benchmark.size()) return;
      const BenchmarkItem& item = benchmark[index];
      CompletionRequest request;
      request.model_id = options.model_id;
      request.prompt_text = item.question_text;
      request.temperature = options.temperature;
      request.max_output_tokens = options.max_output_tokens;
      request.system_text = options.system_text;
      try {
        const TeacherTrace trace = gateway.query(request);
        report.per_item[index] = grade_item(trace.response_text, item);
      } catch (const Error& e) {
        // A flaky call grades as incorrect; the run must survive it.
        GradeResult failed;
        failed.item_id = item.item_id;
        failed.error = e.formatted();
        report.per_item[index] = std::move(failed);
      } catch (const std::exception& e) {
        GradeResult failed;
        failed.item_id = item.item_id;
        failed.error = std::string("error: ") + e.what();
        report.per_item[index] = std::move(failed);
      }
    }
  };

  const std::size_t thread_count = std::min<std::size_t>(
      {benchmark.size(), std::size_t{8},
       std::max<std::size_t>(1, std::thread::hardware_concurrency())});
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < thread_count; ++t) threads.emplace_back(worker);
    for (std::thread& thread : threads) thread.join();
  }

  report.correct = static_cast<std::size_t>(
      std::count_if(report.per_item.begin(), report.per_item.end(),
                    [](const GradeResult& r) { return r.correct; }));
  report.accuracy_percent =
      report.per_item.empty() ? 0.0 : accuracy(report.per_item);
  return report;
}

std::vector<BenchmarkItem> load_benchmark_file(
    const std::filesystem::path& path) {
  const SeedSet seeds = load_seed_file(path);
  std::vector<BenchmarkItem> items;
  items.reserve(seeds.size());
  for (const SeedProblem& seed : seeds) {
    BenchmarkItem item;
    item.item_id = seed.seed_id;
    item.question_text = seed.question_text;
    item.gold_answer = seed.gold_answer;
    item.answer_kind = seed.answer_kind;
    if (item.answer_kind == AnswerKind::multiple_choice) {
      item.gold_answer = normalize_answer(item.gold_answer, item.answer_kind);
    }
    items.push_back(std::move(item));
  }
  return items;
}

void write_eval_report(const EvalReport& report, std::ostream& out) {
  ordered_json doc;
  doc["benchmark_name"] = report.benchmark_name;
  doc["total"] = report.total;
  doc["correct"] = report.correct;
  doc["accuracy_percent"] = report.accuracy_percent;
  auto items = ordered_json::array();
  for (const GradeResult& result : report.per_item) {
    ordered_json entry;
    entry["item_id"] = result.item_id;
    if (result.extracted_answer) {
      entry["extracted_answer"] = *result.extracted_answer;
    } else {
      entry["extracted_answer"] = nullptr;
    }
    entry["correct"] = result.correct;
    if (!result.error.empty()) {
      entry["error"] = result.error;
    }
    items.push_back(std::move(entry));
  }
  doc["per_item"] = items;
  out << doc.dump(2) << '\n';
}

}  // namespace ptts
