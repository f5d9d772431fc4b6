#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ptts {

// Every failure the toolkit can report. The enum name is the stable,
// machine-parsable token printed by the CLI ("duplicate_seed_id: ...").
enum class Errc {
  malformed_record,
  duplicate_seed_id,
  answer_out_of_range,
  empty_question,
  template_mismatch,
  not_a_reward_variant,
  no_such_variant,
  auth_error,
  rate_limited,
  provider_error,
  trace_parse_error,
  dimension_mismatch,
  empty_set,
  missing_counterpart,
  empty_list,
  unnormalizable_candidate,
  empty_results,
  empty_assistant_content,
  empty_seed_set,
  build_incomplete,
  config_error,
  unknown_subcommand,
  io_error,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Error(Errc code, const std::string& message, bool retryable)
      : std::runtime_error(message), code_(code), retryable_(retryable) {}

  Errc code() const { return code_; }

  // True for transient provider failures (timeout, 429, 5xx).
  bool retryable() const { return retryable_; }

  // "<code>: <message>" — the single-line form used by the CLI.
  std::string formatted() const {
    return std::string(errc_name(code_)) + ": " + what();
  }

 private:
  Errc code_;
  bool retryable_ = false;
};

}  // namespace ptts
