#include "ptts/errors.hpp"

namespace ptts {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::malformed_record: return "malformed_record";
    case Errc::duplicate_seed_id: return "duplicate_seed_id";
    case Errc::answer_out_of_range: return "answer_out_of_range";
    case Errc::empty_question: return "empty_question";
    case Errc::template_mismatch: return "template_mismatch";
    case Errc::not_a_reward_variant: return "not_a_reward_variant";
    case Errc::no_such_variant: return "no_such_variant";
    case Errc::auth_error: return "auth_error";
    case Errc::rate_limited: return "rate_limited";
    case Errc::provider_error: return "provider_error";
    case Errc::trace_parse_error: return "trace_parse_error";
    case Errc::dimension_mismatch: return "dimension_mismatch";
    case Errc::empty_set: return "empty_set";
    case Errc::missing_counterpart: return "missing_counterpart";
    case Errc::empty_list: return "empty_list";
    case Errc::unnormalizable_candidate: return "unnormalizable_candidate";
    case Errc::empty_results: return "empty_results";
    case Errc::empty_assistant_content: return "empty_assistant_content";
    case Errc::empty_seed_set: return "empty_seed_set";
    case Errc::build_incomplete: return "build_incomplete";
    case Errc::config_error: return "config_error";
    case Errc::unknown_subcommand: return "unknown_subcommand";
    case Errc::io_error: return "io_error";
  }
  return "unknown_error";
}

}  // namespace ptts
