#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ptts/errors.hpp"

namespace ptts {

enum class PrincipleId {
  Null,
  Reward,
  Correctness,
  Penalty,
  StepByStep,
  R1,
  R2,
  R3,
  R4,
  R5,
  R6,
};

enum class Placement { prefix, suffix };

enum class PrincipleFamily { null, core, reward_variant };

// How a reward variant was derived from the R1 baseline.
enum class OperatorTag { IDENTITY, COND, LOW, HIGH, SUFFIX, REASON };

std::string_view to_string(PrincipleId id);
std::optional<PrincipleId> principle_id_from(std::string_view name);
std::string_view to_string(Placement placement);
std::string_view to_string(PrincipleFamily family);
std::string_view to_string(OperatorTag tag);

// An instructional wrapper. Correctness is the one dual-placement template:
// template_text goes before the question and closing_text after it; every
// other template uses template_text alone at its declared placement.
struct PrincipleTemplate {
  PrincipleId principle_id = PrincipleId::Null;
  std::string template_text;  // empty for Null
  Placement placement = Placement::prefix;
  std::string closing_text;  // non-empty only for Correctness
  PrincipleFamily family = PrincipleFamily::null;
  std::vector<OperatorTag> lineage;  // derivation chain; reward variants only

  bool dual_placement() const { return !closing_text.empty(); }
};

struct WrappedPrompt {
  std::string seed_id;
  PrincipleId principle_id = PrincipleId::Null;
  std::string text;
};

// Exactly one ASCII space between wrapper text and question, both placements.
inline constexpr char kWrapSeparator = ' ';

// The 11 built-in templates in pinned order:
// Null, Reward, Correctness, Penalty, StepByStep, R1..R6.
const std::vector<PrincipleTemplate>& registry();
const PrincipleTemplate& registry_template(PrincipleId id);

// Deterministic composition; the question stays a byte-identical substring.
// Throws empty_question.
std::string wrap(const PrincipleTemplate& tmpl, std::string_view question);

// Inverse of wrap for the same template; throws template_mismatch when the
// expected wrapper text is absent at the declared placement.
std::string unwrap(const PrincipleTemplate& tmpl, std::string_view wrapped);

// Operator chain for a reward variant; throws not_a_reward_variant otherwise.
std::vector<OperatorTag> lineage(PrincipleId id);

// Dumps the registry as line-delimited JSON so wrapper bytes can be audited.
void export_templates(std::ostream& out);

}  // namespace ptts
