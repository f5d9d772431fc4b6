#include "ptts/principles.hpp"

#include <json.hpp>

#include <ostream>

namespace ptts {

namespace {

using OT = OperatorTag;

const char* const kRewardText = "I am going to tip $200,000 for a better solution!";

std::vector<PrincipleTemplate> build_registry() {
  std::vector<PrincipleTemplate> templates;
  templates.push_back({PrincipleId::Null, "", Placement::prefix, "",
                       PrincipleFamily::null, {}});
  templates.push_back({PrincipleId::Reward, kRewardText, Placement::prefix, "",
                       PrincipleFamily::core, {}});
  // The one dual-placement wrapper: opener before the question, demand after.
  templates.push_back({PrincipleId::Correctness,
                       "Your Task is to solve the following:", Placement::prefix,
                       "You must provide the correct answer!",
                       PrincipleFamily::core, {}});
  templates.push_back({PrincipleId::Penalty,
                       "You will be penalized if you provide the wrong answer.",
                       Placement::prefix, "", PrincipleFamily::core, {}});
  templates.push_back({PrincipleId::StepByStep, "Think step by step.",
                       Placement::prefix, "", PrincipleFamily::core, {}});
  templates.push_back({PrincipleId::R1, kRewardText, Placement::prefix, "",
                       PrincipleFamily::reward_variant, {OT::IDENTITY}});
  templates.push_back({PrincipleId::R2,
                       "I am going to tip you $200,000 if you provide the "
                       "correct answer!",
                       Placement::prefix, "", PrincipleFamily::reward_variant,
                       {OT::COND}});
  templates.push_back({PrincipleId::R3,
                       "I am going to tip you $200 if you provide a better "
                       "solution!",
                       Placement::prefix, "", PrincipleFamily::reward_variant,
                       {OT::LOW, OT::COND}});
  templates.push_back({PrincipleId::R4, kRewardText, Placement::suffix, "",
                       PrincipleFamily::reward_variant, {OT::SUFFIX}});
  templates.push_back({PrincipleId::R5,
                       "I am going to tip $200 for a better solution!",
                       Placement::prefix, "", PrincipleFamily::reward_variant,
                       {OT::LOW}});
  templates.push_back({PrincipleId::R6,
                       "I am going to tip you $500,000 for a better solution "
                       "and step-by-step reasoning!",
                       Placement::prefix, "", PrincipleFamily::reward_variant,
                       {OT::HIGH, OT::REASON}});
  return templates;
}

bool starts_with(std::string_view text, std::string_view prefix) {
  return text.size() >= prefix.size() && text.substr(0, prefix.size()) == prefix;
}

bool ends_with(std::string_view text, std::string_view suffix) {
  return text.size() >= suffix.size() &&
         text.substr(text.size() - suffix.size()) == suffix;
}

}  // namespace

std::string_view to_string(PrincipleId id) {
  switch (id) {
    case PrincipleId::Null: return "Null";
    case PrincipleId::Reward: return "Reward";
    case PrincipleId::Correctness: return "Correctness";
    case PrincipleId::Penalty: return "Penalty";
    case PrincipleId::StepByStep: return "StepByStep";
    case PrincipleId::R1: return "R1";
    case PrincipleId::R2: return "R2";
    case PrincipleId::R3: return "R3";
    case PrincipleId::R4: return "R4";
    case PrincipleId::R5: return "R5";
    case PrincipleId::R6: return "R6";
  }
  return "Null";
}

std::optional<PrincipleId> principle_id_from(std::string_view name) {
  for (const PrincipleTemplate& tmpl : registry()) {
    if (name == to_string(tmpl.principle_id)) return tmpl.principle_id;
  }
  return std::nullopt;
}

std::string_view to_string(Placement placement) {
  return placement == Placement::prefix ? "prefix" : "suffix";
}

std::string_view to_string(PrincipleFamily family) {
  switch (family) {
    case PrincipleFamily::null: return "null";
    case PrincipleFamily::core: return "core";
    case PrincipleFamily::reward_variant: return "reward_variant";
  }
  return "null";
}

std::string_view to_string(OperatorTag tag) {
  switch (tag) {
    case OT::IDENTITY: return "IDENTITY";
    case OT::COND: return "COND";
    case OT::LOW: return "LOW";
    case OT::HIGH: return "HIGH";
    case OT::SUFFIX: return "SUFFIX";
    case OT::REASON: return "REASON";
  }
  return "IDENTITY";
}

const std::vector<PrincipleTemplate>& registry() {
  static const std::vector<PrincipleTemplate> templates = build_registry();
  return templates;
}

const PrincipleTemplate& registry_template(PrincipleId id) {
  return registry()[static_cast<std::size_t>(id)];
}

std::string wrap(const PrincipleTemplate& tmpl, std::string_view question) {
  if (question.empty()) {
    throw Error(Errc::empty_question, "cannot wrap an empty question");
  }
  if (tmpl.template_text.empty()) {
    return std::string(question);  // null principle: identity
  }
  std::string text;
  if (tmpl.placement == Placement::prefix) {
    text.reserve(tmpl.template_text.size() + 1 + question.size() +
                 (tmpl.closing_text.empty() ? 0 : tmpl.closing_text.size() + 1));
    text.append(tmpl.template_text);
    text.push_back(kWrapSeparator);
    text.append(question);
    if (!tmpl.closing_text.empty()) {
      text.push_back(kWrapSeparator);
      text.append(tmpl.closing_text);
    }
  } else {
    text.reserve(question.size() + 1 + tmpl.template_text.size());
    text.append(question);
    text.push_back(kWrapSeparator);
    text.append(tmpl.template_text);
  }
  return text;
}

std::string unwrap(const PrincipleTemplate& tmpl, std::string_view wrapped) {
  if (tmpl.template_text.empty()) {
    return std::string(wrapped);
  }
  std::string_view rest = wrapped;
  if (tmpl.placement == Placement::prefix) {
    const std::string lead = tmpl.template_text + kWrapSeparator;
    if (!starts_with(rest, lead)) {
      throw Error(Errc::template_mismatch,
                  std::string(to_string(tmpl.principle_id)) +
                      ": expected wrapper text at prefix");
    }
    rest.remove_prefix(lead.size());
    if (!tmpl.closing_text.empty()) {
      const std::string tail = std::string(1, kWrapSeparator) + tmpl.closing_text;
      if (!ends_with(rest, tail)) {
        throw Error(Errc::template_mismatch,
                    std::string(to_string(tmpl.principle_id)) +
                        ": expected closing text at suffix");
      }
      rest.remove_suffix(tail.size());
    }
  } else {
    const std::string tail = std::string(1, kWrapSeparator) + tmpl.template_text;
    if (!ends_with(rest, tail)) {
      throw Error(Errc::template_mismatch,
                  std::string(to_string(tmpl.principle_id)) +
                      ": expected wrapper text at suffix");
    }
    rest.remove_suffix(tail.size());
  }
  return std::string(rest);
}

std::vector<OperatorTag> lineage(PrincipleId id) {
  const PrincipleTemplate& tmpl = registry_template(id);
  if (tmpl.family != PrincipleFamily::reward_variant) {
    throw Error(Errc::not_a_reward_variant,
                std::string(to_string(id)) + " has no operator lineage");
  }
  return tmpl.lineage;
}

void export_templates(std::ostream& out) {
  for (const PrincipleTemplate& tmpl : registry()) {
    nlohmann::ordered_json record;
    record["principle_id"] = std::string(to_string(tmpl.principle_id));
    record["family"] = std::string(to_string(tmpl.family));
    record["placement"] = std::string(to_string(tmpl.placement));
    record["template_text"] = tmpl.template_text;
    record["closing_text"] = tmpl.closing_text;
    auto tags = nlohmann::ordered_json::array();
    for (OperatorTag tag : tmpl.lineage) {
      tags.push_back(std::string(to_string(tag)));
    }
    record["lineage"] = tags;
    out << record.dump() << '\n';
  }
}

}  // namespace ptts
