#pragma once

#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coevo/model.hpp"

namespace coevo {

enum class Rule {
    UnknownClass,
    AbstractInstantiation,
    MissingSlotType,
    MultiplicityLower,
    MultiplicityUpper,
    DanglingReference,
    ContainmentViolation,
};

[[nodiscard]] std::string_view to_string(Rule rule);

struct ConformanceViolation {
    std::string element;  // element id
    std::optional<std::string> feature;  // fully qualified feature name
    Rule rule{Rule::UnknownClass};
    std::string message;
};

/// A set of rules, used to suspend checks inside transactions.
class RuleSet {
public:
    RuleSet() = default;
    RuleSet(std::initializer_list<Rule> rules) {
        for (auto r : rules) insert(r);
    }
    void insert(Rule rule) { bits_ |= 1U << static_cast<unsigned>(rule); }
    [[nodiscard]] bool contains(Rule rule) const { return (bits_ & (1U << static_cast<unsigned>(rule))) != 0; }
    [[nodiscard]] bool empty() const { return bits_ == 0; }

private:
    unsigned bits_{0};
};

/// Rules suspended between the boundaries of a coupled operation. Slot
/// type-correctness is never suspended.
[[nodiscard]] RuleSet softened_rules();

/// Violations in document order; empty iff the model conforms. Rules in
/// `suppressed` are not reported.
[[nodiscard]] std::vector<ConformanceViolation> check_conformance(const Model& model, RuleSet suppressed = {});

[[nodiscard]] std::string format_violation(const ConformanceViolation& violation);
[[nodiscard]] json violation_to_json(const ConformanceViolation& violation);

}  // namespace coevo
