#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coevo/history.hpp"
#include "coevo/metamodel.hpp"
#include "coevo/model.hpp"

/// The statemachine extraction case: a reduced program syntax metamodel
/// ("java"), a statemachine metamodel ("sm"), the custom migrations that
/// extract one from the other, and a seeded fixture generator.
namespace coevo::reeng {

[[nodiscard]] const std::string& java_metamodel_text();
[[nodiscard]] const std::string& sm_metamodel_text();
/// java + sm, shared and immutable.
[[nodiscard]] std::shared_ptr<const MetamodelSet> case_metamodels();

/// ExtractStates, ExtractTransitions, ExtractTriggers, ExtractActions,
/// PrintTime.
[[nodiscard]] const MigrationRegistry& case_registry();

/// createReference State.class, ExtractStates, createReference
/// Transition.reference, ExtractTransitions, ExtractTriggers,
/// ExtractActions, PrintTime, deleteFeature x2; then released.
[[nodiscard]] History build_case_history();

struct CaseResult {
    /// Only the "statemachine" resource, bound to case_metamodels().
    Model statemachine;
    std::vector<std::string> report;
};

/// Migrates a program model through build_case_history().
[[nodiscard]] CaseResult run_case(const Model& program);

/// Top-down construction of program models.
class JavaBuilder {
public:
    struct Block {
        ElementId owner;
        FeatureId feature;
    };

    explicit JavaBuilder(std::shared_ptr<const MetamodelSet> metamodels = case_metamodels(),
                         const std::string& uri = "program");

    [[nodiscard]] Model& model() { return model_; }
    [[nodiscard]] ElementId root() const { return root_; }

    ElementId add_class(const std::string& name, bool is_abstract = false);
    void set_super(ElementId cls, ElementId super);
    ElementId add_method(ElementId cls, const std::string& name);

    [[nodiscard]] Block body(ElementId method) const { return {method, method_statements_}; }
    [[nodiscard]] Block then_of(ElementId if_stmt) const { return {if_stmt, if_then_}; }
    [[nodiscard]] Block else_of(ElementId if_stmt) const { return {if_stmt, if_else_}; }

    /// `name(...);` as an expression statement; returns the call.
    ElementId call_statement(Block block, const std::string& name);
    /// `if (equals("literal")) {}`, or `if (check()) {}` without a literal.
    ElementId if_statement(Block block, const std::optional<std::string>& equals_literal);
    [[nodiscard]] ElementId condition(ElementId if_stmt) const;

    ElementId call_argument(ElementId call, const std::string& name);
    ElementId string_argument(ElementId call, const std::string& value);
    ElementId reference_argument(ElementId call, ElementId cls);

private:
    Model model_;
    ElementId root_;
    ClassifierId class_, method_, expr_stmt_, if_, call_, ref_, literal_;
    FeatureId classes_, class_name_, class_abstract_, super_, methods_, method_name_, method_statements_;
    FeatureId expression_, condition_, if_then_, if_else_, method_name_attr_, arguments_, ref_target_, literal_value_;
};

/// Deterministic program model: abstract class State, `states` concrete
/// subclasses (Idle, Active..., Done) where state i activates states
/// i+1..i+transitions_per_state, each guarded by `equals(trigger)` with a
/// `send(action)`, plus `pad_classes` unrelated classes placed at seeded
/// positions.
[[nodiscard]] Model gen_fixture(std::size_t states, std::size_t transitions_per_state, std::size_t pad_classes,
                                std::uint64_t seed);

/// Names used by gen_fixture.
[[nodiscard]] std::vector<std::string> state_names(std::size_t states);

}  // namespace coevo::reeng
