#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "coevo/metamodel.hpp"
#include "coevo/model.hpp"
#include "coevo/transaction.hpp"

namespace coevo {

enum class ParamType { ClassRef, FeatureRef, EnumRef, ElementRef, String, Boolean, Integer };

[[nodiscard]] std::string_view to_string(ParamType type);

struct Parameter {
    std::string name;
    ParamType type;
    bool required{true};
    std::string description;
};

/// Raw binding as written in a history record: FQNs are strings.
using BindingValue = std::variant<std::string, bool, std::int64_t>;
using Bindings = std::map<std::string, BindingValue>;

[[nodiscard]] json bindings_to_json(const Bindings& bindings);
[[nodiscard]] Bindings bindings_from_json(const json& document);
/// `name=value` for the command line; `true`/`false` and integers are
/// converted only when the parameter type asks for them.
[[nodiscard]] std::string binding_text(const BindingValue& value);

/// Bindings after resolution against a metamodel set.
class ResolvedBindings {
public:
    using Value = std::variant<ClassifierId, FeatureId, std::string, bool, std::int64_t>;

    [[nodiscard]] bool has(std::string_view name) const;
    [[nodiscard]] const Value& at(std::string_view name) const;
    [[nodiscard]] ClassifierId classifier(std::string_view name) const;
    [[nodiscard]] FeatureId feature(std::string_view name) const;
    [[nodiscard]] const std::string& string(std::string_view name) const;
    [[nodiscard]] bool boolean(std::string_view name) const;
    [[nodiscard]] std::int64_t integer(std::string_view name) const;
    /// Unset optional parameters fall back to `fallback`.
    [[nodiscard]] bool boolean_or(std::string_view name, bool fallback) const;
    [[nodiscard]] std::int64_t integer_or(std::string_view name, std::int64_t fallback) const;

    void set(std::string name, Value value);

private:
    std::map<std::string, Value, std::less<>> values_;
};

struct OperationContext {
    const MetamodelSet& metamodels;
    std::span<const Model> models;
    const ResolvedBindings& bindings;
};

struct Constraint {
    std::string id;
    std::string message;
    /// Evaluated only once all of these are bound.
    std::vector<std::string> params;
    std::function<bool(const OperationContext&)> holds;
};

struct ConstraintFailure {
    std::string id;
    std::string message;

    [[nodiscard]] std::string text() const { return "[" + id + "] " + message; }
};

struct OperationDescriptor {
    std::string name;
    std::string label;
    std::vector<Parameter> parameters;
    std::vector<Constraint> constraints;

    [[nodiscard]] const Parameter* parameter(std::string_view name) const;
    [[nodiscard]] json to_json() const;
};

/// A reusable coupled operation: signature, constraints, and a body that
/// adapts the metamodel and migrates the models in one go.
struct CoupledOperation {
    OperationDescriptor descriptor;
    /// Fills optional parameters whose default depends on other bindings.
    std::function<void(const MetamodelSet&, ResolvedBindings&)> complete;
    std::function<void(Workspace&, const ResolvedBindings&)> execute;

    [[nodiscard]] const std::string& name() const { return descriptor.name; }
};

class OperationCatalog {
public:
    /// The built-in operations: rename, createClass, createAttribute,
    /// createReference, deleteFeature, enumToSubclasses, subclassesToEnum.
    static const OperationCatalog& standard();

    void add(CoupledOperation operation);
    [[nodiscard]] const CoupledOperation* find(std::string_view name) const;
    /// Throws BindingError for unknown names.
    [[nodiscard]] const CoupledOperation& at(std::string_view name) const;
    [[nodiscard]] std::span<const CoupledOperation> operations() const { return operations_; }
    [[nodiscard]] json to_json() const;

private:
    std::vector<CoupledOperation> operations_;
};

/// Type-checks and resolves raw bindings. With `partial`, missing required
/// parameters are allowed and defaults are still filled where possible.
[[nodiscard]] ResolvedBindings resolve_bindings(const CoupledOperation& op, const MetamodelSet& metamodels,
                                                const Bindings& bindings, bool partial = false);

/// Constraints whose parameters are all bound and that do not hold.
[[nodiscard]] std::vector<ConstraintFailure> check_constraints(const CoupledOperation& op,
                                                               const MetamodelSet& metamodels,
                                                               std::span<const Model> models,
                                                               const ResolvedBindings& bindings);

/// Resolves bindings, checks constraints (ConstraintError lists every
/// failure) and runs the operation as one transaction.
void apply_operation(Workspace& workspace, const CoupledOperation& op, const Bindings& bindings);

/// One entry of list_operations.
struct OperationOffer {
    const CoupledOperation* operation;
    Bindings prefilled;
    bool applicable;
    std::vector<std::string> messages;
};

/// Every catalog operation with bindings prefilled from the selection: the
/// first selected FQN goes to the first parameter of a compatible type, the
/// next one to the next compatible parameter, and so on.
[[nodiscard]] std::vector<OperationOffer> offer_operations(const OperationCatalog& catalog,
                                                           const MetamodelSet& metamodels,
                                                           std::span<const Model> models,
                                                           std::span<const std::string> selection);

}  // namespace coevo
