#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "coevo/ids.hpp"

namespace coevo {

using json = nlohmann::json;

enum class ClassifierKind { Class, Enumeration };
enum class FeatureKind { Attribute, Reference };
enum class ValueType { String, Boolean, Integer, Enumeration };

struct PackageRef {
    std::uint32_t metamodel{0};
    std::uint32_t package{0};

    friend bool operator==(PackageRef, PackageRef) = default;
};

struct Classifier {
    std::string name;
    ClassifierKind kind{ClassifierKind::Class};
    PackageRef package;
    bool abstract{false};
    std::vector<ClassifierId> super_types;
    std::vector<FeatureId> features;  // own features, declaration order
    std::vector<std::string> literals;  // enumerations only

    [[nodiscard]] bool is_class() const { return kind == ClassifierKind::Class; }
    [[nodiscard]] bool is_enum() const { return kind == ClassifierKind::Enumeration; }
};

struct Feature {
    std::string name;
    FeatureKind kind{FeatureKind::Attribute};
    ClassifierId owner;
    // attributes
    ValueType value_type{ValueType::String};
    ClassifierId enum_type;
    // references
    ClassifierId target;
    bool containment{false};

    std::int64_t lower{0};
    std::int64_t upper{1};  // kUnbounded for "*"

    [[nodiscard]] bool is_attribute() const { return kind == FeatureKind::Attribute; }
    [[nodiscard]] bool is_reference() const { return kind == FeatureKind::Reference; }
    [[nodiscard]] bool is_containment() const { return is_reference() && containment; }
    [[nodiscard]] bool many() const { return upper == kUnbounded || upper > 1; }
};

struct Package {
    std::string name;
    std::vector<ClassifierId> classifiers;
};

struct Metamodel {
    std::string name;
    std::vector<Package> packages;
};

/// Result of resolving a fully qualified name.
using MetamodelElement = std::variant<ClassifierId, FeatureId>;

/// A set of metamodels that may reference each other. Owns all
/// classifiers and features; handles stay valid across renames and are
/// tombstoned (never reused) on deletion.
///
/// Every mutation keeps the invariants: unique fully qualified names,
/// acyclic supertypes, resolvable targets, lower <= upper, and feature
/// names unique among own and inherited features.
class MetamodelSet {
public:
    MetamodelSet() = default;

    /// Builds a set from metamodel documents; references may cross
    /// documents. Throws InvariantError or ResolveError.
    static MetamodelSet from_json(std::span<const json> documents);
    /// Parses metamodel texts. Throws ParseError with line/column.
    static MetamodelSet parse(std::span<const std::string> texts);

    [[nodiscard]] std::vector<json> to_json() const;
    [[nodiscard]] json to_json(std::string_view metamodel_name) const;
    /// Byte-deterministic text of one metamodel document.
    [[nodiscard]] std::string dump(std::string_view metamodel_name) const;

    // -- structure ---------------------------------------------------------

    [[nodiscard]] std::span<const Metamodel> metamodels() const { return metamodels_; }
    [[nodiscard]] std::vector<std::string> metamodel_names() const;

    [[nodiscard]] bool alive(ClassifierId id) const;
    [[nodiscard]] bool alive(FeatureId id) const;
    [[nodiscard]] const Classifier& classifier(ClassifierId id) const;
    [[nodiscard]] const Feature& feature(FeatureId id) const;

    /// Live classifiers in declaration order (metamodel, package, classifier).
    [[nodiscard]] std::vector<ClassifierId> classifiers() const;
    [[nodiscard]] std::size_t class_count() const;
    [[nodiscard]] std::size_t feature_count() const;

    [[nodiscard]] std::string fqn(ClassifierId id) const;
    [[nodiscard]] std::string fqn(FeatureId id) const;
    [[nodiscard]] std::string fqn(PackageRef package) const;

    [[nodiscard]] MetamodelElement resolve(std::string_view fqn) const;
    [[nodiscard]] ClassifierId resolve_classifier(std::string_view fqn) const;
    [[nodiscard]] ClassifierId resolve_class(std::string_view fqn) const;
    [[nodiscard]] FeatureId resolve_feature(std::string_view fqn) const;
    [[nodiscard]] PackageRef resolve_package(std::string_view fqn) const;
    [[nodiscard]] std::optional<ClassifierId> find_classifier(std::string_view fqn) const;
    [[nodiscard]] std::optional<FeatureId> find_feature(std::string_view fqn) const;

    /// Own and inherited features; supertypes first, in declaration order.
    [[nodiscard]] std::span<const FeatureId> all_features(ClassifierId cls) const;
    [[nodiscard]] bool has_feature(ClassifierId cls, FeatureId feature) const;
    [[nodiscard]] std::optional<FeatureId> feature_named(ClassifierId cls, std::string_view name) const;
    /// Reflexive, transitive.
    [[nodiscard]] bool is_subtype(ClassifierId sub, ClassifierId super) const;
    [[nodiscard]] std::vector<ClassifierId> direct_subtypes(ClassifierId cls) const;
    [[nodiscard]] std::vector<ClassifierId> all_subtypes(ClassifierId cls) const;

    // -- mutation ----------------------------------------------------------

    std::uint32_t add_metamodel(std::string name);
    PackageRef add_package(std::uint32_t metamodel, std::string name);

    ClassifierId add_class(PackageRef package, std::string name, bool abstract,
                           std::vector<ClassifierId> super_types = {});
    ClassifierId add_enum(PackageRef package, std::string name, std::vector<std::string> literals);
    FeatureId add_attribute(ClassifierId owner, std::string name, ValueType type, ClassifierId enum_type,
                            std::int64_t lower, std::int64_t upper);
    FeatureId add_reference(ClassifierId owner, std::string name, ClassifierId target, bool containment,
                            std::int64_t lower, std::int64_t upper);

    /// Creates a classifier from its document form (`kind`, `name`,
    /// `abstract`, `super`, `literals`); features are not allowed here.
    ClassifierId add_classifier(PackageRef package, const json& document);
    /// Creates a feature from its document form.
    FeatureId add_feature(ClassifierId owner, const json& document);
    [[nodiscard]] json classifier_to_json(ClassifierId id, bool with_features = true) const;
    [[nodiscard]] json feature_to_json(FeatureId id) const;

    /// Only classifiers without own features, subtypes, or referring
    /// features can be removed.
    void remove_classifier(ClassifierId id);
    void remove_feature(FeatureId id);

    void rename(ClassifierId id, std::string name);
    void rename(FeatureId id, std::string name);
    void set_abstract(ClassifierId id, bool abstract);
    void set_lower(FeatureId id, std::int64_t lower);
    void set_upper(FeatureId id, std::int64_t upper);
    void set_target(FeatureId id, ClassifierId target);

    /// Full invariant check; throws InvariantError naming the offending FQN.
    void validate() const;

    [[nodiscard]] bool operator==(const MetamodelSet& other) const;

    /// Changes on every mutation; equal generations imply equal content.
    [[nodiscard]] std::uint64_t generation() const { return generation_; }

private:
    struct ClassCache {
        std::vector<FeatureId> all_features;
        std::vector<ClassifierId> ancestors;  // sorted, includes self
    };

    Classifier& mutable_classifier(ClassifierId id);
    Feature& mutable_feature(FeatureId id);
    void check_classifier_name_free(PackageRef package, std::string_view name,
                                    std::optional<ClassifierId> except = std::nullopt) const;
    void check_feature_name_free(ClassifierId owner, std::string_view name,
                                 std::optional<FeatureId> except = std::nullopt) const;
    static void check_bounds(std::string_view what, std::int64_t lower, std::int64_t upper);
    void rebuild_caches();

    std::vector<Metamodel> metamodels_;
    std::vector<std::optional<Classifier>> classifiers_;
    std::vector<std::optional<Feature>> features_;

    std::vector<ClassCache> cache_;  // indexed by classifier id
    std::unordered_map<std::string, ClassifierId> classifier_index_;
    std::unordered_map<std::string, FeatureId> feature_index_;
    std::uint64_t generation_{0};
};

[[nodiscard]] std::string_view to_string(ValueType type);
/// A letter or underscore followed by letters, digits or underscores.
[[nodiscard]] bool is_identifier(std::string_view name);
/// Reads a metamodel document text into a set of its own. Cross-metamodel
/// references must resolve inside that one document.
[[nodiscard]] MetamodelSet load_metamodel(const std::string& text);

/// Parses JSON and turns syntax errors into ParseError with line/column.
[[nodiscard]] json parse_json(const std::string& text);
/// Sorted-key, two-space-indented output with a trailing newline.
[[nodiscard]] std::string dump_json(const json& value);

}  // namespace coevo
