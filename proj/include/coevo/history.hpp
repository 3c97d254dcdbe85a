#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "coevo/catalog.hpp"
#include "coevo/metamodel.hpp"
#include "coevo/model.hpp"
#include "coevo/transaction.hpp"

namespace coevo {

/// One invertible metamodel edit.
///
/// `target` is the package FQN (create-classifier), the owning class FQN
/// (create-feature) or the FQN of the edited element (everything else).
/// `before`/`after` hold the classifier or feature document for
/// create/delete, and the property value for set-property.
struct PrimitiveChange {
    enum class Kind { CreateClassifier, DeleteClassifier, CreateFeature, DeleteFeature, SetProperty };

    Kind kind{Kind::CreateClassifier};
    std::string target;
    std::string property;  // name | abstract | lower | upper | target
    json before;
    json after;

    static PrimitiveChange create_classifier(std::string package, json classifier);
    static PrimitiveChange delete_classifier(std::string classifier);
    static PrimitiveChange create_feature(std::string owner, json feature);
    static PrimitiveChange delete_feature(std::string feature);
    static PrimitiveChange set_property(std::string element, std::string property, json value);

    [[nodiscard]] PrimitiveChange inverse() const;
    [[nodiscard]] json to_json() const;
    static PrimitiveChange from_json(const json& document);

    friend bool operator==(const PrimitiveChange&, const PrimitiveChange&) = default;
};

[[nodiscard]] std::string_view to_string(PrimitiveChange::Kind kind);

/// Applies the change. A missing old value is filled in from the current
/// metamodel; a stale one is rejected. Throws HistoryError.
void apply_primitive(MetamodelSet& metamodels, PrimitiveChange& change);

struct OperationRecord {
    std::string name;
    Bindings bindings;

    friend bool operator==(const OperationRecord&, const OperationRecord&) = default;
};

struct CustomRecord {
    std::vector<PrimitiveChange> primitives;
    std::optional<std::string> migration;

    friend bool operator==(const CustomRecord&, const CustomRecord&) = default;
};

struct ChangeRecord {
    std::variant<OperationRecord, CustomRecord> body;

    [[nodiscard]] bool is_operation() const { return std::holds_alternative<OperationRecord>(body); }
    [[nodiscard]] const OperationRecord& operation() const { return std::get<OperationRecord>(body); }
    [[nodiscard]] const CustomRecord& custom() const { return std::get<CustomRecord>(body); }
    /// Short text for history views: `rename(element=a.b.C, newName=D)` or
    /// `custom[2 changes] -> ExtractStates`.
    [[nodiscard]] std::string label() const;

    [[nodiscard]] json to_json() const;
    static ChangeRecord from_json(const json& document);

    friend bool operator==(const ChangeRecord&, const ChangeRecord&) = default;
};

/// Append-only list of releases; the last release is the open one.
class History {
public:
    using Release = std::vector<ChangeRecord>;

    /// Snapshots the given metamodels. Throws HistoryError when empty.
    static History create(const MetamodelSet& metamodels);

    [[nodiscard]] const std::vector<std::string>& metamodel_names() const { return names_; }
    [[nodiscard]] const std::map<std::string, json>& initial_snapshots() const { return snapshots_; }
    [[nodiscard]] MetamodelSet initial_metamodels() const;

    /// All releases including the trailing open one.
    [[nodiscard]] std::span<const Release> releases() const { return releases_; }
    [[nodiscard]] std::size_t sealed_count() const { return releases_.size() - 1; }
    [[nodiscard]] const Release& open_release() const { return releases_.back(); }
    [[nodiscard]] std::size_t record_count() const;

    void append(ChangeRecord record);
    /// Seals the open release. Throws HistoryError when it is empty and
    /// `force` is not set.
    void release(bool force = false);

    [[nodiscard]] json to_json() const;
    [[nodiscard]] std::string dump() const;
    static History from_json(const json& document);
    static History parse(const std::string& text);

    friend bool operator==(const History&, const History&) = default;

private:
    std::vector<std::string> names_;
    std::map<std::string, json> snapshots_;
    std::vector<Release> releases_{Release{}};
};

struct StepTiming {
    std::string step;
    double millis{0};
};

/// Output channel shared by the migrations of one run.
struct MigrationReport {
    std::vector<StepTiming> steps;
    std::vector<std::string> lines;
    std::chrono::steady_clock::time_point started{std::chrono::steady_clock::now()};

    [[nodiscard]] double elapsed_millis() const;
};

/// What a custom migration sees: one model bound to the adapted metamodel.
class MigrationContext {
public:
    MigrationContext(Model& model, std::size_t model_index, MigrationReport& report)
        : model_(model), index_(model_index), report_(report) {}

    [[nodiscard]] Model& model() { return model_; }
    [[nodiscard]] const MetamodelSet& metamodels() const { return model_.metamodels(); }
    [[nodiscard]] std::size_t model_index() const { return index_; }
    [[nodiscard]] ClassifierId resolve_class(std::string_view fqn) const { return metamodels().resolve_class(fqn); }
    [[nodiscard]] FeatureId resolve_feature(std::string_view fqn) const { return metamodels().resolve_feature(fqn); }

    void report(std::string line) { report_.lines.push_back(std::move(line)); }
    [[nodiscard]] const MigrationReport& run() const { return report_; }

private:
    Model& model_;
    std::size_t index_;
    MigrationReport& report_;
};

using Migration = std::function<void(MigrationContext&)>;

class MigrationRegistry {
public:
    /// Throws Error when the id is taken.
    void add(std::string id, Migration migration);
    [[nodiscard]] const Migration* find(std::string_view id) const;
    [[nodiscard]] bool contains(std::string_view id) const { return find(id) != nullptr; }
    [[nodiscard]] std::vector<std::string> ids() const;

private:
    std::map<std::string, Migration, std::less<>> entries_;
};

/// Runs one record as a single transaction over the workspace. Custom
/// migrations run once per model and are timed into `report`.
void execute_record(Workspace& workspace, const ChangeRecord& record, const OperationCatalog& catalog,
                    const MigrationRegistry& registry, MigrationReport& report);

/// The metamodels as of the start of release `release_index` (the open
/// release counts; pass releases().size() for the current state).
[[nodiscard]] MetamodelSet reconstruct_metamodels(const History& history, std::size_t release_index,
                                                  const OperationCatalog& catalog = OperationCatalog::standard());

struct MigrationResult {
    std::shared_ptr<const MetamodelSet> metamodels;
    std::vector<Model> models;
    MigrationReport report;
};

/// Replays the records of releases [from, to) over copies of the models.
/// `to` defaults to every release including the open one. The inputs are
/// never modified; a failing record aborts the whole run.
[[nodiscard]] MigrationResult migrate(std::span<const Model> models, const History& history,
                                      const MigrationRegistry& registry, std::size_t from = 0,
                                      std::optional<std::size_t> to = std::nullopt,
                                      const OperationCatalog& catalog = OperationCatalog::standard());

/// Records edits into a history while keeping a workspace current.
class Recorder {
public:
    explicit Recorder(const MetamodelSet& metamodels, const MigrationRegistry* registry = nullptr,
                      const OperationCatalog& catalog = OperationCatalog::standard());
    /// Continues an existing history; the current metamodels are rebuilt by
    /// replay.
    explicit Recorder(History history, const MigrationRegistry* registry = nullptr,
                      const OperationCatalog& catalog = OperationCatalog::standard());

    [[nodiscard]] const History& history() const { return history_; }
    [[nodiscard]] const MetamodelSet& metamodels() const { return *workspace_.metamodels; }
    [[nodiscard]] const Workspace& workspace() const { return workspace_; }
    [[nodiscard]] const OperationCatalog& catalog() const { return *catalog_; }
    [[nodiscard]] std::span<const Model> models() const { return workspace_.models; }

    /// Attaches a model (rebinding it by name). It must conform.
    const Model& attach(const Model& model);
    void detach_all() { workspace_.models.clear(); }

    const ChangeRecord& apply_operation(std::string_view name, const Bindings& bindings);
    /// Applies the primitives and, when models are attached, the named
    /// migration, as one transaction.
    const ChangeRecord& record_custom(std::vector<PrimitiveChange> primitives,
                                      std::optional<std::string> migration = std::nullopt);
    void release(bool force = false) { history_.release(force); }

    /// Report of the most recent record's migrations.
    [[nodiscard]] const MigrationReport& last_report() const { return report_; }

private:
    const ChangeRecord& commit(ChangeRecord record);

    History history_;
    Workspace workspace_;
    const MigrationRegistry* registry_;
    const OperationCatalog* catalog_;
    MigrationReport report_;
};

}  // namespace coevo
