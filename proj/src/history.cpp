#include "coevo/history.hpp"

#include "coevo/error.hpp"
#include "json_util.hpp"

namespace coevo {

// -- primitive changes --------------------------------------------------------

namespace {

std::string parent_of(const std::string& fqn) {
    auto dot = fqn.rfind('.');
    if (dot == std::string::npos) throw HistoryError("'" + fqn + "' is not a qualified name");
    return fqn.substr(0, dot);
}

std::string name_in(const json& doc, const std::string& where) {
    if (!doc.is_object() || !doc.contains("name") || !doc["name"].is_string()) {
        throw HistoryError(where + ": document has no name");
    }
    return doc["name"].get<std::string>();
}

const json& need(const json& value, const std::string& what) {
    if (value.is_null()) throw HistoryError(what + " needs its old value to be inverted");
    return value;
}

json upper_json(std::int64_t upper) { return upper == kUnbounded ? json("*") : json(upper); }

}  // namespace

std::string_view to_string(PrimitiveChange::Kind kind) {
    switch (kind) {
        case PrimitiveChange::Kind::CreateClassifier: return "create-classifier";
        case PrimitiveChange::Kind::DeleteClassifier: return "delete-classifier";
        case PrimitiveChange::Kind::CreateFeature: return "create-feature";
        case PrimitiveChange::Kind::DeleteFeature: return "delete-feature";
        case PrimitiveChange::Kind::SetProperty: return "set-property";
    }
    return "?";
}

PrimitiveChange PrimitiveChange::create_classifier(std::string package, json classifier) {
    return {Kind::CreateClassifier, std::move(package), {}, nullptr, std::move(classifier)};
}
PrimitiveChange PrimitiveChange::delete_classifier(std::string classifier) {
    return {Kind::DeleteClassifier, std::move(classifier), {}, nullptr, nullptr};
}
PrimitiveChange PrimitiveChange::create_feature(std::string owner, json feature) {
    return {Kind::CreateFeature, std::move(owner), {}, nullptr, std::move(feature)};
}
PrimitiveChange PrimitiveChange::delete_feature(std::string feature) {
    return {Kind::DeleteFeature, std::move(feature), {}, nullptr, nullptr};
}
PrimitiveChange PrimitiveChange::set_property(std::string element, std::string property, json value) {
    return {Kind::SetProperty, std::move(element), std::move(property), nullptr, std::move(value)};
}

PrimitiveChange PrimitiveChange::inverse() const {
    const auto what = std::string(to_string(kind)) + " '" + target + "'";
    switch (kind) {
        case Kind::CreateClassifier:
            return {Kind::DeleteClassifier, target + "." + name_in(after, what), {}, after, nullptr};
        case Kind::DeleteClassifier: return {Kind::CreateClassifier, parent_of(target), {}, nullptr, need(before, what)};
        case Kind::CreateFeature: return {Kind::DeleteFeature, target + "." + name_in(after, what), {}, after, nullptr};
        case Kind::DeleteFeature: return {Kind::CreateFeature, parent_of(target), {}, nullptr, need(before, what)};
        case Kind::SetProperty: {
            auto element = target;
            if (property == "name") element = parent_of(target) + "." + after.get<std::string>();
            return {Kind::SetProperty, element, property, after, need(before, what)};
        }
    }
    throw HistoryError("unknown primitive kind");
}

json PrimitiveChange::to_json() const {
    json out = {{"kind", to_string(kind)}};
    switch (kind) {
        case Kind::CreateClassifier:
            out["package"] = target;
            out["classifier"] = after;
            break;
        case Kind::DeleteClassifier:
            out["classifier"] = target;
            out["old"] = before;
            break;
        case Kind::CreateFeature:
            out["class"] = target;
            out["feature"] = after;
            break;
        case Kind::DeleteFeature:
            out["feature"] = target;
            out["old"] = before;
            break;
        case Kind::SetProperty:
            out["element"] = target;
            out["property"] = property;
            out["old"] = before;
            out["new"] = after;
            break;
    }
    return out;
}

PrimitiveChange PrimitiveChange::from_json(const json& doc) {
    const std::string where = "primitive";
    auto kind = jsonutil::get_string(doc, "kind", where);
    auto old_value = doc.contains("old") ? doc["old"] : json(nullptr);
    if (kind == "create-classifier") {
        return {Kind::CreateClassifier, jsonutil::get_string(doc, "package", where), {}, nullptr,
                jsonutil::get(doc, "classifier", where)};
    }
    if (kind == "delete-classifier") {
        return {Kind::DeleteClassifier, jsonutil::get_string(doc, "classifier", where), {}, old_value, nullptr};
    }
    if (kind == "create-feature") {
        return {Kind::CreateFeature, jsonutil::get_string(doc, "class", where), {}, nullptr,
                jsonutil::get(doc, "feature", where)};
    }
    if (kind == "delete-feature") {
        return {Kind::DeleteFeature, jsonutil::get_string(doc, "feature", where), {}, old_value, nullptr};
    }
    if (kind == "set-property") {
        return {Kind::SetProperty, jsonutil::get_string(doc, "element", where), jsonutil::get_string(doc, "property", where),
                old_value, jsonutil::get(doc, "new", where)};
    }
    throw FormatError("unknown primitive kind '" + kind + "'");
}

namespace {

void check_old(json& recorded, const json& current, const std::string& what) {
    if (recorded.is_null()) {
        recorded = current;
    } else if (recorded != current) {
        throw HistoryError(what + ": recorded old value " + recorded.dump() + " does not match " + current.dump());
    }
}

void apply_unchecked(MetamodelSet& mm, PrimitiveChange& change, const std::string& what) {
    using Kind = PrimitiveChange::Kind;
    switch (change.kind) {
        case Kind::CreateClassifier:
            mm.add_classifier(mm.resolve_package(change.target), change.after);
            return;
        case Kind::DeleteClassifier: {
            auto id = mm.resolve_classifier(change.target);
            check_old(change.before, mm.classifier_to_json(id), what);
            mm.remove_classifier(id);
            return;
        }
        case Kind::CreateFeature:
            mm.add_feature(mm.resolve_class(change.target), change.after);
            return;
        case Kind::DeleteFeature: {
            auto id = mm.resolve_feature(change.target);
            check_old(change.before, mm.feature_to_json(id), what);
            mm.remove_feature(id);
            return;
        }
        case Kind::SetProperty: break;
    }

    auto element = mm.resolve(change.target);
    const auto& p = change.property;
    const auto& value = change.after;
    auto wrong = [&](const char* expected) {
        return HistoryError(what + ": property '" + p + "' expects " + expected);
    };
    if (const auto* c = std::get_if<ClassifierId>(&element)) {
        if (p == "name") {
            if (!value.is_string()) throw wrong("a string");
            check_old(change.before, mm.classifier(*c).name, what);
            mm.rename(*c, value.get<std::string>());
        } else if (p == "abstract") {
            if (!value.is_boolean() || !mm.classifier(*c).is_class()) throw wrong("a boolean on a class");
            check_old(change.before, mm.classifier(*c).abstract, what);
            mm.set_abstract(*c, value.get<bool>());
        } else {
            throw HistoryError(what + ": classifiers have no property '" + p + "'");
        }
        return;
    }
    auto f = std::get<FeatureId>(element);
    const auto& feature = mm.feature(f);
    if (p == "name") {
        if (!value.is_string()) throw wrong("a string");
        check_old(change.before, feature.name, what);
        mm.rename(f, value.get<std::string>());
    } else if (p == "lower") {
        if (!value.is_number_integer()) throw wrong("an integer");
        check_old(change.before, feature.lower, what);
        mm.set_lower(f, value.get<std::int64_t>());
    } else if (p == "upper") {
        std::int64_t upper = 0;
        if (value.is_string() && value.get<std::string>() == "*") {
            upper = kUnbounded;
        } else if (value.is_number_integer()) {
            upper = value.get<std::int64_t>();
        } else {
            throw wrong("an integer or \"*\"");
        }
        // one spelling for unbounded, so inverses compare equal
        change.after = upper_json(upper);
        if (change.before.is_number_integer() && change.before.get<std::int64_t>() == kUnbounded) change.before = "*";
        check_old(change.before, upper_json(feature.upper), what);
        mm.set_upper(f, upper);
    } else if (p == "target") {
        if (!value.is_string() || !feature.is_reference()) throw wrong("a class FQN on a reference");
        check_old(change.before, mm.fqn(feature.target), what);
        mm.set_target(f, mm.resolve_classifier(value.get<std::string>()));
    } else {
        throw HistoryError(what + ": features have no property '" + p + "'");
    }
}

}  // namespace

void apply_primitive(MetamodelSet& mm, PrimitiveChange& change) {
    const auto what = std::string(to_string(change.kind)) + " '" + change.target + "'";
    try {
        apply_unchecked(mm, change, what);
    } catch (const HistoryError&) {
        throw;
    } catch (const Error& e) {
        throw HistoryError(what + ": " + e.what());
    }
}

// -- records ------------------------------------------------------------------

std::string ChangeRecord::label() const {
    if (is_operation()) {
        const auto& op = operation();
        std::string out = op.name + "(";
        bool first = true;
        for (const auto& [name, value] : op.bindings) {
            if (!first) out += ", ";
            first = false;
            out += name + "=" + binding_text(value);
        }
        return out + ")";
    }
    const auto& c = custom();
    auto n = c.primitives.size();
    std::string out = "custom[" + std::to_string(n) + (n == 1 ? " change]" : " changes]");
    if (c.migration) out += " -> " + *c.migration;
    return out;
}

json ChangeRecord::to_json() const {
    if (is_operation()) {
        return {{"kind", "operation"},
                {"operation", {{"opName", operation().name}, {"bindings", bindings_to_json(operation().bindings)}}}};
    }
    json prims = json::array();
    for (const auto& p : custom().primitives) prims.push_back(p.to_json());
    return {{"kind", "custom"},
            {"custom",
             {{"primitives", std::move(prims)},
              {"migrationId", custom().migration ? json(*custom().migration) : json(nullptr)}}}};
}

ChangeRecord ChangeRecord::from_json(const json& doc) {
    auto kind = jsonutil::get_string(doc, "kind", "record");
    if (kind == "operation") {
        const auto& op = jsonutil::get_object(doc, "operation", "record");
        auto bindings = op.contains("bindings") ? bindings_from_json(op["bindings"]) : Bindings{};
        return {OperationRecord{jsonutil::get_string(op, "opName", "record.operation"), std::move(bindings)}};
    }
    if (kind == "custom") {
        const auto& c = jsonutil::get_object(doc, "custom", "record");
        CustomRecord out;
        for (const auto& p : jsonutil::get_array(c, "primitives", "record.custom")) {
            out.primitives.push_back(PrimitiveChange::from_json(p));
        }
        if (c.contains("migrationId") && !c["migrationId"].is_null()) {
            if (!c["migrationId"].is_string()) throw FormatError("record.custom.migrationId must be a string");
            out.migration = c["migrationId"].get<std::string>();
        }
        return {std::move(out)};
    }
    throw FormatError("unknown record kind '" + kind + "'");
}

// -- history ------------------------------------------------------------------

History History::create(const MetamodelSet& metamodels) {
    if (metamodels.metamodels().empty()) throw HistoryError("cannot create a history without metamodels");
    History h;
    for (const auto& mm : metamodels.metamodels()) {
        if (h.snapshots_.count(mm.name) != 0) throw HistoryError("duplicate metamodel name '" + mm.name + "'");
        h.names_.push_back(mm.name);
        h.snapshots_.emplace(mm.name, metamodels.to_json(mm.name));
    }
    return h;
}

MetamodelSet History::initial_metamodels() const {
    std::vector<json> docs;
    for (const auto& n : names_) docs.push_back(snapshots_.at(n));
    return MetamodelSet::from_json(docs);
}

std::size_t History::record_count() const {
    std::size_t n = 0;
    for (const auto& r : releases_) n += r.size();
    return n;
}

void History::append(ChangeRecord record) { releases_.back().push_back(std::move(record)); }

void History::release(bool force) {
    if (releases_.back().empty() && !force) throw HistoryError("the open release is empty; nothing to release");
    releases_.emplace_back();
}

json History::to_json() const {
    json releases = json::array();
    for (const auto& r : releases_) {
        json records = json::array();
        for (const auto& rec : r) records.push_back(rec.to_json());
        releases.push_back(std::move(records));
    }
    json snapshots = json::object();
    for (const auto& [name, doc] : snapshots_) snapshots[name] = doc;
    return {{"metamodels", names_}, {"initialSnapshots", std::move(snapshots)}, {"releases", std::move(releases)}};
}

std::string History::dump() const { return dump_json(to_json()); }

History History::from_json(const json& doc) {
    History h;
    for (const auto& n : jsonutil::get_array(doc, "metamodels", "history")) {
        if (!n.is_string()) throw FormatError("history.metamodels must hold names");
        h.names_.push_back(n.get<std::string>());
    }
    if (h.names_.empty()) throw HistoryError("history has no metamodels");
    const auto& snaps = jsonutil::get_object(doc, "initialSnapshots", "history");
    for (const auto& n : h.names_) {
        if (!snaps.contains(n)) throw FormatError("history has no initial snapshot for '" + n + "'");
        if (!h.snapshots_.emplace(n, snaps[n]).second) throw HistoryError("duplicate metamodel name '" + n + "'");
    }
    if (snaps.size() != h.names_.size()) throw FormatError("history has snapshots for unlisted metamodels");
    const auto& releases = jsonutil::get_array(doc, "releases", "history");
    if (releases.empty()) throw FormatError("history needs at least the open release");
    h.releases_.clear();
    for (const auto& r : releases) {
        if (!r.is_array()) throw FormatError("history.releases must hold arrays of records");
        Release rel;
        for (const auto& rec : r) rel.push_back(ChangeRecord::from_json(rec));
        h.releases_.push_back(std::move(rel));
    }
    (void)h.initial_metamodels();  // snapshots must load
    return h;
}

History History::parse(const std::string& text) { return from_json(parse_json(text)); }

// -- migrations ---------------------------------------------------------------

double MigrationReport::elapsed_millis() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
}

void MigrationRegistry::add(std::string id, Migration migration) {
    if (id.empty()) throw Error("migration ids must not be empty");
    if (!entries_.emplace(id, std::move(migration)).second) throw Error("migration '" + id + "' is already registered");
}

const Migration* MigrationRegistry::find(std::string_view id) const {
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> MigrationRegistry::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : entries_) out.push_back(id);
    return out;
}

namespace {

const MigrationRegistry& empty_registry() {
    static const MigrationRegistry registry;
    return registry;
}

void run_custom(Workspace& workspace, std::vector<PrimitiveChange>& primitives,
                const std::optional<std::string>& migration, const MigrationRegistry& registry,
                MigrationReport& report) {
    execute_transaction(workspace, [&](Workspace& ws) {
        for (auto& p : primitives) apply_primitive(*ws.metamodels, p);
        if (!migration || ws.models.empty()) return;
        const auto* entry = registry.find(*migration);
        if (entry == nullptr) throw HistoryError("unknown migration '" + *migration + "'");
        auto start = std::chrono::steady_clock::now();
        for (std::size_t i = 0; i < ws.models.size(); ++i) {
            MigrationContext ctx(ws.models[i], i, report);
            (*entry)(ctx);
        }
        double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        report.steps.push_back({*migration, ms});
    });
}

}  // namespace

void execute_record(Workspace& workspace, const ChangeRecord& record, const OperationCatalog& catalog,
                    const MigrationRegistry& registry, MigrationReport& report) {
    if (record.is_operation()) {
        const auto& op = record.operation();
        apply_operation(workspace, catalog.at(op.name), op.bindings);
        return;
    }
    auto primitives = record.custom().primitives;
    run_custom(workspace, primitives, record.custom().migration, registry, report);
}

MetamodelSet reconstruct_metamodels(const History& history, std::size_t release_index,
                                    const OperationCatalog& catalog) {
    if (release_index > history.releases().size()) throw HistoryError("release index out of range");
    Workspace ws(history.initial_metamodels());
    MigrationReport report;
    for (std::size_t r = 0; r < release_index; ++r) {
        for (const auto& rec : history.releases()[r]) execute_record(ws, rec, catalog, empty_registry(), report);
    }
    return *ws.metamodels;
}

MigrationResult migrate(std::span<const Model> models, const History& history, const MigrationRegistry& registry,
                        std::size_t from, std::optional<std::size_t> to, const OperationCatalog& catalog) {
    const auto end = to.value_or(history.releases().size());
    if (from > end || end > history.releases().size()) {
        throw HistoryError("release range [" + std::to_string(from) + ", " + std::to_string(end) +
                           ") is outside the history (" + std::to_string(history.releases().size()) + " releases)");
    }
    Workspace ws(reconstruct_metamodels(history, from, catalog));
    for (const auto& m : models) ws.attach(m);
    if (auto bad = conformance_messages(ws.models); !bad.empty()) {
        throw TransactionError("input models do not conform to the metamodels of release " + std::to_string(from),
                               std::move(bad));
    }
    MigrationReport report;
    for (std::size_t r = from; r < end; ++r) {
        for (const auto& rec : history.releases()[r]) execute_record(ws, rec, catalog, registry, report);
    }
    return {ws.metamodels, std::move(ws.models), std::move(report)};
}

// -- recorder -----------------------------------------------------------------

Recorder::Recorder(const MetamodelSet& metamodels, const MigrationRegistry* registry, const OperationCatalog& catalog)
    : history_(History::create(metamodels)),
      workspace_(history_.initial_metamodels()),
      registry_(registry != nullptr ? registry : &empty_registry()),
      catalog_(&catalog) {}

Recorder::Recorder(History history, const MigrationRegistry* registry, const OperationCatalog& catalog)
    : history_(std::move(history)),
      workspace_(reconstruct_metamodels(history_, history_.releases().size(), catalog)),
      registry_(registry != nullptr ? registry : &empty_registry()),
      catalog_(&catalog) {}

const Model& Recorder::attach(const Model& model) {
    auto bound = rebind(model, workspace_.metamodels);
    std::vector<Model> one{bound};
    if (auto bad = conformance_messages(one); !bad.empty()) {
        throw TransactionError("model does not conform to the current metamodels", std::move(bad));
    }
    workspace_.models.push_back(std::move(bound));
    return workspace_.models.back();
}

const ChangeRecord& Recorder::commit(ChangeRecord record) {
    history_.append(std::move(record));
    return history_.open_release().back();
}

const ChangeRecord& Recorder::apply_operation(std::string_view name, const Bindings& bindings) {
    report_ = {};
    coevo::apply_operation(workspace_, catalog_->at(name), bindings);
    return commit({OperationRecord{std::string(name), bindings}});
}

const ChangeRecord& Recorder::record_custom(std::vector<PrimitiveChange> primitives,
                                            std::optional<std::string> migration) {
    if (migration && !registry_->contains(*migration)) throw HistoryError("unknown migration '" + *migration + "'");
    report_ = {};
    run_custom(workspace_, primitives, migration, *registry_, report_);
    return commit({CustomRecord{std::move(primitives), std::move(migration)}});
}

}  // namespace coevo
