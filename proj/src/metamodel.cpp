#include "coevo/metamodel.hpp"

#include <algorithm>
#include <atomic>
#include <functional>

#include "coevo/error.hpp"
#include "json_util.hpp"

namespace coevo {

bool is_identifier(std::string_view name) {
    if (name.empty()) return false;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    if (!alpha(name.front())) return false;
    return std::all_of(name.begin(), name.end(), [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); });
}

namespace {

void require_identifier(std::string_view what, std::string_view name) {
    if (!is_identifier(name)) {
        throw InvariantError(std::string(what) + " name '" + std::string(name) + "' is not a valid identifier");
    }
}

std::vector<std::string_view> split_fqn(std::string_view fqn) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto dot = fqn.find('.', start);
        parts.push_back(fqn.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return parts;
}

json upper_to_json(std::int64_t upper) {
    if (upper == kUnbounded) return "*";
    return upper;
}

std::int64_t upper_from_json(const json& value, std::string_view where) {
    if (value.is_string() && value.get<std::string>() == "*") return kUnbounded;
    if (value.is_number_integer()) return value.get<std::int64_t>();
    throw FormatError(std::string(where) + ": upper must be an integer or \"*\"");
}

}  // namespace

std::string_view to_string(ValueType type) {
    switch (type) {
        case ValueType::String: return "string";
        case ValueType::Boolean: return "boolean";
        case ValueType::Integer: return "integer";
        case ValueType::Enumeration: return "enumeration";
    }
    return "?";
}

// -- loading ------------------------------------------------------------------

MetamodelSet MetamodelSet::from_json(std::span<const json> documents) {
    MetamodelSet set;
    struct PendingClass {
        ClassifierId id;
        const json* doc;
        std::string where;
    };
    std::vector<PendingClass> pending;

    for (const auto& doc : documents) {
        if (!doc.is_object()) throw FormatError("metamodel document must be an object");
        auto mm_name = jsonutil::get_string(doc, "name", "metamodel");
        require_identifier("metamodel", mm_name);
        for (const auto& existing : set.metamodels_) {
            if (existing.name == mm_name) throw InvariantError("duplicate metamodel name '" + mm_name + "'");
        }
        auto mm_index = set.add_metamodel(mm_name);
        for (const auto& pkg_doc : jsonutil::get_array(doc, "packages", mm_name)) {
            auto pkg_name = jsonutil::get_string(pkg_doc, "name", mm_name + ".packages[]");
            require_identifier("package", pkg_name);
            auto pkg = set.add_package(mm_index, pkg_name);
            auto pkg_fqn = mm_name + "." + pkg_name;
            for (const auto& cdoc : jsonutil::get_array(pkg_doc, "classifiers", pkg_fqn)) {
                auto name = jsonutil::get_string(cdoc, "name", pkg_fqn + ".classifiers[]");
                auto where = pkg_fqn + "." + name;
                auto kind = jsonutil::get_string(cdoc, "kind", where);
                if (kind == "class") {
                    auto id = set.add_class(pkg, name, jsonutil::get_bool_or(cdoc, "abstract", false, where));
                    pending.push_back({id, &cdoc, where});
                } else if (kind == "enum") {
                    std::vector<std::string> literals;
                    if (cdoc.contains("literals")) {
                        for (const auto& lit : jsonutil::get_array(cdoc, "literals", where)) {
                            if (!lit.is_string()) throw FormatError(where + ": literals must be strings");
                            literals.push_back(lit.get<std::string>());
                        }
                    }
                    set.add_enum(pkg, name, std::move(literals));
                } else {
                    throw FormatError(where + ": unknown classifier kind '" + kind + "'");
                }
            }
        }
    }

    // Supertypes and features may refer to classifiers declared later or in
    // other documents, so they are bound in a second pass.
    for (const auto& p : pending) {
        if (!p.doc->contains("super")) continue;
        for (const auto& s : jsonutil::get_array(*p.doc, "super", p.where)) {
            if (!s.is_string()) throw FormatError(p.where + ": super entries must be strings");
            auto super = set.resolve_classifier(s.get<std::string>());
            if (!set.classifier(super).is_class()) {
                throw InvariantError(p.where + ": supertype '" + s.get<std::string>() + "' is not a class");
            }
            set.mutable_classifier(p.id).super_types.push_back(super);
        }
    }
    set.rebuild_caches();

    for (const auto& p : pending) {
        if (!p.doc->contains("features")) continue;
        for (const auto& fdoc : jsonutil::get_array(*p.doc, "features", p.where)) set.add_feature(p.id, fdoc);
    }
    set.validate();
    return set;
}

MetamodelSet MetamodelSet::parse(std::span<const std::string> texts) {
    std::vector<json> docs;
    docs.reserve(texts.size());
    for (const auto& t : texts) docs.push_back(parse_json(t));
    return from_json(docs);
}

MetamodelSet load_metamodel(const std::string& text) {
    std::vector<std::string> texts{text};
    return MetamodelSet::parse(texts);
}

// -- saving -------------------------------------------------------------------

json MetamodelSet::to_json(std::string_view metamodel_name) const {
    for (const auto& mm : metamodels_) {
        if (mm.name != metamodel_name) continue;
        json packages = json::array();
        for (const auto& pkg : mm.packages) {
            json classifiers = json::array();
            for (auto cid : pkg.classifiers) classifiers.push_back(classifier_to_json(cid));
            packages.push_back({{"name", pkg.name}, {"classifiers", std::move(classifiers)}});
        }
        return {{"name", mm.name}, {"packages", std::move(packages)}};
    }
    throw ResolveError(std::string(metamodel_name), std::string(metamodel_name));
}

std::vector<json> MetamodelSet::to_json() const {
    std::vector<json> out;
    for (const auto& mm : metamodels_) out.push_back(to_json(mm.name));
    return out;
}

json MetamodelSet::classifier_to_json(ClassifierId id, bool with_features) const {
    const auto& c = classifier(id);
    if (c.is_enum()) return {{"kind", "enum"}, {"name", c.name}, {"literals", c.literals}};
    json supers = json::array();
    for (auto s : c.super_types) supers.push_back(fqn(s));
    json features = json::array();
    if (with_features) {
        for (auto fid : c.features) features.push_back(feature_to_json(fid));
    }
    return {{"kind", "class"},
            {"name", c.name},
            {"abstract", c.abstract},
            {"super", std::move(supers)},
            {"features", std::move(features)}};
}

json MetamodelSet::feature_to_json(FeatureId id) const {
    const auto& f = feature(id);
    json doc = {{"name", f.name}, {"lower", f.lower}, {"upper", upper_to_json(f.upper)}};
    if (f.is_attribute()) {
        doc["kind"] = "attribute";
        doc["type"] = f.value_type == ValueType::Enumeration ? fqn(f.enum_type) : std::string(to_string(f.value_type));
    } else {
        doc["kind"] = "reference";
        doc["target"] = fqn(f.target);
        doc["containment"] = f.containment;
    }
    return doc;
}

ClassifierId MetamodelSet::add_classifier(PackageRef package, const json& document) {
    auto name = jsonutil::get_string(document, "name", fqn(package) + ".classifiers[]");
    auto where = fqn(package) + "." + name;
    auto kind = jsonutil::get_string(document, "kind", where);
    if (kind == "enum") {
        std::vector<std::string> literals;
        if (document.contains("literals")) {
            for (const auto& lit : jsonutil::get_array(document, "literals", where)) {
                if (!lit.is_string()) throw FormatError(where + ": literals must be strings");
                literals.push_back(lit.get<std::string>());
            }
        }
        return add_enum(package, name, std::move(literals));
    }
    if (kind != "class") throw FormatError(where + ": unknown classifier kind '" + kind + "'");
    if (document.contains("features") && !jsonutil::get_array(document, "features", where).empty()) {
        throw FormatError(where + ": features must be created separately");
    }
    std::vector<ClassifierId> supers;
    if (document.contains("super")) {
        for (const auto& s : jsonutil::get_array(document, "super", where)) {
            if (!s.is_string()) throw FormatError(where + ": super entries must be strings");
            supers.push_back(resolve_classifier(s.get<std::string>()));
        }
    }
    return add_class(package, name, jsonutil::get_bool_or(document, "abstract", false, where), std::move(supers));
}

FeatureId MetamodelSet::add_feature(ClassifierId owner, const json& document) {
    auto name = jsonutil::get_string(document, "name", fqn(owner) + ".features[]");
    auto where = fqn(owner) + "." + name;
    auto kind = jsonutil::get_string(document, "kind", where);
    auto lower = jsonutil::get_int_or(document, "lower", 0, where);
    auto upper = document.contains("upper") ? upper_from_json(document.at("upper"), where) : std::int64_t{1};
    if (kind == "attribute") {
        auto type = jsonutil::get_string(document, "type", where);
        if (type == "string") return add_attribute(owner, name, ValueType::String, {}, lower, upper);
        if (type == "boolean") return add_attribute(owner, name, ValueType::Boolean, {}, lower, upper);
        if (type == "integer") return add_attribute(owner, name, ValueType::Integer, {}, lower, upper);
        return add_attribute(owner, name, ValueType::Enumeration, resolve_classifier(type), lower, upper);
    }
    if (kind == "reference") {
        auto target = resolve_classifier(jsonutil::get_string(document, "target", where));
        return add_reference(owner, name, target, jsonutil::get_bool_or(document, "containment", false, where), lower,
                             upper);
    }
    throw FormatError(where + ": unknown feature kind '" + kind + "'");
}

std::string MetamodelSet::dump(std::string_view metamodel_name) const {
    return dump_json(to_json(metamodel_name));
}

bool MetamodelSet::operator==(const MetamodelSet& other) const {
    return to_json() == other.to_json();
}

// -- queries ------------------------------------------------------------------

std::vector<std::string> MetamodelSet::metamodel_names() const {
    std::vector<std::string> names;
    for (const auto& mm : metamodels_) names.push_back(mm.name);
    return names;
}

bool MetamodelSet::alive(ClassifierId id) const {
    return id.valid() && id.index() < classifiers_.size() && classifiers_[id.index()].has_value();
}

bool MetamodelSet::alive(FeatureId id) const {
    return id.valid() && id.index() < features_.size() && features_[id.index()].has_value();
}

const Classifier& MetamodelSet::classifier(ClassifierId id) const {
    if (!alive(id)) throw ModelError("unknown or deleted classifier #" + std::to_string(id.value));
    return *classifiers_[id.index()];
}

const Feature& MetamodelSet::feature(FeatureId id) const {
    if (!alive(id)) throw ModelError("unknown or deleted feature #" + std::to_string(id.value));
    return *features_[id.index()];
}

Classifier& MetamodelSet::mutable_classifier(ClassifierId id) {
    if (!alive(id)) throw ModelError("unknown or deleted classifier #" + std::to_string(id.value));
    return *classifiers_[id.index()];
}

Feature& MetamodelSet::mutable_feature(FeatureId id) {
    if (!alive(id)) throw ModelError("unknown or deleted feature #" + std::to_string(id.value));
    return *features_[id.index()];
}

std::vector<ClassifierId> MetamodelSet::classifiers() const {
    std::vector<ClassifierId> out;
    for (const auto& mm : metamodels_) {
        for (const auto& pkg : mm.packages) out.insert(out.end(), pkg.classifiers.begin(), pkg.classifiers.end());
    }
    return out;
}

std::size_t MetamodelSet::class_count() const {
    std::size_t n = 0;
    for (const auto& c : classifiers_) n += (c && c->is_class()) ? 1 : 0;
    return n;
}

std::size_t MetamodelSet::feature_count() const {
    return static_cast<std::size_t>(std::count_if(features_.begin(), features_.end(),
                                                  [](const auto& f) { return f.has_value(); }));
}

std::string MetamodelSet::fqn(PackageRef package) const {
    const auto& mm = metamodels_.at(package.metamodel);
    return mm.name + "." + mm.packages.at(package.package).name;
}

std::string MetamodelSet::fqn(ClassifierId id) const {
    const auto& c = classifier(id);
    return fqn(c.package) + "." + c.name;
}

std::string MetamodelSet::fqn(FeatureId id) const {
    const auto& f = feature(id);
    return fqn(f.owner) + "." + f.name;
}

std::optional<ClassifierId> MetamodelSet::find_classifier(std::string_view fqn) const {
    auto it = classifier_index_.find(std::string(fqn));
    if (it == classifier_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<FeatureId> MetamodelSet::find_feature(std::string_view fqn) const {
    auto it = feature_index_.find(std::string(fqn));
    if (it == feature_index_.end()) return std::nullopt;
    return it->second;
}

MetamodelElement MetamodelSet::resolve(std::string_view fqn) const {
    if (auto c = find_classifier(fqn)) return *c;
    if (auto f = find_feature(fqn)) return *f;

    // Walk segment by segment to report the first one that does not exist.
    auto parts = split_fqn(fqn);
    std::string text(fqn);
    const Metamodel* mm = nullptr;
    std::uint32_t mm_index = 0;
    for (std::uint32_t i = 0; i < metamodels_.size(); ++i) {
        if (metamodels_[i].name == parts[0]) {
            mm = &metamodels_[i];
            mm_index = i;
        }
    }
    if (mm == nullptr) throw ResolveError(text, std::string(parts[0]));
    if (parts.size() < 2) throw ResolveError(text, std::string(parts[0]));
    const Package* pkg = nullptr;
    std::uint32_t pkg_index = 0;
    for (std::uint32_t i = 0; i < mm->packages.size(); ++i) {
        if (mm->packages[i].name == parts[1]) {
            pkg = &mm->packages[i];
            pkg_index = i;
        }
    }
    if (pkg == nullptr) throw ResolveError(text, std::string(parts[1]));
    if (parts.size() < 3) throw ResolveError(text, std::string(parts[1]));
    auto cls = find_classifier(this->fqn(PackageRef{mm_index, pkg_index}) + "." + std::string(parts[2]));
    if (!cls) throw ResolveError(text, std::string(parts[2]));
    if (parts.size() == 4) throw ResolveError(text, std::string(parts[3]));
    throw ResolveError(text, std::string(parts.back()));
}

ClassifierId MetamodelSet::resolve_classifier(std::string_view fqn) const {
    auto el = resolve(fqn);
    if (auto* c = std::get_if<ClassifierId>(&el)) return *c;
    throw ModelError("'" + std::string(fqn) + "' is a feature, not a classifier");
}

ClassifierId MetamodelSet::resolve_class(std::string_view fqn) const {
    auto id = resolve_classifier(fqn);
    if (!classifier(id).is_class()) throw ModelError("'" + std::string(fqn) + "' is an enumeration, not a class");
    return id;
}

FeatureId MetamodelSet::resolve_feature(std::string_view fqn) const {
    auto el = resolve(fqn);
    if (auto* f = std::get_if<FeatureId>(&el)) return *f;
    throw ModelError("'" + std::string(fqn) + "' is a classifier, not a feature");
}

PackageRef MetamodelSet::resolve_package(std::string_view fqn) const {
    auto parts = split_fqn(fqn);
    std::string text(fqn);
    if (parts.size() != 2) throw ResolveError(text, std::string(parts.back()));
    for (std::uint32_t m = 0; m < metamodels_.size(); ++m) {
        if (metamodels_[m].name != parts[0]) continue;
        for (std::uint32_t p = 0; p < metamodels_[m].packages.size(); ++p) {
            if (metamodels_[m].packages[p].name == parts[1]) return {m, p};
        }
        throw ResolveError(text, std::string(parts[1]));
    }
    throw ResolveError(text, std::string(parts[0]));
}

std::span<const FeatureId> MetamodelSet::all_features(ClassifierId cls) const {
    (void)classifier(cls);
    return cache_[cls.index()].all_features;
}

bool MetamodelSet::has_feature(ClassifierId cls, FeatureId feature) const {
    if (!alive(cls) || !alive(feature)) return false;
    const auto& all = cache_[cls.index()].all_features;
    return std::find(all.begin(), all.end(), feature) != all.end();
}

std::optional<FeatureId> MetamodelSet::feature_named(ClassifierId cls, std::string_view name) const {
    for (auto f : all_features(cls)) {
        if (feature(f).name == name) return f;
    }
    return std::nullopt;
}

bool MetamodelSet::is_subtype(ClassifierId sub, ClassifierId super) const {
    if (!alive(sub) || !alive(super)) return false;
    const auto& anc = cache_[sub.index()].ancestors;
    return std::binary_search(anc.begin(), anc.end(), super);
}

std::vector<ClassifierId> MetamodelSet::direct_subtypes(ClassifierId cls) const {
    std::vector<ClassifierId> out;
    for (auto id : classifiers()) {
        const auto& s = classifier(id).super_types;
        if (std::find(s.begin(), s.end(), cls) != s.end()) out.push_back(id);
    }
    return out;
}

std::vector<ClassifierId> MetamodelSet::all_subtypes(ClassifierId cls) const {
    std::vector<ClassifierId> out;
    for (auto id : classifiers()) {
        if (id != cls && is_subtype(id, cls)) out.push_back(id);
    }
    return out;
}

// -- mutation -----------------------------------------------------------------

std::uint32_t MetamodelSet::add_metamodel(std::string name) {
    require_identifier("metamodel", name);
    for (const auto& mm : metamodels_) {
        if (mm.name == name) throw InvariantError("duplicate metamodel name '" + name + "'");
    }
    metamodels_.push_back({std::move(name), {}});
    return static_cast<std::uint32_t>(metamodels_.size() - 1);
}

PackageRef MetamodelSet::add_package(std::uint32_t metamodel, std::string name) {
    require_identifier("package", name);
    auto& mm = metamodels_.at(metamodel);
    for (const auto& p : mm.packages) {
        if (p.name == name) throw InvariantError("duplicate package '" + mm.name + "." + name + "'");
    }
    mm.packages.push_back({std::move(name), {}});
    return {metamodel, static_cast<std::uint32_t>(mm.packages.size() - 1)};
}

void MetamodelSet::check_classifier_name_free(PackageRef package, std::string_view name,
                                              std::optional<ClassifierId> except) const {
    require_identifier("classifier", name);
    auto full = fqn(package) + "." + std::string(name);
    auto existing = find_classifier(full);
    if (existing && existing != except) throw InvariantError("duplicate classifier '" + full + "'");
}

void MetamodelSet::check_feature_name_free(ClassifierId owner, std::string_view name,
                                           std::optional<FeatureId> except) const {
    require_identifier("feature", name);
    // Unique among own and inherited features of the owner and of every
    // class that inherits from it.
    std::vector<ClassifierId> scope{owner};
    auto subs = all_subtypes(owner);
    scope.insert(scope.end(), subs.begin(), subs.end());
    for (auto cls : scope) {
        for (auto f : all_features(cls)) {
            if (f != except && feature(f).name == name) {
                throw InvariantError("duplicate feature '" + fqn(owner) + "." + std::string(name) +
                                     "' (clashes with '" + fqn(f) + "')");
            }
        }
    }
}

void MetamodelSet::check_bounds(std::string_view what, std::int64_t lower, std::int64_t upper) {
    if (lower < 0) throw InvariantError(std::string(what) + ": lower bound must be non-negative");
    if (upper != kUnbounded && upper < 1) throw InvariantError(std::string(what) + ": upper bound must be positive");
    if (upper != kUnbounded && lower > upper) throw InvariantError(std::string(what) + ": lower bound exceeds upper bound");
}

ClassifierId MetamodelSet::add_class(PackageRef package, std::string name, bool abstract,
                                     std::vector<ClassifierId> super_types) {
    check_classifier_name_free(package, name);
    for (auto s : super_types) {
        if (!classifier(s).is_class()) throw InvariantError("supertype '" + fqn(s) + "' is not a class");
    }
    ClassifierId id(static_cast<std::uint32_t>(classifiers_.size()));
    Classifier c;
    c.name = std::move(name);
    c.kind = ClassifierKind::Class;
    c.package = package;
    c.abstract = abstract;
    c.super_types = std::move(super_types);
    classifiers_.emplace_back(std::move(c));
    metamodels_[package.metamodel].packages[package.package].classifiers.push_back(id);
    rebuild_caches();
    // Inherited feature names must not clash with each other.
    std::vector<std::string> names;
    for (auto f : all_features(id)) names.push_back(feature(f).name);
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
        auto bad = fqn(id);
        remove_classifier(id);
        throw InvariantError("class '" + bad + "' inherits clashing feature names");
    }
    return id;
}

ClassifierId MetamodelSet::add_enum(PackageRef package, std::string name, std::vector<std::string> literals) {
    check_classifier_name_free(package, name);
    auto sorted = literals;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw InvariantError("enumeration '" + fqn(package) + "." + name + "' has duplicate literals");
    }
    for (const auto& l : literals) require_identifier("literal", l);
    ClassifierId id(static_cast<std::uint32_t>(classifiers_.size()));
    Classifier c;
    c.name = std::move(name);
    c.kind = ClassifierKind::Enumeration;
    c.package = package;
    c.literals = std::move(literals);
    classifiers_.emplace_back(std::move(c));
    metamodels_[package.metamodel].packages[package.package].classifiers.push_back(id);
    rebuild_caches();
    return id;
}

FeatureId MetamodelSet::add_attribute(ClassifierId owner, std::string name, ValueType type,
                                      ClassifierId enum_type, std::int64_t lower, std::int64_t upper) {
    if (!classifier(owner).is_class()) throw InvariantError("features can only be added to classes");
    check_feature_name_free(owner, name);
    auto where = fqn(owner) + "." + name;
    check_bounds(where, lower, upper);
    if (upper != 1) throw InvariantError(where + ": attributes are single-valued (upper must be 1)");
    if (type == ValueType::Enumeration) {
        if (!classifier(enum_type).is_enum()) {
            throw InvariantError(where + ": attribute type '" + fqn(enum_type) + "' is not an enumeration");
        }
    } else {
        enum_type = ClassifierId{};
    }
    FeatureId id(static_cast<std::uint32_t>(features_.size()));
    Feature f;
    f.name = std::move(name);
    f.kind = FeatureKind::Attribute;
    f.owner = owner;
    f.value_type = type;
    f.enum_type = enum_type;
    f.lower = lower;
    f.upper = upper;
    features_.emplace_back(std::move(f));
    mutable_classifier(owner).features.push_back(id);
    rebuild_caches();
    return id;
}

FeatureId MetamodelSet::add_reference(ClassifierId owner, std::string name, ClassifierId target,
                                      bool containment, std::int64_t lower, std::int64_t upper) {
    if (!classifier(owner).is_class()) throw InvariantError("features can only be added to classes");
    check_feature_name_free(owner, name);
    auto where = fqn(owner) + "." + name;
    check_bounds(where, lower, upper);
    if (!classifier(target).is_class()) throw InvariantError(where + ": reference target must be a class");
    FeatureId id(static_cast<std::uint32_t>(features_.size()));
    Feature f;
    f.name = std::move(name);
    f.kind = FeatureKind::Reference;
    f.owner = owner;
    f.target = target;
    f.containment = containment;
    f.lower = lower;
    f.upper = upper;
    features_.emplace_back(std::move(f));
    mutable_classifier(owner).features.push_back(id);
    rebuild_caches();
    return id;
}

void MetamodelSet::remove_classifier(ClassifierId id) {
    const auto& c = classifier(id);
    auto name = fqn(id);
    if (!c.features.empty()) throw InvariantError("cannot delete '" + name + "': it still owns features");
    for (auto other : classifiers()) {
        if (other == id) continue;
        const auto& s = classifier(other).super_types;
        if (std::find(s.begin(), s.end(), id) != s.end()) {
            throw InvariantError("cannot delete '" + name + "': it is a supertype of '" + fqn(other) + "'");
        }
    }
    for (std::size_t i = 0; i < features_.size(); ++i) {
        if (!features_[i]) continue;
        const auto& f = *features_[i];
        if ((f.is_reference() && f.target == id) || (f.is_attribute() && f.enum_type == id)) {
            throw InvariantError("cannot delete '" + name + "': it is the type of '" +
                                 fqn(FeatureId(static_cast<std::uint32_t>(i))) + "'");
        }
    }
    auto& list = metamodels_[c.package.metamodel].packages[c.package.package].classifiers;
    list.erase(std::remove(list.begin(), list.end(), id), list.end());
    classifiers_[id.index()].reset();
    rebuild_caches();
}

void MetamodelSet::remove_feature(FeatureId id) {
    const auto& f = feature(id);
    auto& list = mutable_classifier(f.owner).features;
    list.erase(std::remove(list.begin(), list.end(), id), list.end());
    features_[id.index()].reset();
    rebuild_caches();
}

void MetamodelSet::rename(ClassifierId id, std::string name) {
    check_classifier_name_free(classifier(id).package, name, id);
    mutable_classifier(id).name = std::move(name);
    rebuild_caches();
}

void MetamodelSet::rename(FeatureId id, std::string name) {
    check_feature_name_free(feature(id).owner, name, id);
    mutable_feature(id).name = std::move(name);
    rebuild_caches();
}

void MetamodelSet::set_abstract(ClassifierId id, bool abstract) {
    auto& c = mutable_classifier(id);
    if (!c.is_class()) throw InvariantError("'" + fqn(id) + "' is not a class");
    c.abstract = abstract;
    rebuild_caches();
}

void MetamodelSet::set_lower(FeatureId id, std::int64_t lower) {
    auto& f = mutable_feature(id);
    check_bounds(fqn(id), lower, f.upper);
    f.lower = lower;
    rebuild_caches();
}

void MetamodelSet::set_upper(FeatureId id, std::int64_t upper) {
    auto& f = mutable_feature(id);
    check_bounds(fqn(id), f.lower, upper);
    if (f.is_attribute() && upper != 1) throw InvariantError(fqn(id) + ": attributes are single-valued");
    f.upper = upper;
    rebuild_caches();
}

void MetamodelSet::set_target(FeatureId id, ClassifierId target) {
    auto& f = mutable_feature(id);
    if (!f.is_reference()) throw InvariantError(fqn(id) + ": only references have a target");
    if (!classifier(target).is_class()) throw InvariantError(fqn(id) + ": reference target must be a class");
    f.target = target;
    rebuild_caches();
}

// -- invariants ---------------------------------------------------------------

void MetamodelSet::rebuild_caches() {
    static std::atomic<std::uint64_t> generations{0};
    generation_ = ++generations;
    classifier_index_.clear();
    feature_index_.clear();
    cache_.assign(classifiers_.size(), {});

    for (auto id : classifiers()) {
        auto name = fqn(id);
        if (!classifier_index_.emplace(name, id).second) throw InvariantError("duplicate classifier '" + name + "'");
    }

    // 0 = unvisited, 1 = on stack, 2 = done
    std::vector<int> state(classifiers_.size(), 0);
    std::function<void(ClassifierId)> visit = [&](ClassifierId id) {
        auto& st = state[id.index()];
        if (st == 2) return;
        if (st == 1) throw InvariantError("supertype cycle involving '" + fqn(id) + "'");
        st = 1;
        auto& entry = cache_[id.index()];
        const auto& c = *classifiers_[id.index()];
        for (auto s : c.super_types) {
            if (!alive(s)) throw InvariantError("'" + fqn(id) + "' has a deleted supertype");
            visit(s);
            const auto& sup = cache_[s.index()];
            entry.ancestors.insert(entry.ancestors.end(), sup.ancestors.begin(), sup.ancestors.end());
            for (auto f : sup.all_features) {
                if (std::find(entry.all_features.begin(), entry.all_features.end(), f) == entry.all_features.end()) {
                    entry.all_features.push_back(f);
                }
            }
        }
        entry.ancestors.push_back(id);
        std::sort(entry.ancestors.begin(), entry.ancestors.end());
        entry.ancestors.erase(std::unique(entry.ancestors.begin(), entry.ancestors.end()), entry.ancestors.end());
        entry.all_features.insert(entry.all_features.end(), c.features.begin(), c.features.end());
        st = 2;
    };
    for (auto id : classifiers()) visit(id);

    for (auto id : classifiers()) {
        for (auto f : classifier(id).features) {
            auto name = fqn(f);
            if (!feature_index_.emplace(name, f).second) throw InvariantError("duplicate feature '" + name + "'");
        }
    }
}

void MetamodelSet::validate() const {
    for (auto id : classifiers()) {
        const auto& c = classifier(id);
        auto name = fqn(id);
        require_identifier("classifier", c.name);
        if (c.is_enum()) continue;
        if (std::find(cache_[id.index()].ancestors.begin(), cache_[id.index()].ancestors.end(), id) ==
            cache_[id.index()].ancestors.end()) {
            throw InvariantError("corrupt supertype cache for '" + name + "'");
        }
        for (auto s : c.super_types) {
            if (s == id) throw InvariantError("supertype cycle involving '" + name + "'");
            if (!classifier(s).is_class()) throw InvariantError(name + ": supertype is not a class");
        }
        std::vector<std::string> names;
        for (auto f : all_features(id)) {
            const auto& feat = feature(f);
            names.push_back(feat.name);
            auto fname = fqn(f);
            if (feat.lower < 0 || (feat.upper != kUnbounded && (feat.upper < 1 || feat.lower > feat.upper))) {
                throw InvariantError(fname + ": invalid multiplicity");
            }
            if (feat.is_reference() && !alive(feat.target)) throw InvariantError(fname + ": target does not exist");
            if (feat.is_attribute() && feat.value_type == ValueType::Enumeration && !alive(feat.enum_type)) {
                throw InvariantError(fname + ": enumeration type does not exist");
            }
        }
        std::sort(names.begin(), names.end());
        auto dup = std::adjacent_find(names.begin(), names.end());
        if (dup != names.end()) throw InvariantError(name + ": duplicate feature name '" + *dup + "'");
    }
}

// -- json helpers -------------------------------------------------------------

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t byte = e.byte == 0 ? 0 : e.byte - 1;
        std::size_t line = 1;
        std::size_t column = 1;
        for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::string msg = e.what();
        // nlohmann prefixes "[json.exception.parse_error.101] parse error at ..."
        auto colon = msg.find(": ");
        throw ParseError("parse error: " + (colon == std::string::npos ? msg : msg.substr(colon + 2)), line, column);
    }
}

std::string dump_json(const json& value) {
    return value.dump(2) + "\n";
}

}  // namespace coevo
