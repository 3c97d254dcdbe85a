#include "coevo/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "coevo/error.hpp"

namespace coevo {

std::string_view to_string(ParamType type) {
    switch (type) {
        case ParamType::ClassRef: return "class-ref";
        case ParamType::FeatureRef: return "feature-ref";
        case ParamType::EnumRef: return "enum-ref";
        case ParamType::ElementRef: return "element-ref";
        case ParamType::String: return "string";
        case ParamType::Boolean: return "boolean";
        case ParamType::Integer: return "integer";
    }
    return "?";
}

json bindings_to_json(const Bindings& bindings) {
    json out = json::object();
    for (const auto& [name, value] : bindings) {
        out[name] = std::visit([](const auto& v) { return json(v); }, value);
    }
    return out;
}

Bindings bindings_from_json(const json& document) {
    if (!document.is_object()) throw FormatError("bindings must be an object");
    Bindings out;
    for (const auto& [name, value] : document.items()) {
        if (value.is_string()) {
            out.emplace(name, value.get<std::string>());
        } else if (value.is_boolean()) {
            out.emplace(name, value.get<bool>());
        } else if (value.is_number_integer()) {
            out.emplace(name, value.get<std::int64_t>());
        } else {
            throw FormatError("binding '" + name + "' must be a string, boolean or integer");
        }
    }
    return out;
}

std::string binding_text(const BindingValue& value) {
    if (const auto* s = std::get_if<std::string>(&value)) return *s;
    if (const auto* b = std::get_if<bool>(&value)) return *b ? "true" : "false";
    return std::to_string(std::get<std::int64_t>(value));
}

// -- resolved bindings --------------------------------------------------------

bool ResolvedBindings::has(std::string_view name) const { return values_.find(name) != values_.end(); }

const ResolvedBindings::Value& ResolvedBindings::at(std::string_view name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw BindingError("parameter '" + std::string(name) + "' is not bound");
    return it->second;
}

namespace {

template <class T>
const T& typed(const ResolvedBindings::Value& v, std::string_view name, const char* what) {
    const auto* p = std::get_if<T>(&v);
    if (p == nullptr) throw BindingError("parameter '" + std::string(name) + "' is not " + what);
    return *p;
}

}  // namespace

ClassifierId ResolvedBindings::classifier(std::string_view name) const {
    return typed<ClassifierId>(at(name), name, "a classifier");
}
FeatureId ResolvedBindings::feature(std::string_view name) const { return typed<FeatureId>(at(name), name, "a feature"); }
const std::string& ResolvedBindings::string(std::string_view name) const {
    return typed<std::string>(at(name), name, "a string");
}
bool ResolvedBindings::boolean(std::string_view name) const { return typed<bool>(at(name), name, "a boolean"); }
std::int64_t ResolvedBindings::integer(std::string_view name) const {
    return typed<std::int64_t>(at(name), name, "an integer");
}
bool ResolvedBindings::boolean_or(std::string_view name, bool fallback) const {
    return has(name) ? boolean(name) : fallback;
}
std::int64_t ResolvedBindings::integer_or(std::string_view name, std::int64_t fallback) const {
    return has(name) ? integer(name) : fallback;
}

void ResolvedBindings::set(std::string name, Value value) { values_.insert_or_assign(std::move(name), std::move(value)); }

// -- descriptors --------------------------------------------------------------

const Parameter* OperationDescriptor::parameter(std::string_view pname) const {
    for (const auto& p : parameters) {
        if (p.name == pname) return &p;
    }
    return nullptr;
}

json OperationDescriptor::to_json() const {
    json params = json::array();
    for (const auto& p : parameters) {
        params.push_back({{"name", p.name},
                          {"type", to_string(p.type)},
                          {"required", p.required},
                          {"description", p.description}});
    }
    json cons = json::array();
    for (const auto& c : constraints) cons.push_back({{"id", c.id}, {"message", c.message}, {"params", c.params}});
    return {{"name", name}, {"label", label}, {"parameters", std::move(params)}, {"constraints", std::move(cons)}};
}

void OperationCatalog::add(CoupledOperation operation) {
    if (find(operation.name())) throw Error("operation '" + operation.name() + "' is already registered");
    for (const auto& c : operation.descriptor.constraints) {
        for (const auto& p : c.params) {
            if (!operation.descriptor.parameter(p)) {
                throw Error("constraint '" + c.id + "' of '" + operation.name() + "' names unknown parameter '" + p + "'");
            }
        }
    }
    operations_.push_back(std::move(operation));
}

const CoupledOperation* OperationCatalog::find(std::string_view name) const {
    for (const auto& op : operations_) {
        if (op.name() == name) return &op;
    }
    return nullptr;
}

const CoupledOperation& OperationCatalog::at(std::string_view name) const {
    if (const auto* op = find(name)) return *op;
    throw BindingError("unknown operation '" + std::string(name) + "'");
}

json OperationCatalog::to_json() const {
    json out = json::array();
    for (const auto& op : operations_) out.push_back(op.descriptor.to_json());
    return out;
}

// -- binding resolution -------------------------------------------------------

namespace {

std::optional<std::int64_t> parse_integer(std::string_view text) {
    if (text == "*") return kUnbounded;
    std::int64_t v = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size()) return std::nullopt;
    return v;
}

ResolvedBindings::Value resolve_value(const Parameter& param, const MetamodelSet& mm, const BindingValue& raw) {
    const auto where = "parameter '" + param.name + "'";
    const auto* text = std::get_if<std::string>(&raw);
    switch (param.type) {
        case ParamType::ClassRef:
        case ParamType::EnumRef:
        case ParamType::FeatureRef:
        case ParamType::ElementRef: {
            if (text == nullptr) throw BindingError(where + " expects a fully qualified name");
            if (param.type == ParamType::FeatureRef) {
                auto f = mm.find_feature(*text);
                if (!f) throw BindingError(where + ": unknown feature '" + *text + "'");
                return *f;
            }
            if (auto c = mm.find_classifier(*text)) {
                const auto& cls = mm.classifier(*c);
                if (param.type == ParamType::ClassRef && !cls.is_class()) {
                    throw BindingError(where + ": '" + *text + "' is not a class");
                }
                if (param.type == ParamType::EnumRef && !cls.is_enum()) {
                    throw BindingError(where + ": '" + *text + "' is not an enumeration");
                }
                return *c;
            }
            if (param.type == ParamType::ElementRef) {
                if (auto f = mm.find_feature(*text)) return *f;
                throw BindingError(where + ": unknown element '" + *text + "'");
            }
            throw BindingError(where + ": unknown " + (param.type == ParamType::EnumRef ? "enumeration" : "class") +
                               " '" + *text + "'");
        }
        case ParamType::String:
            if (text == nullptr) throw BindingError(where + " expects a string");
            return *text;
        case ParamType::Boolean:
            if (const auto* b = std::get_if<bool>(&raw)) return *b;
            if (text != nullptr && (*text == "true" || *text == "false")) return *text == "true";
            throw BindingError(where + " expects a boolean");
        case ParamType::Integer:
            if (const auto* i = std::get_if<std::int64_t>(&raw)) return *i;
            if (text != nullptr) {
                if (auto v = parse_integer(*text)) return *v;
            }
            throw BindingError(where + " expects an integer");
    }
    throw BindingError(where + " has an unknown type");
}

}  // namespace

ResolvedBindings resolve_bindings(const CoupledOperation& op, const MetamodelSet& mm, const Bindings& bindings,
                                  bool partial) {
    ResolvedBindings out;
    for (const auto& [name, raw] : bindings) {
        const auto* param = op.descriptor.parameter(name);
        if (param == nullptr) throw BindingError("operation '" + op.name() + "' has no parameter '" + name + "'");
        out.set(name, resolve_value(*param, mm, raw));
    }
    if (op.complete) op.complete(mm, out);
    if (!partial) {
        for (const auto& p : op.descriptor.parameters) {
            if (p.required && !out.has(p.name)) {
                throw BindingError("operation '" + op.name() + "' needs a binding for '" + p.name + "'");
            }
        }
    }
    return out;
}

std::vector<ConstraintFailure> check_constraints(const CoupledOperation& op, const MetamodelSet& mm,
                                                 std::span<const Model> models, const ResolvedBindings& bindings) {
    std::vector<ConstraintFailure> out;
    OperationContext ctx{mm, models, bindings};
    for (const auto& c : op.descriptor.constraints) {
        bool bound = std::all_of(c.params.begin(), c.params.end(), [&](const auto& p) { return bindings.has(p); });
        if (bound && !c.holds(ctx)) out.push_back({c.id, c.message});
    }
    return out;
}

void apply_operation(Workspace& workspace, const CoupledOperation& op, const Bindings& bindings) {
    auto resolved = resolve_bindings(op, *workspace.metamodels, bindings);
    auto failures = check_constraints(op, *workspace.metamodels, workspace.models, resolved);
    if (!failures.empty()) {
        std::vector<std::string> messages;
        for (const auto& f : failures) messages.push_back(f.text());
        throw ConstraintError("operation '" + op.name() + "' is not applicable", std::move(messages));
    }
    execute_transaction(workspace, [&](Workspace& ws) { op.execute(ws, resolved); });
}

std::vector<OperationOffer> offer_operations(const OperationCatalog& catalog, const MetamodelSet& mm,
                                             std::span<const Model> models, std::span<const std::string> selection) {
    std::vector<OperationOffer> out;
    for (const auto& op : catalog.operations()) {
        OperationOffer offer{&op, {}, false, {}};
        for (const auto& fqn : selection) {
            auto cls = mm.find_classifier(fqn);
            auto feature = cls ? std::nullopt : mm.find_feature(fqn);
            if (!cls && !feature) continue;
            for (const auto& p : op.descriptor.parameters) {
                if (offer.prefilled.count(p.name) != 0) continue;
                bool fits = false;
                switch (p.type) {
                    case ParamType::ClassRef: fits = cls && mm.classifier(*cls).is_class(); break;
                    case ParamType::EnumRef: fits = cls && mm.classifier(*cls).is_enum(); break;
                    case ParamType::FeatureRef: fits = feature.has_value(); break;
                    case ParamType::ElementRef: fits = true; break;
                    default: break;
                }
                if (fits) {
                    offer.prefilled.emplace(p.name, fqn);
                    break;
                }
            }
        }
        auto resolved = resolve_bindings(op, mm, offer.prefilled, true);
        for (const auto& f : check_constraints(op, mm, models, resolved)) offer.messages.push_back(f.text());
        bool complete = std::all_of(op.descriptor.parameters.begin(), op.descriptor.parameters.end(),
                                    [&](const Parameter& p) { return !p.required || resolved.has(p.name); });
        offer.applicable = complete && offer.messages.empty();
        out.push_back(std::move(offer));
    }
    return out;
}

// -- the built-in operations --------------------------------------------------

namespace {

Parameter param(std::string name, ParamType type, bool required, std::string description) {
    return {std::move(name), type, required, std::move(description)};
}

std::optional<PackageRef> find_package(const MetamodelSet& mm, std::string_view fqn) {
    try {
        return mm.resolve_package(fqn);
    } catch (const Error&) {
        return std::nullopt;
    }
}

bool classifier_name_taken(const MetamodelSet& mm, PackageRef pkg, std::string_view name,
                           std::optional<ClassifierId> except = std::nullopt) {
    for (auto c : mm.metamodels()[pkg.metamodel].packages[pkg.package].classifiers) {
        if (mm.alive(c) && c != except && mm.classifier(c).name == name) return true;
    }
    return false;
}

// Features visible on the class or on any of its subclasses.
bool feature_name_taken(const MetamodelSet& mm, ClassifierId cls, std::string_view name,
                        std::optional<FeatureId> except = std::nullopt) {
    auto clashes = [&](ClassifierId c) {
        for (auto f : mm.all_features(c)) {
            if (f != except && mm.feature(f).name == name) return true;
        }
        return false;
    };
    if (clashes(cls)) return true;
    for (auto sub : mm.all_subtypes(cls)) {
        if (clashes(sub)) return true;
    }
    return false;
}

bool has_instances(std::span<const Model> models, ClassifierId cls) {
    for (const auto& m : models) {
        for (auto e : m.elements()) {
            if (m.metamodels().is_subtype(m.class_of(e), cls)) return true;
        }
    }
    return false;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        auto item = text.substr(start, end - start);
        item.erase(0, item.find_first_not_of(' '));
        item.erase(item.find_last_not_of(' ') + 1);
        if (!item.empty()) out.push_back(item);
        start = end + 1;
    }
    return out;
}

struct AttributeType {
    ValueType type;
    ClassifierId enum_type;
};

std::optional<AttributeType> find_attribute_type(const MetamodelSet& mm, const std::string& text) {
    if (text == "string") return AttributeType{ValueType::String, {}};
    if (text == "boolean") return AttributeType{ValueType::Boolean, {}};
    if (text == "integer") return AttributeType{ValueType::Integer, {}};
    auto c = mm.find_classifier(text);
    if (c && mm.classifier(*c).is_enum()) return AttributeType{ValueType::Enumeration, *c};
    return std::nullopt;
}

bool bounds_ok(std::int64_t lower, std::int64_t upper) {
    if (lower < 0) return false;
    if (upper == kUnbounded) return true;
    return upper >= 1 && lower <= upper;
}

void set_default(ResolvedBindings& b, const char* name, ResolvedBindings::Value value) {
    if (!b.has(name)) b.set(name, std::move(value));
}

CoupledOperation rename_op() {
    CoupledOperation op;
    op.descriptor.name = "rename";
    op.descriptor.label = "Rename";
    op.descriptor.parameters = {param("element", ParamType::ElementRef, true, "class, enumeration or feature"),
                                param("newName", ParamType::String, true, "new name")};
    op.descriptor.constraints = {
        {"valid-name", "new name must be a valid identifier", {"newName"},
         [](const OperationContext& ctx) { return is_identifier(ctx.bindings.string("newName")); }},
        {"unique-name", "new name must be unique among its siblings", {"element", "newName"},
         [](const OperationContext& ctx) {
             const auto& mm = ctx.metamodels;
             const auto& name = ctx.bindings.string("newName");
             const auto& target = ctx.bindings.at("element");
             if (const auto* c = std::get_if<ClassifierId>(&target)) {
                 return !classifier_name_taken(mm, mm.classifier(*c).package, name, *c);
             }
             auto f = std::get<FeatureId>(target);
             return !feature_name_taken(mm, mm.feature(f).owner, name, f);
         }},
    };
    op.execute = [](Workspace& ws, const ResolvedBindings& b) {
        const auto& target = b.at("element");
        if (const auto* c = std::get_if<ClassifierId>(&target)) {
            ws.metamodels->rename(*c, b.string("newName"));
        } else {
            ws.metamodels->rename(std::get<FeatureId>(target), b.string("newName"));
        }
    };
    return op;
}

CoupledOperation create_class_op() {
    CoupledOperation op;
    op.descriptor.name = "createClass";
    op.descriptor.label = "Create Class";
    op.descriptor.parameters = {
        param("package", ParamType::String, true, "package FQN, e.g. mm.pkg"),
        param("name", ParamType::String, true, "class name"),
        param("abstract", ParamType::Boolean, false, "abstract flag (default false)"),
        param("superTypes", ParamType::String, false, "comma separated class FQNs"),
    };
    op.descriptor.constraints = {
        {"package-exists", "package must exist", {"package"},
         [](const OperationContext& ctx) { return find_package(ctx.metamodels, ctx.bindings.string("package")).has_value(); }},
        {"valid-name", "name must be a valid identifier", {"name"},
         [](const OperationContext& ctx) { return is_identifier(ctx.bindings.string("name")); }},
        {"unique-name", "name must be unique in the package", {"package", "name"},
         [](const OperationContext& ctx) {
             auto pkg = find_package(ctx.metamodels, ctx.bindings.string("package"));
             return !pkg || !classifier_name_taken(ctx.metamodels, *pkg, ctx.bindings.string("name"));
         }},
        {"supertypes-exist", "every supertype must be an existing class", {"superTypes"},
         [](const OperationContext& ctx) {
             for (const auto& s : split_list(ctx.bindings.string("superTypes"))) {
                 auto c = ctx.metamodels.find_classifier(s);
                 if (!c || !ctx.metamodels.classifier(*c).is_class()) return false;
             }
             return true;
         }},
        {"no-feature-clash", "supertypes must not define features with the same name", {"superTypes"},
         [](const OperationContext& ctx) {
             std::set<std::string> seen;
             std::set<FeatureId> counted;
             for (const auto& s : split_list(ctx.bindings.string("superTypes"))) {
                 auto c = ctx.metamodels.find_classifier(s);
                 if (!c || !ctx.metamodels.classifier(*c).is_class()) continue;
                 for (auto f : ctx.metamodels.all_features(*c)) {
                     if (!counted.insert(f).second) continue;  // diamond
                     if (!seen.insert(ctx.metamodels.feature(f).name).second) return false;
                 }
             }
             return true;
         }},
    };
    op.complete = [](const MetamodelSet&, ResolvedBindings& b) {
        set_default(b, "abstract", false);
        set_default(b, "superTypes", std::string());
    };
    op.execute = [](Workspace& ws, const ResolvedBindings& b) {
        auto& mm = *ws.metamodels;
        std::vector<ClassifierId> supers;
        for (const auto& s : split_list(b.string("superTypes"))) supers.push_back(mm.resolve_class(s));
        mm.add_class(mm.resolve_package(b.string("package")), b.string("name"), b.boolean("abstract"), std::move(supers));
    };
    return op;
}

std::vector<Constraint> new_feature_constraints() {
    return {
        {"valid-name", "name must be a valid identifier", {"name"},
         [](const OperationContext& ctx) { return is_identifier(ctx.bindings.string("name")); }},
        {"unique-name", "name must be unique among the features of the class, its supertypes and subclasses",
         {"class", "name"},
         [](const OperationContext& ctx) {
             return !feature_name_taken(ctx.metamodels, ctx.bindings.classifier("class"), ctx.bindings.string("name"));
         }},
        {"valid-bounds", "bounds must satisfy 0 <= lower <= upper with upper >= 1 or unbounded", {"lower", "upper"},
         [](const OperationContext& ctx) { return bounds_ok(ctx.bindings.integer("lower"), ctx.bindings.integer("upper")); }},
        {"lower-zero", "lower bound must be 0 when instances of the class exist", {"class", "lower"},
         [](const OperationContext& ctx) {
             return ctx.bindings.integer("lower") == 0 || !has_instances(ctx.models, ctx.bindings.classifier("class"));
         }},
    };
}

CoupledOperation create_attribute_op() {
    CoupledOperation op;
    op.descriptor.name = "createAttribute";
    op.descriptor.label = "Create Attribute";
    op.descriptor.parameters = {
        param("class", ParamType::ClassRef, true, "owning class"),
        param("name", ParamType::String, true, "attribute name"),
        param("type", ParamType::String, true, "string, boolean, integer or an enumeration FQN"),
        param("lower", ParamType::Integer, false, "lower bound (default 0)"),
        param("upper", ParamType::Integer, false, "upper bound (default 1)"),
    };
    op.descriptor.constraints = new_feature_constraints();
    op.descriptor.constraints.push_back(
        {"type-exists", "type must be string, boolean, integer or an enumeration", {"type"},
         [](const OperationContext& ctx) {
             return find_attribute_type(ctx.metamodels, ctx.bindings.string("type")).has_value();
         }});
    op.descriptor.constraints.push_back({"single-valued", "attributes are single-valued: upper bound must be 1",
                                         {"upper"},
                                         [](const OperationContext& ctx) { return ctx.bindings.integer("upper") == 1; }});
    op.complete = [](const MetamodelSet&, ResolvedBindings& b) {
        set_default(b, "lower", std::int64_t{0});
        set_default(b, "upper", std::int64_t{1});
    };
    op.execute = [](Workspace& ws, const ResolvedBindings& b) {
        auto& mm = *ws.metamodels;
        auto type = find_attribute_type(mm, b.string("type"));
        if (!type) throw BindingError("unknown attribute type '" + b.string("type") + "'");
        mm.add_attribute(b.classifier("class"), b.string("name"), type->type, type->enum_type, b.integer("lower"),
                         b.integer("upper"));
    };
    return op;
}

CoupledOperation create_reference_op() {
    CoupledOperation op;
    op.descriptor.name = "createReference";
    op.descriptor.label = "Create Reference";
    op.descriptor.parameters = {
        param("class", ParamType::ClassRef, true, "owning class"),
        param("name", ParamType::String, true, "reference name"),
        param("target", ParamType::ClassRef, true, "target class, may be in another metamodel"),
        param("containment", ParamType::Boolean, false, "containment flag (default false)"),
        param("lower", ParamType::Integer, false, "lower bound (default 0)"),
        param("upper", ParamType::Integer, false, "upper bound, -1 or * for unbounded (default 1)"),
    };
    op.descriptor.constraints = new_feature_constraints();
    op.complete = [](const MetamodelSet&, ResolvedBindings& b) {
        set_default(b, "containment", false);
        set_default(b, "lower", std::int64_t{0});
        set_default(b, "upper", std::int64_t{1});
    };
    op.execute = [](Workspace& ws, const ResolvedBindings& b) {
        ws.metamodels->add_reference(b.classifier("class"), b.string("name"), b.classifier("target"),
                                     b.boolean("containment"), b.integer("lower"), b.integer("upper"));
    };
    return op;
}

CoupledOperation delete_feature_op() {
    CoupledOperation op;
    op.descriptor.name = "deleteFeature";
    op.descriptor.label = "Delete Feature";
    op.descriptor.parameters = {param("feature", ParamType::FeatureRef, true, "feature to delete")};
    op.descriptor.constraints = {
        {"no-contents", "a containment feature that holds elements cannot be deleted", {"feature"},
         [](const OperationContext& ctx) {
             auto f = ctx.bindings.feature("feature");
             if (!ctx.metamodels.feature(f).is_containment()) return true;
             for (const auto& m : ctx.models) {
                 for (auto e : m.elements()) {
                     if (!m.references(e, f).empty()) return false;
                 }
             }
             return true;
         }},
    };
    op.execute = [](Workspace& ws, const ResolvedBindings& b) {
        ws.metamodels->remove_feature(b.feature("feature"));
        for (auto& m : ws.models) m.drop_inapplicable_slots();
    };
    return op;
}

CoupledOperation enum_to_subclasses_op() {
    CoupledOperation op;
    op.descriptor.name = "enumToSubclasses";
    op.descriptor.label = "Enumeration to Sub Classes";
    op.descriptor.parameters = {
        param("class", ParamType::ClassRef, false, "class to specialize (default: owner of the attribute)"),
        param("attribute", ParamType::FeatureRef, true, "enumeration-typed attribute to replace"),
    };
    auto enum_of = [](const OperationContext& ctx) -> const Classifier* {
        const auto& f = ctx.metamodels.feature(ctx.bindings.feature("attribute"));
        if (!f.is_attribute() || f.value_type != ValueType::Enumeration) return nullptr;
        return &ctx.metamodels.classifier(f.enum_type);
    };
    op.descriptor.constraints = {
        {"C1", "attribute must have an enumeration type", {"attribute"},
         [=](const OperationContext& ctx) { return enum_of(ctx) != nullptr; }},
        {"C2", "attribute must belong to the class", {"class", "attribute"},
         [](const OperationContext& ctx) {
             return ctx.metamodels.feature(ctx.bindings.feature("attribute")).owner == ctx.bindings.classifier("class");
         }},
        {"C3", "no classifier in the package of the class may be named after a literal", {"class", "attribute"},
         [=](const OperationContext& ctx) {
             const auto* e = enum_of(ctx);
             if (e == nullptr) return true;
             auto pkg = ctx.metamodels.classifier(ctx.bindings.classifier("class")).package;
             return std::none_of(e->literals.begin(), e->literals.end(),
                                 [&](const auto& lit) { return classifier_name_taken(ctx.metamodels, pkg, lit); });
         }},
        {"C4", "attribute multiplicity must be 1..1", {"attribute"},
         [](const OperationContext& ctx) {
             const auto& f = ctx.metamodels.feature(ctx.bindings.feature("attribute"));
             return f.lower == 1 && f.upper == 1;
         }},
    };
    op.complete = [](const MetamodelSet& mm, ResolvedBindings& b) {
        if (!b.has("class") && b.has("attribute")) b.set("class", mm.feature(b.feature("attribute")).owner);
    };
    op.execute = [](Workspace& ws, const ResolvedBindings& b) {
        auto& mm = *ws.metamodels;
        const auto cls = b.classifier("class");
        const auto attr = b.feature("attribute");
        const auto enum_type = mm.feature(attr).enum_type;
        const auto literals = mm.classifier(enum_type).literals;
        const auto pkg = mm.classifier(cls).package;

        // Read the literal of every direct instance before the attribute goes.
        std::vector<std::vector<std::pair<ElementId, std::string>>> values(ws.models.size());
        for (std::size_t i = 0; i < ws.models.size(); ++i) {
            const auto& m = ws.models[i];
            for (auto e : m.elements()) {
                if (m.class_of(e) != cls) continue;
                const auto* v = m.attribute(e, attr);
                if (v == nullptr || !std::holds_alternative<std::string>(*v)) {
                    throw MigrationError("element '" + m.id_of(e) + "' has no literal for '" + mm.fqn(attr) + "'");
                }
                values[i].emplace_back(e, std::get<std::string>(*v));
            }
        }

        mm.set_abstract(cls, true);
        std::map<std::string, ClassifierId> subclass;
        for (const auto& lit : literals) subclass.emplace(lit, mm.add_class(pkg, lit, false, {cls}));
        mm.remove_feature(attr);

        for (std::size_t i = 0; i < ws.models.size(); ++i) {
            for (const auto& [e, lit] : values[i]) ws.models[i].retype(e, subclass.at(lit));
            ws.models[i].drop_inapplicable_slots();
        }

        bool used = false;
        for (auto c : mm.classifiers()) {
            for (auto f : mm.classifier(c).features) {
                const auto& feat = mm.feature(f);
                used = used || (feat.is_attribute() && feat.value_type == ValueType::Enumeration &&
                                feat.enum_type == enum_type);
            }
        }
        if (!used) mm.remove_classifier(enum_type);
    };
    return op;
}

CoupledOperation subclasses_to_enum_op() {
    CoupledOperation op;
    op.descriptor.name = "subclassesToEnum";
    op.descriptor.label = "Sub Classes to Enumeration";
    op.descriptor.parameters = {
        param("class", ParamType::ClassRef, true, "abstract class whose subclasses become literals"),
        param("attributeName", ParamType::String, true, "name of the new enumeration attribute"),
        param("enumName", ParamType::String, false, "name of the new enumeration (default: class name + Kind)"),
    };
    op.descriptor.constraints = {
        {"abstract-class", "class must be abstract", {"class"},
         [](const OperationContext& ctx) { return ctx.metamodels.classifier(ctx.bindings.classifier("class")).abstract; }},
        {"has-subclasses", "class must have at least one subclass", {"class"},
         [](const OperationContext& ctx) { return !ctx.metamodels.direct_subtypes(ctx.bindings.classifier("class")).empty(); }},
        {"leaf-subclasses", "every subclass must be concrete, featureless, a leaf and have no other supertype", {"class"},
         [](const OperationContext& ctx) {
             const auto& mm = ctx.metamodels;
             for (auto sub : mm.direct_subtypes(ctx.bindings.classifier("class"))) {
                 const auto& c = mm.classifier(sub);
                 if (c.abstract || !c.features.empty() || c.super_types.size() != 1 || !mm.direct_subtypes(sub).empty()) {
                     return false;
                 }
             }
             return true;
         }},
        {"untargeted-subclasses", "no reference may target a subclass", {"class"},
         [](const OperationContext& ctx) {
             const auto& mm = ctx.metamodels;
             auto subs = mm.direct_subtypes(ctx.bindings.classifier("class"));
             for (auto c : mm.classifiers()) {
                 for (auto f : mm.classifier(c).features) {
                     const auto& feat = mm.feature(f);
                     if (feat.is_reference() && std::find(subs.begin(), subs.end(), feat.target) != subs.end()) {
                         return false;
                     }
                 }
             }
             return true;
         }},
        {"valid-attribute-name", "attribute name must be a valid identifier", {"attributeName"},
         [](const OperationContext& ctx) { return is_identifier(ctx.bindings.string("attributeName")); }},
        {"fresh-attribute", "attribute name must not be used by the class or its supertypes", {"class", "attributeName"},
         [](const OperationContext& ctx) {
             return !ctx.metamodels.feature_named(ctx.bindings.classifier("class"), ctx.bindings.string("attributeName"));
         }},
        {"valid-enum-name", "enumeration name must be a valid identifier", {"enumName"},
         [](const OperationContext& ctx) { return is_identifier(ctx.bindings.string("enumName")); }},
        {"fresh-enum", "enumeration name must not be taken in the package of the class", {"class", "enumName"},
         [](const OperationContext& ctx) {
             const auto& mm = ctx.metamodels;
             return !classifier_name_taken(mm, mm.classifier(ctx.bindings.classifier("class")).package,
                                           ctx.bindings.string("enumName"));
         }},
    };
    op.complete = [](const MetamodelSet& mm, ResolvedBindings& b) {
        if (!b.has("enumName") && b.has("class")) b.set("enumName", mm.classifier(b.classifier("class")).name + "Kind");
    };
    op.execute = [](Workspace& ws, const ResolvedBindings& b) {
        auto& mm = *ws.metamodels;
        const auto cls = b.classifier("class");
        const auto subs = mm.direct_subtypes(cls);
        std::vector<std::string> names;
        for (auto s : subs) names.push_back(mm.classifier(s).name);

        auto enum_type = mm.add_enum(mm.classifier(cls).package, b.string("enumName"), names);
        auto attr = mm.add_attribute(cls, b.string("attributeName"), ValueType::Enumeration, enum_type, 1, 1);
        mm.set_abstract(cls, false);
        for (auto& m : ws.models) {
            for (auto e : m.elements()) {
                auto it = std::find(subs.begin(), subs.end(), m.class_of(e));
                if (it == subs.end()) continue;
                m.retype(e, cls);
                m.set_attribute(e, attr, names[static_cast<std::size_t>(it - subs.begin())]);
            }
        }
        for (auto s : subs) mm.remove_classifier(s);
    };
    return op;
}

}  // namespace

const OperationCatalog& OperationCatalog::standard() {
    static const OperationCatalog catalog = [] {
        OperationCatalog c;
        c.add(rename_op());
        c.add(create_class_op());
        c.add(create_attribute_op());
        c.add(create_reference_op());
        c.add(delete_feature_op());
        c.add(enum_to_subclasses_op());
        c.add(subclasses_to_enum_op());
        return c;
    }();
    return catalog;
}

}  // namespace coevo
