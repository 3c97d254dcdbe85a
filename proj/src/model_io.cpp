#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "coevo/error.hpp"
#include "coevo/model.hpp"
#include "json_util.hpp"

namespace coevo {

namespace {

json scalar_to_json(const Scalar& value) {
    return std::visit([](const auto& v) { return json(v); }, value);
}

Scalar scalar_from_json(const json& value, const std::string& where) {
    if (value.is_boolean()) return value.get<bool>();
    if (value.is_number_integer()) return value.get<std::int64_t>();
    if (value.is_string()) return value.get<std::string>();
    throw FormatError(where + ": attribute values must be strings, booleans or integers");
}

// Shared by save_model and canonical_form; `name_of` maps handles to the
// ids written out.
template <class NameOf>
json write_model(const Model& model, NameOf name_of) {
    const auto& mm = model.metamodels();
    json resources = json::array();
    for (const auto& res : model.resources()) {
        json roots = json::array();
        for (auto r : res.roots) roots.push_back(name_of(r));
        resources.push_back({{"uri", res.uri}, {"roots", std::move(roots)}});
    }
    json elements = json::array();
    for (auto e : model.elements()) {
        auto cls = model.class_of(e);
        if (!mm.alive(cls)) throw ModelError("element '" + model.id_of(e) + "' has a deleted class");
        json slots = json::object();
        for (auto f : model.set_features(e)) {
            if (!mm.alive(f) || !mm.has_feature(cls, f)) {
                throw ModelError("element '" + model.id_of(e) + "' has a slot for a feature its class does not have");
            }
            const auto& name = mm.feature(f).name;
            if (const auto* scalar = model.attribute(e, f)) {
                slots[name] = scalar_to_json(*scalar);
            } else {
                json refs = json::array();
                for (auto t : model.references(e, f)) refs.push_back(name_of(t));
                slots[name] = std::move(refs);
            }
        }
        elements.push_back({{"id", name_of(e)}, {"class", mm.fqn(cls)}, {"slots", std::move(slots)}});
    }
    return {{"resources", std::move(resources)}, {"elements", std::move(elements)}};
}

}  // namespace

json save_model(const Model& model) {
    return write_model(model, [&](ElementId e) { return model.id_of(e); });
}

std::string dump_model(const Model& model) { return dump_json(save_model(model)); }

Model load_model(std::shared_ptr<const MetamodelSet> metamodels, const json& document) {
    Model model(std::move(metamodels));
    const auto& mm = model.metamodels();
    const auto& elements = jsonutil::get_array(document, "elements", "model");
    const auto& resources = jsonutil::get_array(document, "resources", "model");

    std::vector<std::pair<ElementId, const json*>> pending;
    for (const auto& edoc : elements) {
        auto id = jsonutil::get_string(edoc, "id", "model.elements[]");
        auto where = "element '" + id + "'";
        if (id.empty()) throw FormatError("element ids must not be empty");
        if (model.find(id)) throw FormatError("duplicate element id '" + id + "'");
        auto cls = mm.resolve_class(jsonutil::get_string(edoc, "class", where));
        pending.emplace_back(model.allocate(cls, id), &edoc);
    }

    auto lookup = [&](const json& ref, const std::string& where) {
        if (!ref.is_string()) throw FormatError(where + ": reference lists hold element ids");
        auto target = model.find(ref.get<std::string>());
        if (!target) throw FormatError(where + ": unknown element id '" + ref.get<std::string>() + "'");
        return *target;
    };

    // Containment must form a forest: each element has at most one owner.
    std::unordered_map<std::string, std::string> owner;
    for (const auto& [element, edoc] : pending) {
        auto where = "element '" + model.id_of(element) + "'";
        if (!edoc->contains("slots")) continue;
        for (const auto& [name, value] : jsonutil::get_object(*edoc, "slots", where).items()) {
            auto f = mm.feature_named(model.class_of(element), name);
            if (!f) throw FormatError(where + ": class '" + mm.fqn(model.class_of(element)) + "' has no feature '" + name + "'");
            if (!mm.feature(*f).is_containment() || !value.is_array()) continue;
            for (const auto& ref : value) {
                auto child = lookup(ref, where);
                if (!owner.emplace(model.id_of(child), model.id_of(element)).second) {
                    throw FormatError("element '" + model.id_of(child) + "' is contained twice");
                }
            }
        }
    }

    for (const auto& [element, edoc] : pending) {
        auto where = "element '" + model.id_of(element) + "'";
        if (!edoc->contains("slots")) continue;
        for (const auto& [name, value] : edoc->at("slots").items()) {
            auto f = *mm.feature_named(model.class_of(element), name);
            const auto& feature = mm.feature(f);
            if (feature.is_attribute()) {
                model.set_attribute(element, f, scalar_from_json(value, where + "." + name));
                continue;
            }
            if (!value.is_array()) throw FormatError(where + "." + name + ": reference slots must be arrays");
            std::vector<ElementId> targets;
            for (const auto& ref : value) targets.push_back(lookup(ref, where + "." + name));
            model.set_references(element, f, std::move(targets));
        }
    }

    for (const auto& rdoc : resources) {
        auto uri = jsonutil::get_string(rdoc, "uri", "model.resources[]");
        if (model.find_resource(uri)) throw FormatError("duplicate resource '" + uri + "'");
        model.add_resource(uri);
        for (const auto& ref : jsonutil::get_array(rdoc, "roots", "resource '" + uri + "'")) {
            auto root = lookup(ref, "resource '" + uri + "'");
            if (model.container(root) || model.root_resource(root)) {
                throw FormatError("element '" + model.id_of(root) + "' is a root but already has an owner");
            }
            model.move_to_resource(root, uri);
        }
    }
    return model;
}

Model parse_model(std::shared_ptr<const MetamodelSet> metamodels, const std::string& text) {
    return load_model(std::move(metamodels), parse_json(text));
}

json canonical_form(const Model& model) {
    std::unordered_map<ElementId, std::size_t> position;
    auto order = model.elements();
    for (std::size_t i = 0; i < order.size(); ++i) position.emplace(order[i], i);
    return write_model(model, [&](ElementId e) { return "#" + std::to_string(position.at(e)); });
}

std::string canonical_text(const Model& model) { return dump_json(canonical_form(model)); }

bool isomorphic(const Model& a, const Model& b) { return canonical_form(a) == canonical_form(b); }

std::optional<std::string> first_difference(const Model& a, const Model& b) {
    auto ca = canonical_form(a);
    auto cb = canonical_form(b);
    if (ca == cb) return std::nullopt;
    const auto& ra = ca["resources"];
    const auto& rb = cb["resources"];
    if (ra != rb) {
        if (ra.size() != rb.size()) {
            return "resource count differs: " + std::to_string(ra.size()) + " vs " + std::to_string(rb.size());
        }
        for (std::size_t i = 0; i < ra.size(); ++i) {
            if (ra[i] != rb[i]) return "resource " + std::to_string(i) + " differs: " + ra[i].dump() + " vs " + rb[i].dump();
        }
    }
    const auto& ea = ca["elements"];
    const auto& eb = cb["elements"];
    for (std::size_t i = 0; i < std::min(ea.size(), eb.size()); ++i) {
        if (ea[i] != eb[i]) return "element #" + std::to_string(i) + " differs: " + ea[i].dump() + " vs " + eb[i].dump();
    }
    return "element count differs: " + std::to_string(ea.size()) + " vs " + std::to_string(eb.size());
}

Model rebind(const Model& model, std::shared_ptr<const MetamodelSet> metamodels) {
    return load_model(std::move(metamodels), save_model(model));
}

}  // namespace coevo
