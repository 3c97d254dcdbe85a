#include "support.hpp"

#include <fstream>
#include <sstream>

#include "coevo/error.hpp"

#ifndef COEVO_FIXTURES_DIR
#error COEVO_FIXTURES_DIR must be defined
#endif

namespace coevo::testkit {

std::string fixture_path(const std::string& name) { return std::string(COEVO_FIXTURES_DIR) + "/" + name; }

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

namespace {

const char* const kGraph = R"({
  "name": "g",
  "packages": [{"name": "g", "classifiers": [
    {"kind": "class", "name": "Node", "abstract": true, "super": [], "features": [
      {"kind": "attribute", "name": "label", "type": "string", "lower": 0, "upper": 1},
      {"kind": "reference", "name": "links", "target": "g.g.Node", "containment": false, "lower": 0, "upper": "*"},
      {"kind": "reference", "name": "children", "target": "g.g.Node", "containment": true, "lower": 0, "upper": "*"}]},
    {"kind": "class", "name": "Leaf", "abstract": false, "super": ["g.g.Node"], "features": []},
    {"kind": "class", "name": "Box", "abstract": false, "super": ["g.g.Node"], "features": [
      {"kind": "reference", "name": "first", "target": "g.g.Leaf", "containment": false, "lower": 0, "upper": 1},
      {"kind": "reference", "name": "parts", "target": "g.g.Leaf", "containment": true, "lower": 0, "upper": "*"}]},
    {"kind": "class", "name": "Tag", "abstract": false, "super": [], "features": [
      {"kind": "reference", "name": "owner", "target": "g.g.Box", "containment": false, "lower": 0, "upper": 1},
      {"kind": "reference", "name": "refs", "target": "g.g.Node", "containment": false, "lower": 0, "upper": "*"}]}
  ]}]
})";

const char* const kShop = R"({
  "name": "shop",
  "packages": [{"name": "shop", "classifiers": [
    {"kind": "enum", "name": "Color", "literals": ["Red", "Green", "Blue"]},
    {"kind": "class", "name": "Store", "abstract": false, "super": [], "features": [
      {"kind": "reference", "name": "items", "target": "shop.shop.Item", "containment": true, "lower": 0, "upper": "*"}]},
    {"kind": "class", "name": "Item", "abstract": false, "super": [], "features": [
      {"kind": "attribute", "name": "name", "type": "string", "lower": 1, "upper": 1},
      {"kind": "reference", "name": "next", "target": "shop.shop.Item", "containment": false, "lower": 0, "upper": 1},
      {"kind": "attribute", "name": "color", "type": "shop.shop.Color", "lower": 1, "upper": 1}]}
  ]}]
})";

std::shared_ptr<const MetamodelSet> load(const char* text) {
    std::vector<std::string> texts{text};
    return std::make_shared<const MetamodelSet>(MetamodelSet::parse(texts));
}

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& items) {
    return items[std::uniform_int_distribution<std::size_t>(0, items.size() - 1)(rng)];
}

bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

}  // namespace

std::shared_ptr<const MetamodelSet> graph_metamodels() {
    static const auto mm = load(kGraph);
    return mm;
}

std::shared_ptr<const MetamodelSet> shop_metamodels() {
    static const auto mm = load(kShop);
    return mm;
}

Model random_graph_model(std::mt19937_64& rng, std::size_t max_elements) {
    auto mm = graph_metamodels();
    Model m(mm);
    const auto leaf = mm->resolve_class("g.g.Leaf");
    const auto box = mm->resolve_class("g.g.Box");
    const auto tag = mm->resolve_class("g.g.Tag");
    const auto label = mm->resolve_feature("g.g.Node.label");
    const auto links = mm->resolve_feature("g.g.Node.links");
    const auto children = mm->resolve_feature("g.g.Node.children");
    const auto first = mm->resolve_feature("g.g.Box.first");
    const auto parts = mm->resolve_feature("g.g.Box.parts");
    const auto owner = mm->resolve_feature("g.g.Tag.owner");
    const auto refs = mm->resolve_feature("g.g.Tag.refs");
    const std::vector<std::string> uris{"a", "b", "c"};

    const auto target = std::uniform_int_distribution<std::size_t>(1, std::max<std::size_t>(1, max_elements))(rng);
    std::vector<ElementId> nodes;
    std::vector<ElementId> boxes;
    std::vector<ElementId> leaves;
    std::vector<ElementId> tags;
    for (std::size_t i = 0; i < target; ++i) {
        const auto roll = std::uniform_int_distribution<int>(0, 9)(rng);
        ElementId e;
        if (roll == 0) {
            e = m.create_element(pick(rng, uris), tag);
            tags.push_back(e);
            continue;
        }
        const auto cls = roll < 5 ? leaf : box;
        if (nodes.empty() || chance(rng, 0.1)) {
            e = m.create_element(pick(rng, uris), cls);
        } else if (cls == leaf && !boxes.empty() && chance(rng, 0.4)) {
            e = m.create_child(pick(rng, boxes), parts, cls);
        } else {
            e = m.create_child(pick(rng, nodes), children, cls);
        }
        if (chance(rng, 0.3)) m.set_attribute(e, label, std::string("n") + std::to_string(i));
        nodes.push_back(e);
        (cls == leaf ? leaves : boxes).push_back(e);
    }

    auto live = [&](std::vector<ElementId>& v) {
        std::erase_if(v, [&](ElementId e) { return !m.contains(e); });
    };
    auto wire = [&] {
        live(nodes);
        live(boxes);
        live(leaves);
        live(tags);
        for (auto e : nodes) {
            const auto k = std::uniform_int_distribution<int>(0, 3)(rng);
            for (int j = 0; j < k && !nodes.empty(); ++j) m.add_reference(e, links, pick(rng, nodes));
        }
        for (auto b : boxes) {
            if (!leaves.empty() && chance(rng, 0.5)) m.set_references(b, first, {pick(rng, leaves)});
        }
        for (auto t : tags) {
            if (!boxes.empty() && chance(rng, 0.6)) m.set_references(t, owner, {pick(rng, boxes)});
            const auto k = std::uniform_int_distribution<int>(0, 4)(rng);
            for (int j = 0; j < k && !nodes.empty(); ++j) m.add_reference(t, refs, pick(rng, nodes));
        }
    };
    wire();

    // Mutations that exercise index maintenance.
    const auto edits = std::uniform_int_distribution<int>(0, 8)(rng);
    for (int i = 0; i < edits; ++i) {
        live(nodes);
        if (nodes.empty()) break;
        const auto e = pick(rng, nodes);
        switch (std::uniform_int_distribution<int>(0, 4)(rng)) {
            case 0: m.delete_element(e); break;
            case 1: {
                auto current = m.references(e, links);
                if (!current.empty()) m.remove_reference(e, links, current[0]);
                break;
            }
            case 2: m.move_to_resource(e, pick(rng, uris)); break;
            case 3: m.detach(e); break;
            default: {
                std::vector<ElementId> replacement;
                for (auto x : nodes) {
                    if (chance(rng, 0.05)) replacement.push_back(x);
                }
                m.set_references(e, links, replacement);
            }
        }
    }
    if (chance(rng, 0.5)) wire();
    return m;
}

std::vector<ElementId> brute_force_inverse(const Model& model, ElementId element, FeatureId feature) {
    std::vector<ElementId> out;
    for (auto x : model.elements()) {
        if (!model.metamodels().has_feature(model.class_of(x), feature)) continue;
        for (auto t : model.references(x, feature)) {
            if (t == element) {
                out.push_back(x);
                break;
            }
        }
    }
    return out;
}

std::string inverse_mismatch(const Model& model) {
    const auto& mm = model.metamodels();
    std::vector<FeatureId> refs;
    for (auto c : mm.classifiers()) {
        for (auto f : mm.classifier(c).features) {
            if (mm.feature(f).is_reference()) refs.push_back(f);
        }
    }
    for (auto e : model.elements()) {
        for (auto f : refs) {
            if (model.get_inverse(e, f) != brute_force_inverse(model, e, f)) {
                return "get_inverse(" + model.id_of(e) + ", " + mm.fqn(f) + ") differs from the scan";
            }
        }
    }
    return {};
}

Model random_shop_model(std::mt19937_64& rng, std::size_t max_items) {
    auto mm = shop_metamodels();
    Model m(mm);
    const auto store = mm->resolve_class("shop.shop.Store");
    const auto item = mm->resolve_class("shop.shop.Item");
    const auto items = mm->resolve_feature("shop.shop.Store.items");
    const auto name = mm->resolve_feature("shop.shop.Item.name");
    const auto next = mm->resolve_feature("shop.shop.Item.next");
    const auto color = mm->resolve_feature("shop.shop.Item.color");
    const std::vector<std::string> literals{"Red", "Green", "Blue"};

    std::vector<ElementId> stores;
    const auto n_stores = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int i = 0; i < n_stores; ++i) stores.push_back(m.create_element(chance(rng, 0.5) ? "s1" : "s2", store));
    std::vector<ElementId> all;
    const auto n = std::uniform_int_distribution<std::size_t>(0, max_items)(rng);
    for (std::size_t i = 0; i < n; ++i) {
        auto e = m.create_child(pick(rng, stores), items, item);
        m.set_attribute(e, name, "item" + std::to_string(i));
        m.set_attribute(e, color, pick(rng, literals));
        all.push_back(e);
    }
    for (auto e : all) {
        if (chance(rng, 0.4)) m.set_references(e, next, {pick(rng, all)});
    }
    return m;
}

std::string workspace_image(const MetamodelSet& metamodels, const std::vector<Model>& models) {
    std::string out;
    for (const auto& doc : metamodels.to_json()) out += dump_json(doc) + "\n";
    for (const auto& m : models) out += dump_model(m) + "\n";
    return out;
}

}  // namespace coevo::testkit
