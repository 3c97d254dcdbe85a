#include <gtest/gtest.h>

#include <random>

#include "coevo/bench.hpp"
#include "coevo/conformance.hpp"
#include "coevo/error.hpp"
#include "coevo/model.hpp"
#include "support.hpp"

using namespace coevo;
using coevo::testkit::graph_metamodels;

namespace {

struct Graph {
    std::shared_ptr<const MetamodelSet> mm = graph_metamodels();
    ClassifierId leaf = mm->resolve_class("g.g.Leaf");
    ClassifierId box = mm->resolve_class("g.g.Box");
    ClassifierId node = mm->resolve_class("g.g.Node");
    ClassifierId tag = mm->resolve_class("g.g.Tag");
    FeatureId label = mm->resolve_feature("g.g.Node.label");
    FeatureId links = mm->resolve_feature("g.g.Node.links");
    FeatureId children = mm->resolve_feature("g.g.Node.children");
    FeatureId first = mm->resolve_feature("g.g.Box.first");
    FeatureId parts = mm->resolve_feature("g.g.Box.parts");
    FeatureId refs = mm->resolve_feature("g.g.Tag.refs");
};

}  // namespace

TEST(Model, DocumentOrderIsDepthFirst) {
    Graph g;
    Model m(g.mm);
    auto root = m.create_element("r", g.box);
    auto a = m.create_child(root, g.children, g.leaf);
    auto p = m.create_child(root, g.parts, g.leaf);
    auto b = m.create_child(a, g.children, g.leaf);
    auto second = m.create_element("r", g.leaf);
    // all_features order: label, links, children, first, parts
    EXPECT_EQ(m.elements(), (std::vector<ElementId>{root, a, b, p, second}));
    EXPECT_EQ(m.subtree(a), (std::vector<ElementId>{a, b}));
    EXPECT_EQ(m.container(b), a);
    EXPECT_EQ(m.containing_feature(p), g.parts);
    EXPECT_EQ(m.root_resource(second), "r");
}

TEST(Model, InverseFollowsDocumentOrder) {
    Graph g;
    Model m(g.mm);
    auto root = m.create_element("r", g.box);
    auto x = m.create_child(root, g.children, g.leaf);
    auto y = m.create_child(root, g.children, g.leaf);
    auto z = m.create_child(root, g.children, g.leaf);
    m.add_reference(z, g.links, x);
    m.add_reference(y, g.links, x);
    m.add_reference(root, g.links, x);
    EXPECT_EQ(m.get_inverse(x, g.links), (std::vector<ElementId>{root, y, z}));
    m.remove_reference(y, g.links, x);
    EXPECT_EQ(m.get_inverse(x, g.links), (std::vector<ElementId>{root, z}));
    m.delete_element(z);
    EXPECT_EQ(m.get_inverse(x, g.links), std::vector<ElementId>{root});
    EXPECT_TRUE(m.get_inverse(root, g.links).empty());
    EXPECT_THROW((void)m.get_inverse(x, g.label), ModelError);
}

TEST(Model, InverseOfContainmentIsContainer) {
    Graph g;
    Model m(g.mm);
    auto root = m.create_element("r", g.box);
    auto a = m.create_child(root, g.parts, g.leaf);
    EXPECT_EQ(m.get_inverse(a, g.parts), std::vector<ElementId>{root});
    auto other = m.create_element("r", g.box);
    m.add_reference(other, g.parts, a);
    EXPECT_EQ(m.container(a), other);
    EXPECT_EQ(m.get_inverse(a, g.parts), std::vector<ElementId>{other});
    EXPECT_TRUE(m.references(root, g.parts).empty());
}

TEST(Model, InverseMatchesBruteForceOnRandomModels) {
    for (std::uint64_t seed = 1000; seed < 1060; ++seed) {
        std::mt19937_64 rng(seed);
        auto m = testkit::random_graph_model(rng, 120);
        ASSERT_EQ(testkit::inverse_mismatch(m), "") << "seed " << seed;
    }
}

TEST(Model, InverseSurvivesCopyAndReload) {
    std::mt19937_64 rng(5);
    auto m = testkit::random_graph_model(rng, 150);
    Model copy = m;
    EXPECT_EQ(testkit::inverse_mismatch(copy), "");
    auto reloaded = parse_model(m.metamodels_ptr(), dump_model(m));
    EXPECT_EQ(testkit::inverse_mismatch(reloaded), "");
    EXPECT_TRUE(isomorphic(m, reloaded));
}

TEST(Model, DeleteRemovesIncomingReferences) {
    Graph g;
    Model m(g.mm);
    auto root = m.create_element("r", g.box);
    auto a = m.create_child(root, g.parts, g.leaf);
    auto t = m.create_element("tags", g.tag);
    m.add_reference(t, g.refs, a);
    m.set_references(root, g.first, {a});
    m.delete_element(a);
    EXPECT_TRUE(m.references(t, g.refs).empty());
    EXPECT_FALSE(m.is_set(root, g.first));
    EXPECT_FALSE(m.contains(a));
    EXPECT_EQ(m.size(), 2U);
}

TEST(Model, ContainerOfTypeIncludesSelf) {
    Graph g;
    Model m(g.mm);
    auto root = m.create_element("r", g.box);
    auto a = m.create_child(root, g.children, g.leaf);
    auto b = m.create_child(a, g.children, g.leaf);
    EXPECT_EQ(m.get_container_of_type(b, g.leaf), b);
    EXPECT_EQ(m.get_container_of_type(b, g.box), root);
    EXPECT_EQ(m.get_container_of_type(b, g.node), b);
    EXPECT_FALSE(m.get_container_of_type(b, g.tag).has_value());
}

TEST(Model, SlotTypeChecks) {
    Graph g;
    Model m(g.mm);
    auto root = m.create_element("r", g.box);
    auto t = m.create_element("r", g.tag);
    EXPECT_THROW(m.set_attribute(root, g.label, true), ModelError);
    EXPECT_THROW(m.add_reference(root, g.links, t), ModelError);
    EXPECT_THROW(m.set_attribute(t, g.label, std::string("x")), ModelError);
    EXPECT_THROW(m.create_element("r", g.node), ModelError);
    EXPECT_THROW(m.add_reference(root, g.children, root), ModelError);
}

TEST(Model, ContainmentCycleRejected) {
    Graph g;
    Model m(g.mm);
    auto root = m.create_element("r", g.box);
    auto a = m.create_child(root, g.children, g.box);
    EXPECT_THROW(m.add_reference(a, g.children, root), ModelError);
}

TEST(Model, ExtractKeepsSelectedResources) {
    Graph g;
    Model m(g.mm);
    auto a = m.create_element("a", g.box);
    auto b = m.create_element("b", g.leaf);
    m.create_child(a, g.parts, g.leaf);
    std::vector<std::string> keep{"a"};
    auto only_a = m.extract(keep);
    EXPECT_EQ(only_a.size(), 2U);
    EXPECT_EQ(only_a.resources().size(), 1U);
    m.add_reference(a, g.links, b);
    EXPECT_THROW((void)m.extract(keep), ModelError);
}

TEST(Model, SaveLoadRoundTrip) {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 20; ++i) {
        auto m = testkit::random_graph_model(rng, 80);
        auto text = dump_model(m);
        auto back = parse_model(m.metamodels_ptr(), text);
        EXPECT_EQ(dump_model(back), text);
    }
}

TEST(Model, IsomorphismIgnoresIds) {
    Graph g;
    Model m1(g.mm);
    auto r1 = m1.create_element("r", g.box);
    auto x1 = m1.create_child(r1, g.children, g.leaf);
    m1.add_reference(r1, g.links, x1);
    auto text = dump_model(m1);
    // same structure under different ids
    std::string renamed = text;
    for (const auto& [from, to] : std::vector<std::pair<std::string, std::string>>{{"\"e1\"", "\"zz\""}, {"\"e2\"", "\"yy\""}}) {
        for (auto pos = renamed.find(from); pos != std::string::npos; pos = renamed.find(from)) renamed.replace(pos, from.size(), to);
    }
    auto m2 = parse_model(g.mm, renamed);
    EXPECT_NE(dump_model(m2), text);
    EXPECT_TRUE(isomorphic(m1, m2));
    m2.set_attribute(m2.at("yy"), g.label, std::string("l"));
    EXPECT_FALSE(isomorphic(m1, m2));
    EXPECT_TRUE(first_difference(m1, m2).has_value());
}

TEST(Model, LoadRejectsUnknownIds) {
    auto mm = graph_metamodels();
    EXPECT_THROW((void)parse_model(mm, R"({"resources":[{"uri":"r","roots":["x"]}],"elements":[]})"), Error);
    EXPECT_THROW((void)parse_model(mm, R"({"resources":[],"elements":[{"id":"a","class":"g.g.Nope","slots":{}}]})"),
                 Error);
}

TEST(Bench, InverseBenchReportsMedians) {
    auto result = bench_inverse(500, 200, 3);
    ASSERT_TRUE(result.forward_median_ns && result.inverse_median_ns);
    EXPECT_EQ(result.query_elements.size(), 400U);
    EXPECT_EQ(bench_model(500, 3).size(), 500U);
    EXPECT_TRUE(bench_inverse(100, 0, 3).to_json().empty());
    EXPECT_EQ(dump_model(bench_model(300, 9)), dump_model(bench_model(300, 9)));
}
