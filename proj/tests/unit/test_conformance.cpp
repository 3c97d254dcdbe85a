#include <gtest/gtest.h>

#include <random>

#include <algorithm>

#include "coevo/conformance.hpp"
#include "support.hpp"

using namespace coevo;

namespace {

bool has_rule(const std::vector<ConformanceViolation>& vs, Rule rule) {
    return std::any_of(vs.begin(), vs.end(), [&](const auto& v) { return v.rule == rule; });
}

struct Shop {
    std::shared_ptr<const MetamodelSet> mm = testkit::shop_metamodels();
    ClassifierId store = mm->resolve_class("shop.shop.Store");
    ClassifierId item = mm->resolve_class("shop.shop.Item");
    FeatureId items = mm->resolve_feature("shop.shop.Store.items");
    FeatureId name = mm->resolve_feature("shop.shop.Item.name");
    FeatureId color = mm->resolve_feature("shop.shop.Item.color");
};

}  // namespace

TEST(Conformance, ValidModelHasNoViolations) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) EXPECT_TRUE(check_conformance(testkit::random_shop_model(rng, 20)).empty());
}

TEST(Conformance, MissingMandatorySlot) {
    Shop s;
    Model m(s.mm);
    auto st = m.create_element("r", s.store);
    auto it = m.create_child(st, s.items, s.item);
    m.set_attribute(it, s.color, std::string("Red"));
    auto vs = check_conformance(m);
    ASSERT_EQ(vs.size(), 1U);
    EXPECT_EQ(vs[0].rule, Rule::MultiplicityLower);
    EXPECT_EQ(vs[0].feature, "shop.shop.Item.name");
    EXPECT_NE(format_violation(vs[0]).find("shop.shop.Item.name"), std::string::npos);
    EXPECT_TRUE(check_conformance(m, {Rule::MultiplicityLower}).empty());
}

TEST(Conformance, BadLiteralIsReported) {
    Shop s;
    Model m(s.mm);
    auto st = m.create_element("r", s.store);
    auto it = m.create_child(st, s.items, s.item);
    m.set_attribute(it, s.name, std::string("a"));
    EXPECT_ANY_THROW(m.set_attribute(it, s.color, std::string("Purple")));
}

TEST(Conformance, DetachedElementIsReported) {
    Shop s;
    Model m(s.mm);
    auto st = m.create_element("r", s.store);
    auto it = m.create_child(st, s.items, s.item);
    m.set_attribute(it, s.name, std::string("a"));
    m.set_attribute(it, s.color, std::string("Red"));
    m.detach(it);
    EXPECT_TRUE(has_rule(check_conformance(m), Rule::ContainmentViolation));
}

TEST(Conformance, AbstractInstanceWhileSoftened) {
    auto mm = testkit::graph_metamodels();
    Model m(mm);
    m.set_softened(true);
    m.create_element("r", mm->resolve_class("g.g.Node"));
    m.set_softened(false);
    auto vs = check_conformance(m);
    EXPECT_TRUE(has_rule(vs, Rule::AbstractInstantiation));
    EXPECT_TRUE(check_conformance(m, softened_rules()).empty());
}

TEST(Conformance, UpperBoundViolationAfterMetamodelChange) {
    Shop s;
    auto narrowed = std::make_shared<MetamodelSet>(*s.mm);
    auto m = [&] {
        Model base(s.mm);
        auto st = base.create_element("r", s.store);
        for (int i = 0; i < 3; ++i) {
            auto it = base.create_child(st, s.items, s.item);
            base.set_attribute(it, s.name, std::string("a"));
            base.set_attribute(it, s.color, std::string("Red"));
        }
        return base;
    }();
    narrowed->set_upper(narrowed->resolve_feature("shop.shop.Store.items"), 2);
    auto rebound = rebind(m, narrowed);
    auto vs = check_conformance(rebound);
    ASSERT_FALSE(vs.empty());
    EXPECT_TRUE(has_rule(vs, Rule::MultiplicityUpper));
}
