#include <gtest/gtest.h>

#include "coevo/error.hpp"
#include "coevo/metamodel.hpp"
#include "support.hpp"

using namespace coevo;

namespace {

MetamodelSet parse_one(const std::string& text) {
    std::vector<std::string> texts{text};
    return MetamodelSet::parse(texts);
}

const char* const kTwoLevel = R"({"name": "m", "packages": [{"name": "p", "classifiers": [
  {"kind": "class", "name": "A", "abstract": true, "super": [], "features": [
    {"kind": "attribute", "name": "x", "type": "integer", "lower": 0, "upper": 1}]},
  {"kind": "class", "name": "B", "abstract": false, "super": ["m.p.A"], "features": [
    {"kind": "reference", "name": "to", "target": "m.p.A", "containment": false, "lower": 0, "upper": "*"}]}
]}]})";

}  // namespace

TEST(Metamodel, ResolvesFullyQualifiedNames) {
    auto mm = parse_one(kTwoLevel);
    auto a = mm.resolve_class("m.p.A");
    auto b = mm.resolve_class("m.p.B");
    EXPECT_EQ(mm.fqn(a), "m.p.A");
    EXPECT_EQ(mm.fqn(mm.resolve_feature("m.p.B.to")), "m.p.B.to");
    EXPECT_TRUE(mm.is_subtype(b, a));
    EXPECT_FALSE(mm.is_subtype(a, b));
    EXPECT_EQ(mm.direct_subtypes(a), std::vector<ClassifierId>{b});
}

TEST(Metamodel, InheritedFeaturesComeFirst) {
    auto mm = parse_one(kTwoLevel);
    auto all = mm.all_features(mm.resolve_class("m.p.B"));
    ASSERT_EQ(all.size(), 2U);
    EXPECT_EQ(mm.feature(all[0]).name, "x");
    EXPECT_EQ(mm.feature(all[1]).name, "to");
    EXPECT_EQ(mm.feature(all[1]).upper, kUnbounded);
}

TEST(Metamodel, UnresolvedNameReportsSegment) {
    auto mm = parse_one(kTwoLevel);
    try {
        (void)mm.resolve_feature("m.p.Q.x");
        FAIL() << "expected ResolveError";
    } catch (const ResolveError& e) {
        EXPECT_EQ(e.segment(), "Q");
    }
    EXPECT_FALSE(mm.find_classifier("m.p.Nope").has_value());
}

TEST(Metamodel, ParseErrorHasPosition) {
    try {
        (void)parse_one("{\n  \"name\": \"m\",\n  \"packages\": [,]\n}");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3U);
        EXPECT_GT(e.column(), 1U);
    }
}

TEST(Metamodel, SupertypeCycleNamesClass) {
    const char* text = R"({"name": "m", "packages": [{"name": "p", "classifiers": [
      {"kind": "class", "name": "A", "abstract": false, "super": ["m.p.B"], "features": []},
      {"kind": "class", "name": "B", "abstract": false, "super": ["m.p.A"], "features": []}]}]})";
    try {
        (void)parse_one(text);
        FAIL() << "expected InvariantError";
    } catch (const InvariantError& e) {
        EXPECT_NE(std::string(e.what()).find("m.p."), std::string::npos) << e.what();
    }
}

TEST(Metamodel, RejectsBadBoundsAndDuplicates) {
    const char* bounds = R"({"name": "m", "packages": [{"name": "p", "classifiers": [
      {"kind": "class", "name": "A", "abstract": false, "super": [], "features": [
        {"kind": "attribute", "name": "x", "type": "string", "lower": 2, "upper": 1}]}]}]})";
    EXPECT_THROW((void)parse_one(bounds), InvariantError);
    const char* dup = R"({"name": "m", "packages": [{"name": "p", "classifiers": [
      {"kind": "class", "name": "A", "abstract": false, "super": [], "features": []},
      {"kind": "class", "name": "A", "abstract": false, "super": [], "features": []}]}]})";
    EXPECT_THROW((void)parse_one(dup), InvariantError);
    const char* inherited = R"({"name": "m", "packages": [{"name": "p", "classifiers": [
      {"kind": "class", "name": "A", "abstract": false, "super": [], "features": [
        {"kind": "attribute", "name": "x", "type": "string", "lower": 0, "upper": 1}]},
      {"kind": "class", "name": "B", "abstract": false, "super": ["m.p.A"], "features": [
        {"kind": "attribute", "name": "x", "type": "string", "lower": 0, "upper": 1}]}]}]})";
    EXPECT_THROW((void)parse_one(inherited), InvariantError);
}

TEST(Metamodel, CrossDocumentReferences) {
    const char* a = R"({"name": "a", "packages": [{"name": "p", "classifiers": [
      {"kind": "class", "name": "X", "abstract": false, "super": [], "features": [
        {"kind": "reference", "name": "y", "target": "b.q.Y", "containment": false, "lower": 0, "upper": 1}]}]}]})";
    const char* b = R"({"name": "b", "packages": [{"name": "q", "classifiers": [
      {"kind": "class", "name": "Y", "abstract": false, "super": [], "features": []}]}]})";
    std::vector<std::string> texts{a, b};
    auto mm = MetamodelSet::parse(texts);
    EXPECT_EQ(mm.feature(mm.resolve_feature("a.p.X.y")).target, mm.resolve_class("b.q.Y"));
}

TEST(Metamodel, DumpRoundTripsByteForByte) {
    auto mm = *testkit::shop_metamodels();
    auto text = mm.dump("shop");
    auto again = parse_one(text);
    EXPECT_EQ(again.dump("shop"), text);
    EXPECT_TRUE(again == mm);
}

TEST(Metamodel, RenameKeepsHandles) {
    auto mm = parse_one(kTwoLevel);
    auto b = mm.resolve_class("m.p.B");
    auto to = mm.resolve_feature("m.p.B.to");
    const auto gen = mm.generation();
    mm.rename(b, "C");
    EXPECT_NE(mm.generation(), gen);
    EXPECT_EQ(mm.fqn(to), "m.p.C.to");
    EXPECT_FALSE(mm.find_classifier("m.p.B"));
    EXPECT_THROW(mm.rename(b, "A"), InvariantError);
}

TEST(Metamodel, RemoveClassifierNeedsNoDependents) {
    auto mm = parse_one(kTwoLevel);
    EXPECT_THROW(mm.remove_classifier(mm.resolve_class("m.p.A")), InvariantError);
    auto b = mm.resolve_class("m.p.B");
    mm.remove_feature(mm.resolve_feature("m.p.B.to"));
    mm.remove_classifier(b);
    EXPECT_FALSE(mm.alive(b));
    EXPECT_EQ(mm.class_count(), 1U);
}

TEST(Metamodel, EnumerationTypedAttribute) {
    auto mm = *testkit::shop_metamodels();
    const auto& color = mm.feature(mm.resolve_feature("shop.shop.Item.color"));
    EXPECT_EQ(color.value_type, ValueType::Enumeration);
    EXPECT_EQ(mm.classifier(color.enum_type).literals, (std::vector<std::string>{"Red", "Green", "Blue"}));
}

TEST(Metamodel, Identifiers) {
    EXPECT_TRUE(is_identifier("State"));
    EXPECT_TRUE(is_identifier("_x1"));
    EXPECT_FALSE(is_identifier(""));
    EXPECT_FALSE(is_identifier("9a"));
    EXPECT_FALSE(is_identifier("a b"));
    EXPECT_FALSE(is_identifier("a.b"));
}
