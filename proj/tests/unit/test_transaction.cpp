#include <gtest/gtest.h>

#include <random>

#include "coevo/conformance.hpp"
#include "coevo/error.hpp"
#include "coevo/transaction.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace coevo;

namespace {

Workspace shop_workspace(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Workspace ws(*testkit::shop_metamodels());
    ws.attach(testkit::random_shop_model(rng, 15));
    ws.attach(testkit::random_shop_model(rng, 15));
    return ws;
}

std::string image(const Workspace& ws) { return testkit::workspace_image(*ws.metamodels, ws.models); }

}  // namespace

TEST(Transaction, CommitsConformingChanges) {
    auto ws = shop_workspace(1);
    execute_transaction(ws, [](Workspace& w) {
        auto item = w.metamodels->resolve_class("shop.shop.Item");
        auto sku = w.metamodels->add_attribute(item, "sku", ValueType::String, {}, 1, 1);
        for (auto& m : w.models) {
            for (auto e : m.instances_of(item)) m.set_attribute(e, sku, std::string("k"));
        }
    });
    EXPECT_TRUE(ws.metamodels->find_feature("shop.shop.Item.sku"));
    EXPECT_TRUE(conformance_messages(ws.models).empty());
}

TEST(Transaction, ViolationRollsBackBitIdentically) {
    auto ws = shop_workspace(2);
    const auto before = image(ws);
    const auto gen = ws.metamodels->generation();
    try {
        execute_transaction(ws, [](Workspace& w) {
            auto store = w.metamodels->resolve_class("shop.shop.Store");
            w.metamodels->add_attribute(store, "owner", ValueType::String, {}, 1, 1);
        });
        FAIL() << "expected TransactionError";
    } catch (const TransactionError& e) {
        ASSERT_FALSE(e.messages().empty());
        EXPECT_NE(e.messages().front().find("shop.shop.Store.owner"), std::string::npos) << e.messages().front();
    }
    EXPECT_EQ(image(ws), before);
    EXPECT_EQ(ws.metamodels->generation(), gen);
    for (const auto& m : ws.models) EXPECT_EQ(&m.metamodels(), ws.metamodels.get());
}

TEST(Transaction, ExceptionRollsBackAndPropagates) {
    auto ws = shop_workspace(3);
    const auto before = image(ws);
    EXPECT_THROW(execute_transaction(ws,
                                     [](Workspace& w) {
                                         w.metamodels->rename(w.metamodels->resolve_class("shop.shop.Item"), "Thing");
                                         for (auto& m : w.models) {
                                             for (auto e : m.elements()) {
                                                 if (m.contains(e)) m.delete_element(e);
                                             }
                                         }
                                         throw MigrationError("stop");
                                     }),
                 MigrationError);
    EXPECT_EQ(image(ws), before);
}

TEST(Transaction, SoftenedInsideBoundary) {
    Workspace ws(*testkit::graph_metamodels());
    ws.attach(Model(std::make_shared<const MetamodelSet>(*testkit::graph_metamodels())));
    // Abstract instances are allowed inside, but must be gone at the boundary.
    execute_transaction(ws, [](Workspace& w) {
        auto& m = w.models.front();
        EXPECT_TRUE(m.softened());
        auto e = m.create_element("r", w.metamodels->resolve_class("g.g.Node"));
        m.retype(e, w.metamodels->resolve_class("g.g.Leaf"));
    });
    EXPECT_FALSE(ws.models.front().softened());
    EXPECT_EQ(ws.models.front().size(), 1U);
}

TEST(Transaction, EntryMustConform) {
    auto mm = testkit::shop_metamodels();
    Workspace ws(*mm);
    Model m(mm);
    auto st = m.create_element("r", mm->resolve_class("shop.shop.Store"));
    m.create_child(st, mm->resolve_feature("shop.shop.Store.items"), mm->resolve_class("shop.shop.Item"));
    ws.attach(m);
    EXPECT_THROW(execute_transaction(ws, [](Workspace&) {}), TransactionError);
}

TEST(Transaction, InapplicableSlotsDroppedOnCommit) {
    auto ws = shop_workspace(4);
    execute_transaction(ws, [](Workspace& w) {
        w.metamodels->remove_feature(w.metamodels->resolve_feature("shop.shop.Item.next"));
    });
    EXPECT_TRUE(conformance_messages(ws.models).empty());
    auto reloaded = parse_model(std::make_shared<const MetamodelSet>(*ws.metamodels), dump_model(ws.models.front()));
    EXPECT_EQ(dump_model(reloaded), dump_model(ws.models.front()));
}

TEST(Transaction, AdversarialSuite) {
    auto outcome = testkit::transaction_suite(6, 99);
    EXPECT_TRUE(outcome.ok) << outcome.detail;
}

TEST(Transaction, CloneIsIndependent) {
    auto ws = shop_workspace(5);
    auto copy = ws.clone();
    copy.metamodels->rename(copy.metamodels->resolve_class("shop.shop.Store"), "Shop");
    EXPECT_TRUE(ws.metamodels->find_classifier("shop.shop.Store"));
    EXPECT_EQ(&copy.models.front().metamodels(), copy.metamodels.get());
}
