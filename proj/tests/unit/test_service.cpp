#include <gtest/gtest.h>

#include <filesystem>
#include <thread>

#include "coevo/service.hpp"
#include "httplib.h"
#include "support.hpp"

using namespace coevo;

namespace {

using Query = std::multimap<std::string, std::string>;

HttpResponse post(BrowserService& s, const std::string& path, const json& body) { return s.handle("POST", path, {}, body.dump()); }
HttpResponse get(BrowserService& s, const std::string& path, const Query& q = {}) { return s.handle("GET", path, q, ""); }

json shop_model() {
    return json::parse(R"({"resources":[{"uri":"r","roots":["s"]}],"elements":[
        {"id":"s","class":"shop.shop.Store","slots":{"items":["i","j"]}},
        {"id":"i","class":"shop.shop.Item","slots":{"name":"a","color":"Red"}},
        {"id":"j","class":"shop.shop.Item","slots":{"name":"b","color":"Blue"}}]})");
}

std::string shop_session(BrowserService& s) {
    auto r = post(s, "/sessions", {{"metamodels", {testkit::shop_metamodels()->to_json("shop")}}, {"models", {{"m", shop_model()}}}});
    EXPECT_EQ(r.status, 201) << r.body.dump();
    return r.body["id"];
}

const json& op_named(const json& ops, const std::string& name) {
    for (const auto& o : ops) {
        if (o["name"] == name) return o;
    }
    throw std::runtime_error("no operation " + name);
}

}  // namespace

TEST(Service, OperationBrowserFlow) {
    BrowserService s;
    auto id = shop_session(s);
    const auto base = "/sessions/" + id;

    auto ops = get(s, base + "/operations", {{"selection", "shop.shop.Item.color"}});
    ASSERT_EQ(ops.status, 200);
    const auto& e2s = op_named(ops.body["operations"], "enumToSubclasses");
    EXPECT_TRUE(e2s["applicable"].get<bool>());
    EXPECT_EQ(e2s["prefilled"]["attribute"], "shop.shop.Item.color");

    auto disabled = get(s, base + "/operations", {{"selection", "shop.shop.Item.name"}});
    const auto& off = op_named(disabled.body["operations"], "enumToSubclasses");
    EXPECT_FALSE(off["applicable"].get<bool>());
    EXPECT_EQ(off["messages"], json::array({"[C1] attribute must have an enumeration type"}));

    auto applied = post(s, base + "/operations/enumToSubclasses", {{"bindings", e2s["prefilled"]}, {"revision", 0}});
    ASSERT_EQ(applied.status, 200) << applied.body.dump();
    EXPECT_EQ(applied.body["revision"], 1);
    EXPECT_EQ(applied.body["label"], "enumToSubclasses(attribute=shop.shop.Item.color)");

    auto history = get(s, base + "/history");
    ASSERT_EQ(history.body["releases"].size(), 1U);
    EXPECT_EQ(history.body["releases"][0]["records"].size(), 1U);
    EXPECT_FALSE(history.body["releases"][0]["sealed"].get<bool>());

    auto mm = get(s, base + "/metamodels");
    EXPECT_EQ(mm.body["metamodels"][0]["name"], "shop");

    auto migrated = post(s, base + "/migrate", {{"model", "m"}});
    ASSERT_EQ(migrated.status, 200) << migrated.body.dump();
    EXPECT_EQ(migrated.body["model"]["elements"][1]["class"], "shop.shop.Red");
    EXPECT_EQ(migrated.body["model"]["elements"][2]["class"], "shop.shop.Blue");

    auto released = post(s, base + "/release", {{"revision", 1}});
    EXPECT_EQ(released.status, 200);
    EXPECT_EQ(released.body["releases"], 2);
    EXPECT_EQ(post(s, base + "/release", json::object()).status, 409);
}

TEST(Service, StaleRevisionAndFailuresKeepRevision) {
    BrowserService s;
    const auto base = "/sessions/" + shop_session(s);
    json rename = {{"bindings", {{"element", "shop.shop.Item"}, {"newName", "Thing"}}}, {"revision", 0}};
    ASSERT_EQ(post(s, base + "/operations/rename", rename).status, 200);
    auto stale = post(s, base + "/operations/rename", rename);
    EXPECT_EQ(stale.status, 409);
    EXPECT_EQ(stale.body["code"], "conflict");
    EXPECT_EQ(stale.body["revision"], 1);

    auto refused = post(s, base + "/operations/rename", {{"bindings", {{"element", "shop.shop.Thing"}, {"newName", "Store"}}}});
    EXPECT_EQ(refused.status, 422);
    EXPECT_EQ(refused.body["code"], "constraint-violation");
    EXPECT_EQ(refused.body["revision"], 1);

    auto broken = post(s, base + "/operations/createAttribute",
                       {{"bindings", {{"class", "shop.shop.Thing"}, {"name", "x"}, {"type", "string"}, {"lower", 1}}}});
    EXPECT_EQ(broken.status, 422);
    auto bad_binding = post(s, base + "/operations/rename", {{"bindings", {{"element", "shop.shop.Nope"}, {"newName", "X"}}}});
    EXPECT_EQ(bad_binding.status, 400);
    EXPECT_EQ(bad_binding.body["code"], "binding-error");
    EXPECT_EQ(get(s, base + "/history").body["revision"], 1);
}

TEST(Service, NotFoundCases) {
    BrowserService s;
    EXPECT_EQ(get(s, "/sessions/s99/history").status, 404);
    EXPECT_EQ(get(s, "/elsewhere").status, 404);
    const auto base = "/sessions/" + shop_session(s);
    auto op = post(s, base + "/operations/explode", json::object());
    EXPECT_EQ(op.status, 404);
    EXPECT_EQ(op.body["code"], "unknown-operation");
    EXPECT_EQ(post(s, base + "/migrate", {{"model", "nope"}}).status, 404);
    EXPECT_EQ(s.handle("POST", "/sessions", {}, "{not json").status, 400);
    EXPECT_EQ(post(s, "/sessions", json::object()).status, 400);
}

TEST(Service, CaseSessionMigratesFixture) {
    BrowserService s;
    auto created = post(s, "/sessions", {{"case", true}});
    ASSERT_EQ(created.status, 201);
    EXPECT_EQ(created.body["models"], json::array({"f1"}));
    const auto base = "/sessions/" + created.body["id"].get<std::string>();
    auto history = get(s, base + "/history");
    EXPECT_EQ(history.body["releases"][0]["records"].size(), 9U);
    auto migrated = post(s, base + "/migrate", {{"model", "f1"}});
    ASSERT_EQ(migrated.status, 200) << migrated.body.dump();
    EXPECT_EQ(migrated.body["report"].size(), 5U);
    EXPECT_EQ(migrated.body["steps"].size(), 5U);
    auto dumped = migrated.body["model"].dump();
    EXPECT_NE(dumped.find("statemachine"), std::string::npos);
}

TEST(Service, SaveOnlyInsideSaveDirectory) {
    const auto dir = std::filesystem::temp_directory_path() / ("coevo-save-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    {
        BrowserService disabled;
        const auto base = "/sessions/" + shop_session(disabled);
        EXPECT_EQ(post(disabled, base + "/save", {{"file", "h.json"}}).status, 403);
        EXPECT_EQ(post(disabled, base + "/save", json::object()).status, 200);
    }
    BrowserService s(dir);
    const auto base = "/sessions/" + shop_session(s);
    EXPECT_EQ(post(s, base + "/save", {{"file", "../escape.json"}}).status, 400);
    auto saved = post(s, base + "/save", {{"file", "h.json"}});
    ASSERT_EQ(saved.status, 200);
    EXPECT_TRUE(std::filesystem::exists(dir / "h.json"));
    auto reloaded = post(s, "/sessions", {{"history", json::parse(testkit::read_text((dir / "h.json").string()))}});
    EXPECT_EQ(reloaded.status, 201);
    std::filesystem::remove_all(dir);
}

TEST(Service, ConcurrentMutationsAreSerialized) {
    BrowserService s;
    const auto base = "/sessions/" + shop_session(s);
    std::atomic<int> ok{0};
    std::atomic<int> conflicts{0};
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i) {
        threads.emplace_back([&, i] {
            json body = {{"bindings", {{"class", "shop.shop.Store"}, {"name", "f" + std::to_string(i)}, {"type", "string"}}},
                         {"revision", 0}};
            auto r = post(s, base + "/operations/createAttribute", body);
            (r.status == 200 ? ok : conflicts)++;
        });
    }
    for (auto& t : threads) t.join();
    EXPECT_EQ(ok.load(), 1);
    EXPECT_EQ(conflicts.load(), 7);

    threads.clear();
    for (int i = 0; i < 8; ++i) {
        threads.emplace_back([&, i] {
            post(s, base + "/operations/createAttribute",
                 {{"bindings", {{"class", "shop.shop.Item"}, {"name", "g" + std::to_string(i)}, {"type", "integer"}}}});
        });
    }
    for (auto& t : threads) t.join();
    auto history = get(s, base + "/history");
    EXPECT_EQ(history.body["revision"], 9);
    EXPECT_EQ(history.body["releases"][0]["records"].size(), 9U);
}

TEST(Service, LiveHttp) {
    BrowserService s;
    const int port = s.start_background("127.0.0.1");
    ASSERT_GT(port, 0);
    httplib::Client client("127.0.0.1", port);
    auto created = client.Post("/sessions", R"({"case": true})", "application/json");
    ASSERT_TRUE(created);
    EXPECT_EQ(created->status, 201);
    auto id = json::parse(created->body)["id"].get<std::string>();
    auto ops = client.Get("/sessions/" + id + "/operations?selection=java.java.Class.abstract");
    ASSERT_TRUE(ops);
    EXPECT_EQ(ops->status, 200);
    const auto listed = json::parse(ops->body);
    const auto& e2s = op_named(listed["operations"], "enumToSubclasses");
    EXPECT_FALSE(e2s["applicable"].get<bool>());
    auto missing = client.Get("/sessions/nope/history");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);
    s.stop();
}

TEST(Service, AddedModelsBecomeVisibleToConstraints) {
    BrowserService s;
    auto created = post(s, "/sessions", {{"metamodels", {testkit::shop_metamodels()->to_json("shop")}}});
    const auto base = "/sessions/" + created.body["id"].get<std::string>();
    json mandatory = {{"bindings", {{"class", "shop.shop.Item"}, {"name", "sku"}, {"type", "string"}, {"lower", 1}}}};
    ASSERT_EQ(post(s, base + "/operations/rename", {{"bindings", {{"element", "shop.shop.Item"}, {"newName", "Thing"}}}}).status, 200);
    // models are given at the initial metamodels and replayed
    auto added = post(s, base + "/models", {{"name", "m"}, {"model", shop_model()}, {"revision", 1}});
    ASSERT_EQ(added.status, 200) << added.body.dump();
    mandatory["bindings"]["class"] = "shop.shop.Thing";
    auto refused = post(s, base + "/operations/createAttribute", mandatory);
    EXPECT_EQ(refused.status, 422);
    EXPECT_EQ(refused.body["messages"], json::array({"[lower-zero] lower bound must be 0 when instances of the class exist"}));
    auto bad = post(s, base + "/models", {{"name", "broken"}, {"model", {{"resources", json::array()}, {"elements", json::array({{{"id", "x"}, {"class", "shop.shop.Item"}, {"slots", json::object()}}})}}}});
    EXPECT_EQ(bad.status, 422);
    EXPECT_EQ(post(s, base + "/operations/createAttribute", mandatory).status, 422);
}
