#include "coevo/service.hpp"

#include <fstream>
#include <thread>

#include "coevo/case.hpp"
#include "coevo/error.hpp"
#include "httplib.h"

namespace coevo {

struct BrowserService::Session {
    std::string id;
    std::shared_mutex mutex;
    std::unique_ptr<Recorder> recorder;
    std::shared_ptr<const MetamodelSet> initial;
    std::map<std::string, Model> models;
    std::atomic<std::uint64_t> revision{0};
};

struct BrowserService::Server {
    httplib::Server http;
    std::thread thread;
};

namespace {

HttpResponse error(int status, std::string code, std::vector<std::string> messages) {
    return {status, {{"code", std::move(code)}, {"messages", std::move(messages)}}};
}

std::vector<std::string> split_path(std::string_view path) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start < path.size()) {
        auto end = path.find('/', start);
        if (end == std::string_view::npos) end = path.size();
        if (end > start) out.emplace_back(path.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

std::optional<std::uint64_t> revision_of(const json& body) {
    if (!body.is_object() || !body.contains("revision") || body["revision"].is_null()) return std::nullopt;
    if (!body["revision"].is_number_unsigned() && !body["revision"].is_number_integer()) {
        throw FormatError("revision must be an integer");
    }
    return body["revision"].get<std::uint64_t>();
}

json history_view(const History& h) {
    json releases = json::array();
    for (std::size_t i = 0; i < h.releases().size(); ++i) {
        json records = json::array();
        for (const auto& r : h.releases()[i]) records.push_back({{"label", r.label()}, {"record", r.to_json()}});
        releases.push_back({{"index", i}, {"sealed", i < h.sealed_count()}, {"records", std::move(records)}});
    }
    return {{"metamodels", h.metamodel_names()}, {"releases", std::move(releases)}};
}

// The recorder works on the session models replayed to the current
// metamodels, so constraints see real instances.
void sync_models(Recorder& recorder, const std::map<std::string, Model>& models) {
    recorder.detach_all();
    for (const auto& [name, model] : models) {
        std::vector<Model> input{model};
        auto result = migrate(input, recorder.history(), reeng::case_registry(), 0, std::nullopt, recorder.catalog());
        recorder.attach(result.models.front());
    }
}

bool safe_file_name(const std::string& name) {
    if (name.empty() || name == "." || name == "..") return false;
    return name.find('/') == std::string::npos && name.find('\\') == std::string::npos;
}

}  // namespace

BrowserService::BrowserService(std::optional<std::filesystem::path> save_dir) : save_dir_(std::move(save_dir)) {}

BrowserService::~BrowserService() { stop(); }

std::shared_ptr<BrowserService::Session> BrowserService::find_session(const std::string& id) const {
    std::lock_guard lock(sessions_mutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

HttpResponse BrowserService::create_session(const json& body) {
    if (!body.is_object()) throw FormatError("session body must be an object");
    auto session = std::make_shared<Session>();
    const auto& registry = reeng::case_registry();
    if (body.value("case", false)) {
        session->recorder = std::make_unique<Recorder>(reeng::build_case_history(), &registry);
    } else if (body.contains("history")) {
        session->recorder = std::make_unique<Recorder>(History::from_json(body["history"]), &registry);
    } else if (body.contains("metamodels") && body["metamodels"].is_array()) {
        std::vector<json> docs(body["metamodels"].begin(), body["metamodels"].end());
        session->recorder = std::make_unique<Recorder>(MetamodelSet::from_json(docs), &registry);
    } else {
        throw FormatError("session body needs metamodels, history or case");
    }
    session->initial = std::make_shared<const MetamodelSet>(session->recorder->history().initial_metamodels());
    if (body.value("case", false)) {
        session->models.emplace("f1", rebind(reeng::gen_fixture(3, 1, 0, 42), session->initial));
    }
    if (body.contains("models")) {
        if (!body["models"].is_object()) throw FormatError("models must map names to model documents");
        for (const auto& [name, doc] : body["models"].items()) {
            session->models.insert_or_assign(name, load_model(session->initial, doc));
        }
    }
    sync_models(*session->recorder, session->models);

    std::lock_guard lock(sessions_mutex_);
    session->id = "s" + std::to_string(next_session_++);
    sessions_.emplace(session->id, session);
    json names = session->recorder->history().metamodel_names();
    json models = json::array();
    for (const auto& [name, _] : session->models) models.push_back(name);
    return {201, {{"id", session->id}, {"revision", 0}, {"metamodels", names}, {"models", models}}};
}

HttpResponse BrowserService::handle(std::string_view method, std::string_view path,
                                    const std::multimap<std::string, std::string>& query, const std::string& text) {
    std::shared_ptr<Session> session;
    try {
        json body = text.empty() ? json::object() : parse_json(text);
        auto parts = split_path(path);
        if (parts.empty() || parts[0] != "sessions") return error(404, "not-found", {"no route for " + std::string(path)});
        if (parts.size() == 1) {
            if (method != "POST") return error(405, "method-not-allowed", {"use POST /sessions"});
            return create_session(body);
        }
        session = find_session(parts[1]);
        if (!session) return error(404, "unknown-session", {"no session '" + parts[1] + "'"});
        std::string rest;
        for (std::size_t i = 2; i < parts.size(); ++i) rest += (i > 2 ? "/" : "") + parts[i];
        return session_request(*session, method, rest, query, body);
    } catch (const ConstraintError& e) {
        auto r = error(422, "constraint-violation", e.messages());
        if (session) r.body["revision"] = session->revision.load();
        return r;
    } catch (const TransactionError& e) {
        auto r = error(422, "conformance-violation", e.messages());
        if (session) r.body["revision"] = session->revision.load();
        return r;
    } catch (const BindingError& e) {
        return error(400, "binding-error", {e.what()});
    } catch (const HistoryError& e) {
        return error(409, "history-error", {e.what()});
    } catch (const ParseError& e) {
        return error(400, "bad-request", {e.what()});
    } catch (const FormatError& e) {
        return error(400, "bad-request", {e.what()});
    } catch (const Error& e) {
        return error(400, "error", {e.what()});
    } catch (const std::exception& e) {
        return error(500, "internal", {e.what()});
    }
}

HttpResponse BrowserService::session_request(Session& s, std::string_view method, std::string_view rest,
                                             const std::multimap<std::string, std::string>& query,
                                             const json& body) {
    auto with_revision = [&](HttpResponse r) {
        r.body["revision"] = s.revision.load();
        return r;
    };
    auto stale = [&]() -> std::optional<HttpResponse> {
        auto expected = revision_of(body);
        if (expected && *expected != s.revision.load()) {
            return with_revision(error(409, "conflict",
                                       {"stale revision " + std::to_string(*expected) + ", session is at " +
                                        std::to_string(s.revision.load())}));
        }
        return std::nullopt;
    };

    if (method == "GET" && rest == "metamodels") {
        std::shared_lock lock(s.mutex);
        return with_revision({200, {{"metamodels", s.recorder->metamodels().to_json()}}});
    }
    if (method == "GET" && rest == "operations") {
        std::vector<std::string> selection;
        auto [lo, hi] = query.equal_range("selection");
        for (auto it = lo; it != hi; ++it) {
            std::size_t start = 0;
            const auto& v = it->second;
            while (start <= v.size()) {
                auto end = v.find(',', start);
                if (end == std::string::npos) end = v.size();
                if (end > start) selection.push_back(v.substr(start, end - start));
                start = end + 1;
            }
        }
        std::shared_lock lock(s.mutex);
        json ops = json::array();
        for (const auto& offer : offer_operations(s.recorder->catalog(), s.recorder->metamodels(),
                                                  s.recorder->models(), selection)) {
            auto d = offer.operation->descriptor.to_json();
            ops.push_back({{"name", d["name"]},
                           {"label", d["label"]},
                           {"parameters", d["parameters"]},
                           {"prefilled", bindings_to_json(offer.prefilled)},
                           {"applicable", offer.applicable},
                           {"messages", offer.messages}});
        }
        return with_revision({200, {{"operations", std::move(ops)}}});
    }
    if (method == "POST" && rest.rfind("operations/", 0) == 0) {
        auto name = std::string(rest.substr(std::string_view("operations/").size()));
        std::unique_lock lock(s.mutex);
        if (auto conflict = stale()) return *conflict;
        if (!s.recorder->catalog().find(name)) {
            return with_revision(error(404, "unknown-operation", {"unknown operation '" + name + "'"}));
        }
        auto bindings = body.contains("bindings") ? bindings_from_json(body["bindings"]) : Bindings{};
        const auto& record = s.recorder->apply_operation(name, bindings);
        ++s.revision;
        return with_revision({200, {{"record", record.to_json()}, {"label", record.label()}}});
    }
    if (method == "POST" && rest == "release") {
        std::unique_lock lock(s.mutex);
        if (auto conflict = stale()) return *conflict;
        s.recorder->release(body.value("force", false));
        ++s.revision;
        return with_revision({200, {{"releases", s.recorder->history().releases().size()}}});
    }
    if (method == "GET" && rest == "history") {
        std::shared_lock lock(s.mutex);
        return with_revision({200, history_view(s.recorder->history())});
    }
    if (method == "POST" && rest == "models") {
        std::unique_lock lock(s.mutex);
        if (auto conflict = stale()) return *conflict;
        if (!body.contains("name") || !body["name"].is_string()) throw FormatError("models body needs a name");
        auto model = load_model(s.initial, body.value("model", json::object()));
        auto models = s.models;
        models.insert_or_assign(body["name"].get<std::string>(), std::move(model));
        try {
            sync_models(*s.recorder, models);
        } catch (...) {
            sync_models(*s.recorder, s.models);
            throw;
        }
        s.models = std::move(models);
        ++s.revision;
        return with_revision({200, {{"models", s.models.size()}}});
    }
    if (method == "POST" && rest == "migrate") {
        std::shared_lock lock(s.mutex);
        auto name = body.value("model", std::string());
        auto it = s.models.find(name);
        if (it == s.models.end()) return with_revision(error(404, "unknown-model", {"no model '" + name + "'"}));
        std::optional<std::size_t> to;
        if (body.contains("to")) to = body["to"].get<std::size_t>();
        std::vector<Model> input{it->second};
        auto result = migrate(input, s.recorder->history(), reeng::case_registry(), body.value("from", std::size_t{0}), to,
                              s.recorder->catalog());
        json steps = json::array();
        for (const auto& st : result.report.steps) steps.push_back({{"step", st.step}, {"millis", st.millis}});
        return with_revision({200,
                              {{"report", result.report.lines},
                               {"steps", std::move(steps)},
                               {"model", save_model(result.models.front())}}});
    }
    if (method == "POST" && rest == "save") {
        std::shared_lock lock(s.mutex);
        auto doc = s.recorder->history().to_json();
        json out = {{"history", doc}};
        if (body.contains("file")) {
            auto file = body["file"].get<std::string>();
            if (!save_dir_) return with_revision(error(403, "save-disabled", {"the service was started without a save directory"}));
            if (!safe_file_name(file)) return with_revision(error(400, "bad-request", {"invalid file name '" + file + "'"}));
            auto path = *save_dir_ / file;
            std::ofstream f(path, std::ios::binary);
            f << dump_json(doc);
            if (!f) return with_revision(error(500, "internal", {"cannot write " + path.string()}));
            out["written"] = path.string();
        }
        return with_revision({200, std::move(out)});
    }
    return with_revision(error(404, "not-found", {"no route for " + std::string(method) + " " + std::string(rest)}));
}

namespace {

void install_routes(httplib::Server& http, BrowserService& service) {
    auto route = [&service](const char* method) {
        return [&service, method](const httplib::Request& req, httplib::Response& res) {
            std::multimap<std::string, std::string> query(req.params.begin(), req.params.end());
            auto r = service.handle(method, req.path, query, req.body);
            res.status = r.status;
            res.set_content(r.body.dump(), "application/json");
        };
    };
    http.Get(R"(/.*)", route("GET"));
    http.Post(R"(/.*)", route("POST"));
}

}  // namespace

bool BrowserService::serve(const std::string& host, int port) {
    server_ = std::make_unique<Server>();
    install_routes(server_->http, *this);
    return server_->http.listen(host, port);
}

int BrowserService::start_background(const std::string& host) {
    server_ = std::make_unique<Server>();
    install_routes(server_->http, *this);
    int port = server_->http.bind_to_any_port(host);
    if (port <= 0) return -1;
    server_->thread = std::thread([this] { server_->http.listen_after_bind(); });
    server_->http.wait_until_ready();
    return port;
}

void BrowserService::stop() {
    if (!server_) return;
    server_->http.stop();
    if (server_->thread.joinable()) server_->thread.join();
    server_.reset();
}

}  // namespace coevo
