#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "coevo/history.hpp"

namespace coevo {

struct HttpResponse {
    int status{200};
    json body;
};

/// JSON over HTTP facade for the operation browser. Sessions live in
/// memory; every mutation bumps the session revision, rejected requests
/// leave it alone.
///
///   POST /sessions                          {metamodels:[doc]} | {history:doc} | {case:true}, optional models:{name:doc}
///   GET  /sessions/{id}/metamodels
///   GET  /sessions/{id}/operations?selection=fqn,fqn
///   POST /sessions/{id}/operations/{name}   {bindings, revision?}
///   POST /sessions/{id}/release             {force?, revision?}
///   GET  /sessions/{id}/history
///   POST /sessions/{id}/models              {name, model}
///   POST /sessions/{id}/migrate             {model, from?, to?}
///   POST /sessions/{id}/save                {file?}
///
/// Errors are `{code, messages[]}`.
class BrowserService {
public:
    /// `save_dir` enables writing history files on save.
    explicit BrowserService(std::optional<std::filesystem::path> save_dir = std::nullopt);
    ~BrowserService();
    BrowserService(const BrowserService&) = delete;
    BrowserService& operator=(const BrowserService&) = delete;

    /// Transport-free entry point; `query` holds decoded parameters.
    [[nodiscard]] HttpResponse handle(std::string_view method, std::string_view path,
                                      const std::multimap<std::string, std::string>& query,
                                      const std::string& body);

    /// Blocks serving HTTP until stop() is called. Returns false when the
    /// address cannot be bound.
    bool serve(const std::string& host, int port);
    /// Binds to a free port and serves on a background thread; returns the port.
    int start_background(const std::string& host = "127.0.0.1");
    void stop();

private:
    struct Session;
    struct Server;

    std::shared_ptr<Session> find_session(const std::string& id) const;
    HttpResponse create_session(const json& body);
    HttpResponse session_request(Session& session, std::string_view method, std::string_view rest,
                                 const std::multimap<std::string, std::string>& query, const json& body);

    mutable std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_session_{1};
    std::optional<std::filesystem::path> save_dir_;
    std::unique_ptr<Server> server_;
};

}  // namespace coevo
