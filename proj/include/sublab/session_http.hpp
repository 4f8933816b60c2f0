#pragma once

#include <memory>
#include <string>

#include "json.hpp"
#include "sublab/session.hpp"

namespace sublab {

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

/// Transport-independent routing of the session JSON API.
///   POST /sessions                   create
///   POST /sessions/{id}/labels       {point_index, class}
///   GET  /sessions/{id}              state
///   GET  /sessions/{id}/trace        decision trace
/// Errors come back as {"error": message} with 400, 404, 405 or 409.
class SessionApi {
public:
    explicit SessionApi(SessionManager& manager) : manager_(manager) {}

    ApiResponse handle(const std::string& method, const std::string& path, const std::string& body) const;

private:
    SessionManager& manager_;
};

/// HTTP front end for SessionApi.
class SessionServer {
public:
    explicit SessionServer(SessionManager& manager);
    ~SessionServer();
    SessionServer(const SessionServer&) = delete;
    SessionServer& operator=(const SessionServer&) = delete;

    /// Bind; port 0 picks a free port. Returns the bound port or throws.
    int bind(const std::string& host, int port);
    /// Serve until stop(). Call after bind().
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace sublab
