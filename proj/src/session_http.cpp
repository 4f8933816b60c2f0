#include "sublab/session_http.hpp"

#include <stdexcept>
#include <vector>

#include "httplib.h"
#include "sublab/config.hpp"

using nlohmann::json;

namespace sublab {

namespace {

ApiResponse error(int status, const std::string& msg) { return {status, json{{"error", msg}}}; }

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::string cur;
    const auto end = path.find('?');
    for (char ch : path.substr(0, end)) {
        if (ch == '/') {
            if (!cur.empty()) parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) parts.push_back(cur);
    return parts;
}

int session_error_status(SessionError::Kind k) {
    switch (k) {
        case SessionError::Kind::NotFound:
            return 404;
        case SessionError::Kind::Conflict:
            return 409;
        case SessionError::Kind::Invalid:
            return 400;
    }
    return 500;
}

}  // namespace

ApiResponse SessionApi::handle(const std::string& method, const std::string& path, const std::string& body) const {
    const auto parts = split_path(path);
    if (parts.empty() || parts[0] != "sessions" || parts.size() > 3) return error(404, "no route " + path);
    try {
        if (parts.size() == 1) {
            if (method != "POST") return error(405, "use POST /sessions");
            const json req = json::parse(body.empty() ? "{}" : body);
            return {201, snapshot_to_json(manager_.create(session_request_from_json(req)))};
        }
        const std::string& id = parts[1];
        if (parts.size() == 2) {
            if (method != "GET") return error(405, "use GET /sessions/{id}");
            return {200, snapshot_to_json(manager_.get(id))};
        }
        if (parts[2] == "labels") {
            if (method != "POST") return error(405, "use POST /sessions/{id}/labels");
            const json req = json::parse(body);
            if (!req.is_object() || !req.contains("point_index") || !req.contains("class")) {
                return error(400, "expected {\"point_index\": i, \"class\": c}");
            }
            if (!req["point_index"].is_number_integer() || !req["class"].is_number_integer()) {
                return error(400, "point_index and class must be integers");
            }
            return {200, snapshot_to_json(manager_.submit_label(id, req["point_index"].get<int>(),
                                                                req["class"].get<int>()))};
        }
        if (parts[2] == "trace") {
            if (method != "GET") return error(405, "use GET /sessions/{id}/trace");
            return {200, json{{"session_id", id}, {"trace", trace_to_json(manager_.trace(id))}}};
        }
        return error(404, "no route " + path);
    } catch (const json::exception& e) {
        return error(400, std::string("bad JSON: ") + e.what());
    } catch (const ConfigError& e) {
        return error(400, e.what());
    } catch (const SessionError& e) {
        return error(session_error_status(e.kind()), e.what());
    }
}

struct SessionServer::Impl {
    explicit Impl(SessionManager& m) : api(m) {}
    SessionApi api;
    httplib::Server server;
};

SessionServer::SessionServer(SessionManager& manager) : impl_(std::make_unique<Impl>(manager)) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        const ApiResponse r = impl_->api.handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    impl_->server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    impl_->server.Get(R"(/sessions/.*)", handler);
    impl_->server.Post(R"(/sessions(/.*)?)", handler);
    impl_->server.Options(R"(/sessions(/.*)?)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
}

SessionServer::~SessionServer() { stop(); }

int SessionServer::bind(const std::string& host, int port) {
    int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    return bound;
}

void SessionServer::listen() { impl_->server.listen_after_bind(); }

void SessionServer::stop() {
    if (impl_) impl_->server.stop();
}

}  // namespace sublab
