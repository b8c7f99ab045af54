#include "fairway/service.hpp"

#include "fairway/errors.hpp"

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include <charconv>
#include <cmath>

namespace fairway::service {

namespace {

using ordered_json = nlohmann::ordered_json;

HttpReply error_reply(int status, const std::string& message) {
    return {status, ordered_json{{"error", message}}.dump()};
}

// Single numeric query parameter; nullopt if absent.
std::optional<std::string> single_param(const std::multimap<std::string, std::string>& params,
                                        const std::string& name) {
    auto it = params.find(name);
    if (it == params.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::optional<double> parse_finite(const std::string& text) {
    double value = 0.0;
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), last, value);
    if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

HttpReply state_reply(const Snapshot& snapshot, const std::multimap<std::string, std::string>& params) {
    const auto flow_text = single_param(params, "flow");
    const auto density_text = single_param(params, "density");
    if (!flow_text || !density_text) {
        return error_reply(400, fmt::format("missing query parameter '{}'", flow_text ? "density" : "flow"));
    }
    const auto flow = parse_finite(*flow_text);
    if (!flow) {
        return error_reply(400, fmt::format("flow '{}' is not a number", *flow_text));
    }
    const auto density = parse_finite(*density_text);
    if (!density) {
        return error_reply(400, fmt::format("density '{}' is not a number", *density_text));
    }
    if (!(*density > 0.0)) {
        return error_reply(422, "density must be positive");
    }
    try {
        const auto result = classify_flow_density(snapshot.bands(), *flow, *density);
        const ordered_json body{{"speed_kmh", result.speed_estimate},
                                {"state", to_string(result.state)},
                                {"color", color_of(result.state)}};
        return {200, body.dump()};
    } catch (const DomainError& e) {
        return error_reply(422, e.what());
    }
}

}  // namespace

Snapshot::Snapshot(io::ModelDocument doc) : doc_(std::move(doc)), doc_json_(io::serialize_model(doc_)) {
    if (!doc_.bands) {
        throw InvariantViolationError("model document has no state bands to classify against");
    }
}

HttpReply handle_get(const Snapshot& snapshot, const std::string& path,
                     const std::multimap<std::string, std::string>& params) {
    if (path == "/state") {
        return state_reply(snapshot, params);
    }
    if (path == "/model") {
        return {200, snapshot.document_json()};
    }
    if (path == "/health") {
        return {200, R"({"status":"ok"})"};
    }
    return error_reply(404, fmt::format("no route for '{}'", path));
}

struct Server::Impl {
    std::shared_ptr<const Snapshot> snapshot;
    httplib::Server http;
};

Server::Server(std::shared_ptr<const Snapshot> snapshot) : impl_(std::make_unique<Impl>()) {
    impl_->snapshot = std::move(snapshot);
    auto handler = [snap = impl_->snapshot](const httplib::Request& req, httplib::Response& res) {
        std::multimap<std::string, std::string> params(req.params.begin(), req.params.end());
        const auto reply = handle_get(*snap, req.path, params);
        res.status = reply.status;
        res.set_content(reply.body, "application/json");
    };
    impl_->http.Get(R"(/.*)", handler);
    impl_->http.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (res.body.empty()) {
            res.set_content(ordered_json{{"error", fmt::format("status {} for '{}'", res.status, req.path)}}.dump(),
                            "application/json");
        }
    });
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
    if (port == 0) {
        const int bound = impl_->http.bind_to_any_port(host);
        if (bound < 0) {
            throw Error(fmt::format("cannot bind {}", host));
        }
        return bound;
    }
    if (!impl_->http.bind_to_port(host, port)) {
        throw Error(fmt::format("cannot bind {}:{}", host, port));
    }
    return port;
}

void Server::listen() { impl_->http.listen_after_bind(); }

void Server::stop() {
    if (impl_ && impl_->http.is_running()) {
        impl_->http.stop();
    }
}

void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

}  // namespace fairway::service
