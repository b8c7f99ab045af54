#include "fairway/errors.hpp"
#include "fairway/service.hpp"

#include <doctest.h>
#include <httplib.h>

#include <json.hpp>

#include <thread>

using namespace fairway;
using Params = std::multimap<std::string, std::string>;

namespace {

service::Snapshot default_snapshot() {
    io::ModelDocument doc;
    doc.bands = StateBands::default_bands();
    return service::Snapshot(doc);
}

}  // namespace

TEST_CASE("state queries") {
    const auto snap = default_snapshot();
    const auto congested = service::handle_get(snap, "/state", Params{{"flow", "42"}, {"density", "7"}});
    CHECK(congested.status == 200);
    CHECK(congested.body == R"({"speed_kmh":6.0,"state":"congested","color":"red"})");

    const auto smooth = service::handle_get(snap, "/state", Params{{"flow", "30"}, {"density", "3"}});
    CHECK(smooth.body == R"({"speed_kmh":10.0,"state":"smooth","color":"green"})");

    CHECK(service::handle_get(snap, "/state", Params{{"flow", "30"}, {"density", "0"}}).status == 422);
    CHECK(service::handle_get(snap, "/state", Params{{"flow", "30"}, {"density", "-2"}}).status == 422);
    CHECK(service::handle_get(snap, "/state", Params{{"flow", "0"}, {"density", "3"}}).status == 422);
    CHECK(service::handle_get(snap, "/state", Params{{"density", "3"}}).status == 400);
    CHECK(service::handle_get(snap, "/state", Params{{"flow", "abc"}, {"density", "3"}}).status == 400);
    CHECK(service::handle_get(snap, "/state", Params{{"flow", "3x"}, {"density", "3"}}).status == 400);

    const auto missing = service::handle_get(snap, "/state", Params{{"density", "3"}});
    CHECK(nlohmann::json::parse(missing.body).contains("error"));
}

TEST_CASE("other routes") {
    const auto snap = default_snapshot();
    const auto health = service::handle_get(snap, "/health", {});
    CHECK(health.status == 200);
    CHECK(health.body == R"({"status":"ok"})");

    const auto model = service::handle_get(snap, "/model", {});
    CHECK(model.status == 200);
    CHECK(io::parse_model(model.body) == snap.document());

    const auto nowhere = service::handle_get(snap, "/nowhere", {});
    CHECK(nowhere.status == 404);
    CHECK(nlohmann::json::parse(nowhere.body).contains("error"));
}

TEST_CASE("snapshot needs bands") {
    CHECK_THROWS_AS(service::Snapshot(io::ModelDocument{}), InvariantViolationError);
}

TEST_CASE("responses are stateless") {
    const auto snap = default_snapshot();
    const Params query{{"flow", "42"}, {"density", "7"}};
    const auto first = service::handle_get(snap, "/state", query).body;
    bool identical = true;
    for (int i = 0; i < 10000; ++i) {
        identical = identical && service::handle_get(snap, "/state", query).body == first;
    }
    CHECK(identical);
}

TEST_CASE("HTTP round trip") {
    auto snap = std::make_shared<const service::Snapshot>(default_snapshot());
    service::Server server(snap);
    const int port = server.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    std::thread worker([&] { server.listen(); });
    server.wait_until_ready();

    std::vector<std::thread> clients;
    std::vector<std::string> bodies(8);
    for (std::size_t i = 0; i < bodies.size(); ++i) {
        clients.emplace_back([&, i] {
            httplib::Client client("127.0.0.1", port);
            if (auto res = client.Get("/state?flow=42&density=7")) {
                bodies[i] = res->body;
            }
        });
    }
    for (auto& c : clients) {
        c.join();
    }
    for (const auto& body : bodies) {
        CHECK(body == R"({"speed_kmh":6.0,"state":"congested","color":"red"})");
    }

    httplib::Client client("127.0.0.1", port);
    auto bad = client.Get("/state?density=3");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    CHECK(bad->get_header_value("Content-Type") == "application/json");
    auto gone = client.Get("/missing");
    REQUIRE(gone);
    CHECK(gone->status == 404);

    server.stop();
    worker.join();
}
