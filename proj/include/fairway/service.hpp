#pragma once

#include "fairway/io_store.hpp"

#include <map>
#include <memory>
#include <string>

namespace fairway::service {

struct HttpReply {
    int status = 200;
    std::string body;  ///< JSON
};

/// Immutable snapshot the endpoint answers from. Construction fails with
/// InvariantViolationError when the document carries no state bands.
class Snapshot {
public:
    explicit Snapshot(io::ModelDocument doc);

    const io::ModelDocument& document() const { return doc_; }
    const StateBands& bands() const { return *doc_.bands; }
    const std::string& document_json() const { return doc_json_; }

private:
    io::ModelDocument doc_;
    std::string doc_json_;
};

/// Routes one GET request. Paths: /state?flow=&density=, /model, /health.
/// Missing or non-numeric parameters give 400, density <= 0 (or a flow
/// that yields no positive speed) gives 422, unknown paths 404.
HttpReply handle_get(const Snapshot& snapshot, const std::string& path,
                     const std::multimap<std::string, std::string>& params);

/// HTTP/1.1 server over a shared snapshot. Requests are handled
/// concurrently on the server's worker pool and never mutate the snapshot.
class Server {
public:
    explicit Server(std::shared_ptr<const Snapshot> snapshot);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds `host:port`; port 0 picks a free port. Returns the bound port.
    int bind(const std::string& host, int port);
    /// Blocks serving requests until stop() is called.
    void listen();
    void stop();
    /// Blocks until the server is accepting connections.
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace fairway::service
