#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

#include "cqa/scorer.hpp"

namespace cqa {

// JSON bodies of the scoring protocol; docs/scorer_protocol.md is normative.

std::string encode_request(const ScoreRequest& request);
/// Throws std::invalid_argument describing the first problem.
ScoreRequest decode_request(std::string_view body);

std::string encode_response(const ScoreResponse& response);
/// Throws ScorerResponseError.
ScoreResponse decode_response(std::string_view body);

/// Client side of the protocol: POSTs each batch to `<endpoint>` (path
/// defaults to /score). Connection failures, timeouts and 5xx statuses raise
/// ScorerTransportError; 4xx statuses and undecodable bodies raise
/// ScorerResponseError.
class HttpScorer : public Scorer {
public:
    explicit HttpScorer(std::string endpoint, std::chrono::milliseconds timeout = std::chrono::seconds(60));

    ScoreResponse score(const ScoreRequest& request) override;

    const std::string& endpoint() const noexcept { return endpoint_; }

private:
    std::string endpoint_;
    std::string host_port_;  // scheme://host:port
    std::string path_;
    std::chrono::milliseconds timeout_;
};

/// Serves a Scorer over the protocol. Used by the mock scoring tool and the
/// conformance tests.
class ScoringServer {
public:
    explicit ScoringServer(Scorer& scorer);
    ~ScoringServer();
    ScoringServer(const ScoringServer&) = delete;
    ScoringServer& operator=(const ScoringServer&) = delete;

    /// Binds (port 0 picks a free port), starts a background thread and
    /// returns the bound port.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    /// Blocks until stop() is called from another thread or a signal.
    void listen(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace cqa
