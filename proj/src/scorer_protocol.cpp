#include "cqa/scorer_protocol.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "cqa/error.hpp"

namespace cqa {

using nlohmann::json;

std::string encode_request(const ScoreRequest& request) {
    json pairs = json::array();
    for (const auto& p : request) {
        json segments = json::array();
        for (const auto& s : p.input.query_segments) {
            const auto name = marker_name(s.marker);
            segments.push_back({{"text", s.text}, {"marker", name.empty() ? "none" : std::string(name)}});
        }
        pairs.push_back({{"pair_id", p.pair_id},
                         {"format", std::string(to_string(p.format))},
                         {"query_segments", std::move(segments)},
                         {"answer", p.input.answer_text}});
    }
    return json{{"pairs", std::move(pairs)}}.dump();
}

ScoreRequest decode_request(std::string_view body) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("request is not JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("pairs") || !doc["pairs"].is_array()) {
        throw std::invalid_argument("request must be an object with a 'pairs' array");
    }
    auto text_field = [](const json& obj, const char* key) {
        auto it = obj.find(key);
        if (it == obj.end() || !it->is_string()) {
            throw std::invalid_argument(std::string("missing or non-string '") + key + "'");
        }
        return it->get<std::string>();
    };
    ScoreRequest out;
    for (const auto& p : doc["pairs"]) {
        if (!p.is_object()) throw std::invalid_argument("pair is not an object");
        ScorePair pair;
        pair.pair_id = text_field(p, "pair_id");
        pair.format = parse_input_format(text_field(p, "format"));
        pair.input.answer_text = text_field(p, "answer");
        auto segs = p.find("query_segments");
        if (segs == p.end() || !segs->is_array()) throw std::invalid_argument("missing 'query_segments'");
        for (const auto& s : *segs) {
            if (!s.is_object()) throw std::invalid_argument("segment is not an object");
            auto marker = parse_marker_name(text_field(s, "marker"));
            if (!marker) throw std::invalid_argument("unknown marker in pair " + pair.pair_id);
            pair.input.query_segments.push_back({text_field(s, "text"), *marker});
        }
        out.push_back(std::move(pair));
    }
    return out;
}

std::string encode_response(const ScoreResponse& response) {
    json scores = json::object();
    for (const auto& [id, s] : response) {
        if (std::isfinite(s)) {
            scores[id] = s;
        } else {
            scores[id] = nullptr;
        }
    }
    return json{{"scores", std::move(scores)}}.dump();
}

ScoreResponse decode_response(std::string_view body) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error& e) {
        throw ScorerResponseError(std::string("scorer response is not JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("scores") || !doc["scores"].is_object()) {
        throw ScorerResponseError("scorer response must be an object with a 'scores' object");
    }
    ScoreResponse out;
    for (const auto& [id, v] : doc["scores"].items()) {
        if (!v.is_number()) throw ScorerResponseError("score for pair " + id + " is not a number");
        out[id] = v.get<double>();
    }
    return out;
}

HttpScorer::HttpScorer(std::string endpoint, std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {
    const auto scheme_end = endpoint_.find("://");
    if (scheme_end == std::string::npos) {
        throw std::invalid_argument("scorer endpoint must look like http://host:port[/path]: " + endpoint_);
    }
    const auto path_start = endpoint_.find('/', scheme_end + 3);
    host_port_ = endpoint_.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/score" : endpoint_.substr(path_start);
    if (path_ == "/") path_ = "/score";
}

ScoreResponse HttpScorer::score(const ScoreRequest& request) {
    // One client per call keeps the scorer shareable across threads.
    httplib::Client client(host_port_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    auto res = client.Post(path_, encode_request(request), "application/json");
    if (!res) {
        throw ScorerTransportError("scorer at " + endpoint_ + " unreachable: " + httplib::to_string(res.error()));
    }
    if (res->status >= 500) {
        throw ScorerTransportError("scorer at " + endpoint_ + " failed with status " + std::to_string(res->status) +
                                   ": " + res->body);
    }
    if (res->status != 200) {
        throw ScorerResponseError("scorer at " + endpoint_ + " rejected the batch with status " +
                                  std::to_string(res->status) + ": " + res->body);
    }
    return decode_response(res->body);
}

struct ScoringServer::Impl {
    explicit Impl(Scorer& s) : scorer(s) {}

    Scorer& scorer;
    httplib::Server server;
    std::thread thread;
};

ScoringServer::ScoringServer(Scorer& scorer) : impl_(std::make_unique<Impl>(scorer)) {
    auto error = [](httplib::Response& res, int status, const std::string& what) {
        res.status = status;
        res.set_content(json{{"error", what}}.dump(), "application/json");
    };
    impl_->server.Post("/score", [this, error](const httplib::Request& req, httplib::Response& res) {
        ScoreRequest request;
        try {
            request = decode_request(req.body);
        } catch (const std::exception& e) {
            return error(res, 400, e.what());
        }
        if (request.empty()) return error(res, 400, "empty batch");
        try {
            res.set_content(encode_response(impl_->scorer.score(request)), "application/json");
        } catch (const std::invalid_argument& e) {
            error(res, 400, e.what());
        } catch (const std::exception& e) {
            error(res, 500, e.what());
        }
    });
    impl_->server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"status":"ok"})", "application/json");
    });
}

ScoringServer::~ScoringServer() { stop(); }

int ScoringServer::start(const std::string& host, int port) {
    const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : impl_->server.bind_to_port(host, port)
                                                                           ? port
                                                                           : -1;
    if (bound < 0) throw std::runtime_error("cannot bind scoring server to " + host + ":" + std::to_string(port));
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void ScoringServer::listen(const std::string& host, int port) {
    if (!impl_->server.listen(host, port)) {
        throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
    }
}

void ScoringServer::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace cqa
