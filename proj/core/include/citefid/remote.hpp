#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "citefid/citation_extract.hpp"
#include "citefid/claims.hpp"
#include "citefid/fidelity.hpp"

namespace citefid {

inline constexpr std::size_t kMaxWireBatch = 256;

// JSON bodies of the model-service protocol. Encoders produce the exact
// request bytes; decoders validate shape and length and throw TransportError
// on anything off-protocol.
namespace wire {

std::string encode_score_request(std::span<const TextPair> pairs);
std::string encode_sentences_request(std::span<const std::string> sentences);

// Raw scores as sent by the service, unclamped.
std::vector<double> decode_score_response(std::string_view body, std::size_t expected);

struct RawBackground {
    std::vector<bool> labels;
    std::vector<double> confidences;
};
RawBackground decode_background_response(std::string_view body, std::size_t expected);

struct RawDiscourse {
    std::vector<DiscourseCategory> labels;
    std::vector<double> confidences;
};
RawDiscourse decode_discourse_response(std::string_view body, std::size_t expected);

struct Health {
    std::string status;
    std::string model;
    std::string version;
};
Health decode_health_response(std::string_view body);

}  // namespace wire

struct RetryPolicy {
    int attempts = 3;
    std::chrono::milliseconds initial_backoff{250};  // doubles after each failure
};

struct RemoteOptions {
    std::string base_url;  // e.g. "http://127.0.0.1:8080"
    std::size_t batch_size = kMaxWireBatch;
    std::size_t max_in_flight = 4;
    std::chrono::milliseconds timeout{30000};
    RetryPolicy retry;
};

// HTTP client for the model service. Backs the scorer and background
// interfaces directly and discourse via RemoteDiscourseClassifier; calls are thread-safe and split into wire batches of at most
// `batch_size`, with up to `max_in_flight` requests outstanding.
class RemoteModelClient final : public Scorer, public BackgroundClassifier {
public:
    explicit RemoteModelClient(RemoteOptions options);
    ~RemoteModelClient() override;

    // GET /v1/health; throws TransportError unless status is "ok". Caches the
    // reported model name/version for id().
    wire::Health check_health();

    std::vector<FidelityScore> score_batch(std::span<const TextPair> pairs) const override;
    std::vector<BackgroundLabel> classify(std::span<const std::string> sentences) const override;
    ModelId id() const override;

    // Both classifier interfaces share the argument list, so discourse gets its own name.
    std::vector<DiscourseLabel> classify_discourse(std::span<const std::string> sentences) const;

    // Scores or confidences outside their range that were clamped.
    std::size_t protocol_warnings() const noexcept { return warnings_->load(); }

    const RemoteOptions& options() const noexcept { return options_; }

private:
    std::string post_with_retry(const std::string& path, const std::string& body) const;

    RemoteOptions options_;
    ModelId model_;
    std::unique_ptr<std::atomic<std::size_t>> warnings_;
};

class RemoteDiscourseClassifier final : public DiscourseClassifier {
public:
    explicit RemoteDiscourseClassifier(const RemoteModelClient& client) : client_(client) {}
    std::vector<DiscourseLabel> classify(std::span<const std::string> sentences) const override {
        return client_.classify_discourse(sentences);
    }
    ModelId id() const override { return client_.id(); }

private:
    const RemoteModelClient& client_;
};

}  // namespace citefid
