#include "citefid/remote.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "citefid/errors.hpp"
#include "citefid/parallel.hpp"

namespace citefid {

using nlohmann::json;

namespace wire {
namespace {

json parse_body(std::string_view body) {
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        throw TransportError(std::string("model service sent malformed JSON: ") + e.what());
    }
}

const json& array_field(const json& obj, const char* key, std::size_t expected) {
    if (!obj.is_object()) throw TransportError("model service response is not an object");
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_array()) {
        throw TransportError(std::string("model service response lacks array '") + key + "'");
    }
    if (it->size() != expected) {
        throw TransportError(std::string("model service returned ") + std::to_string(it->size()) + " " + key +
                             " for " + std::to_string(expected) + " inputs");
    }
    return *it;
}

std::vector<double> numbers(const json& arr, const char* key) {
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_number()) throw TransportError(std::string("non-numeric entry in '") + key + "'");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

std::string encode_score_request(std::span<const TextPair> pairs) {
    json arr = json::array();
    for (const auto& p : pairs) arr.push_back({{"a", p.a}, {"b", p.b}});
    return json{{"pairs", std::move(arr)}}.dump();
}

std::string encode_sentences_request(std::span<const std::string> sentences) {
    return json{{"sentences", json(std::vector<std::string>(sentences.begin(), sentences.end()))}}.dump();
}

std::vector<double> decode_score_response(std::string_view body, std::size_t expected) {
    const json obj = parse_body(body);
    return numbers(array_field(obj, "scores", expected), "scores");
}

RawBackground decode_background_response(std::string_view body, std::size_t expected) {
    const json obj = parse_body(body);
    RawBackground out;
    for (const auto& v : array_field(obj, "labels", expected)) {
        if (!v.is_boolean()) throw TransportError("background labels must be booleans");
        out.labels.push_back(v.get<bool>());
    }
    out.confidences = numbers(array_field(obj, "confidences", expected), "confidences");
    return out;
}

RawDiscourse decode_discourse_response(std::string_view body, std::size_t expected) {
    const json obj = parse_body(body);
    RawDiscourse out;
    for (const auto& v : array_field(obj, "labels", expected)) {
        if (!v.is_string()) throw TransportError("discourse labels must be strings");
        auto c = parse_discourse_category(v.get_ref<const std::string&>());
        if (!c) throw TransportError("unknown discourse label '" + v.get<std::string>() + "'");
        out.labels.push_back(*c);
    }
    out.confidences = numbers(array_field(obj, "confidences", expected), "confidences");
    return out;
}

Health decode_health_response(std::string_view body) {
    const json obj = parse_body(body);
    if (!obj.is_object()) throw TransportError("health response is not an object");
    Health h;
    h.status = obj.value("status", "");
    h.model = obj.value("model", "");
    h.version = obj.value("version", "");
    return h;
}

}  // namespace wire

namespace {

std::unique_ptr<httplib::Client> make_client(const RemoteOptions& o) {
    auto client = std::make_unique<httplib::Client>(o.base_url);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(o.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(o.timeout - secs);
    client->set_connection_timeout(secs.count(), usecs.count());
    client->set_read_timeout(secs.count(), usecs.count());
    client->set_write_timeout(secs.count(), usecs.count());
    return client;
}

template <typename T>
std::vector<T> chunked(std::size_t n, std::size_t batch, std::size_t in_flight,
                       const std::function<std::vector<T>(std::size_t, std::size_t)>& call) {
    std::vector<T> out(n);
    const std::size_t chunks = (n + batch - 1) / batch;
    parallel_for(chunks, static_cast<unsigned>(std::max<std::size_t>(1, in_flight)), [&](std::size_t c) {
        const std::size_t begin = c * batch;
        const std::size_t len = std::min(batch, n - begin);
        auto part = call(begin, len);
        std::move(part.begin(), part.end(), out.begin() + static_cast<std::ptrdiff_t>(begin));
    });
    return out;
}

}  // namespace

RemoteModelClient::RemoteModelClient(RemoteOptions options)
    : options_(std::move(options)),
      model_{"remote", "unknown"},
      warnings_(std::make_unique<std::atomic<std::size_t>>(0)) {
    if (options_.base_url.empty()) throw ConfigError("remote model service URL is empty");
    if (options_.batch_size == 0 || options_.batch_size > kMaxWireBatch) {
        throw ConfigError("remote batch size must be in [1, 256]");
    }
    if (options_.retry.attempts < 1) throw ConfigError("retry attempts must be >= 1");
}

RemoteModelClient::~RemoteModelClient() = default;

wire::Health RemoteModelClient::check_health() {
    auto client = make_client(options_);
    auto res = client->Get("/v1/health");
    if (!res) {
        throw TransportError("model service at " + options_.base_url +
                             " unreachable: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw TransportError("model service health check returned HTTP " + std::to_string(res->status));
    }
    auto h = wire::decode_health_response(res->body);
    if (h.status != "ok") throw TransportError("model service reports status '" + h.status + "'");
    model_ = {h.model.empty() ? "remote" : h.model, h.version.empty() ? "unknown" : h.version};
    return h;
}

ModelId RemoteModelClient::id() const { return model_; }

std::string RemoteModelClient::post_with_retry(const std::string& path, const std::string& body) const {
    auto backoff = options_.retry.initial_backoff;
    std::string last_error;
    for (int attempt = 1; attempt <= options_.retry.attempts; ++attempt) {
        auto client = make_client(options_);
        auto res = client->Post(path, body, "application/json");
        if (res && res->status == 200) return res->body;
        if (res && res->status >= 400 && res->status < 500) {
            // Client errors are deterministic; retrying cannot help.
            throw TransportError("model service rejected " + path + " with HTTP " + std::to_string(res->status) +
                                 ": " + res->body);
        }
        last_error = res ? "HTTP " + std::to_string(res->status) : httplib::to_string(res.error());
        if (attempt < options_.retry.attempts) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }
    throw TransportError("model service " + path + " failed after " + std::to_string(options_.retry.attempts) +
                         " attempts: " + last_error);
}

std::vector<FidelityScore> RemoteModelClient::score_batch(std::span<const TextPair> pairs) const {
    return chunked<FidelityScore>(
        pairs.size(), options_.batch_size, options_.max_in_flight, [&](std::size_t begin, std::size_t len) {
            const auto sub = pairs.subspan(begin, len);
            const auto raw = wire::decode_score_response(
                post_with_retry("/v1/score", wire::encode_score_request(sub)), len);
            std::vector<FidelityScore> out;
            out.reserve(len);
            for (double v : raw) {
                if (!std::isfinite(v)) throw TransportError("model service returned a non-finite score");
                const double clamped = std::clamp(v, kMinFidelity, kMaxFidelity);
                if (clamped != v) ++*warnings_;
                out.emplace_back(clamped);
            }
            return out;
        });
}

std::vector<BackgroundLabel> RemoteModelClient::classify(std::span<const std::string> sentences) const {
    return chunked<BackgroundLabel>(
        sentences.size(), options_.batch_size, options_.max_in_flight, [&](std::size_t begin, std::size_t len) {
            const auto sub = sentences.subspan(begin, len);
            const auto raw = wire::decode_background_response(
                post_with_retry("/v1/classify/background", wire::encode_sentences_request(sub)), len);
            std::vector<BackgroundLabel> out;
            out.reserve(len);
            for (std::size_t i = 0; i < len; ++i) {
                double conf = raw.confidences[i];
                if (!std::isfinite(conf)) throw TransportError("model service returned a non-finite confidence");
                if (conf < 0.0 || conf > 1.0) {
                    conf = std::clamp(conf, 0.0, 1.0);
                    ++*warnings_;
                }
                // The gate decision is ours: label = confidence >= threshold.
                out.push_back({conf >= kClassifierThreshold, conf});
            }
            return out;
        });
}

std::vector<DiscourseLabel> RemoteModelClient::classify_discourse(std::span<const std::string> sentences) const {
    return chunked<DiscourseLabel>(
        sentences.size(), options_.batch_size, options_.max_in_flight, [&](std::size_t begin, std::size_t len) {
            const auto sub = sentences.subspan(begin, len);
            const auto raw = wire::decode_discourse_response(
                post_with_retry("/v1/classify/discourse", wire::encode_sentences_request(sub)), len);
            std::vector<DiscourseLabel> out;
            out.reserve(len);
            for (std::size_t i = 0; i < len; ++i) {
                double conf = raw.confidences[i];
                if (!std::isfinite(conf)) throw TransportError("model service returned a non-finite confidence");
                if (conf < 0.0 || conf > 1.0) {
                    conf = std::clamp(conf, 0.0, 1.0);
                    ++*warnings_;
                }
                out.push_back({raw.labels[i], conf});
            }
            return out;
        });
}

}  // namespace citefid
