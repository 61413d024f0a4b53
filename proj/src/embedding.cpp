/*
 * Copyright 2026 The memrouter Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "memrouter/embedding.hpp"

#include "detail.hpp"
#include "http_client.hpp"
#include "memrouter/text.hpp"

namespace memrouter {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

} // namespace

EmbedderConfig EmbedderConfig::remote_defaults() {
    EmbedderConfig cfg;
    cfg.kind = EmbedderKind::Remote;
    cfg.dimension = 1536;
    cfg.model_name = "text-embedding-3-small";
    return cfg;
}

void EmbedderConfig::validate() const {
    if (dimension == 0) throw Error(Errc::ConfigInvalid, "embedder dimension must be positive");
    if (kind == EmbedderKind::Remote && (endpoint.empty() || model_name.empty())) {
        throw Error(Errc::ConfigInvalid, "remote embedder needs endpoint and model_name");
    }
}

std::uint64_t token_hash(std::string_view token, std::uint64_t seed) {
    std::uint64_t h = kFnvOffset;
    for (const char c : token) {
        h ^= static_cast<unsigned char>(c);
        h *= kFnvPrime;
    }
    return detail::splitmix64(h ^ seed);
}

HashingEmbedder::HashingEmbedder(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
    if (dim_ == 0) throw Error(Errc::ConfigInvalid, "embedder dimension must be positive");
}

UnitVector HashingEmbedder::embed(std::string_view text) const {
    if (trim(text).empty()) throw Error(Errc::EmptyText, "cannot embed empty text");
    auto tokens = content_tokens(text);
    if (tokens.empty()) tokens = tokenize(text);
    if (tokens.empty()) throw Error(Errc::EmptyText, "text has no tokens");

    Vector<float> raw = Vector<float>::Zero(static_cast<Eigen::Index>(dim_));
    for (const auto& token : tokens) {
        const std::uint64_t h = token_hash(token, seed_);
        const auto bucket = static_cast<Eigen::Index>(h % dim_);
        raw[bucket] += (h >> 63) ? -1.0f : 1.0f;
    }
    return normalize(raw);
}

UnitVector embed_text(std::string_view text, const EmbedderConfig& cfg) {
    return HashingEmbedder(cfg.dimension, cfg.seed).embed(text);
}

RemoteEmbedder::RemoteEmbedder(EmbedderConfig cfg)
    : cfg_(std::move(cfg)), api_key_(detail::env_or_empty("MEMROUTER_EMBED_API_KEY")) {
    if (cfg_.endpoint.empty() || cfg_.model_name.empty()) {
        throw Error(Errc::ConfigInvalid, "remote embedder needs endpoint and model_name");
    }
    if (cfg_.dimension == 0) throw Error(Errc::ConfigInvalid, "embedder dimension must be positive");
}

UnitVector RemoteEmbedder::embed(std::string_view text) const {
    if (trim(text).empty()) throw Error(Errc::EmptyText, "cannot embed empty text");
    const nlohmann::json body = {{"model", cfg_.model_name}, {"input", std::string(text)}};
    const auto response =
        detail::post_json(cfg_.endpoint, "/embeddings", body, api_key_, cfg_.timeout_seconds);

    const nlohmann::json* embedding = nullptr;
    if (response.is_object() && response.contains("data") && response["data"].is_array() &&
        !response["data"].empty() && response["data"][0].is_object() &&
        response["data"][0].contains("embedding")) {
        embedding = &response["data"][0]["embedding"];
    }
    if (embedding == nullptr || !embedding->is_array()) {
        throw Error(Errc::ProtocolError, "embeddings response lacks data[0].embedding");
    }
    if (embedding->size() != cfg_.dimension) {
        throw Error(Errc::ProtocolError, "embeddings response has dimension " +
                                             std::to_string(embedding->size()) + ", expected " +
                                             std::to_string(cfg_.dimension));
    }
    Vector<float> raw(static_cast<Eigen::Index>(cfg_.dimension));
    for (std::size_t i = 0; i < cfg_.dimension; ++i) {
        const auto& x = (*embedding)[i];
        if (!x.is_number()) throw Error(Errc::ProtocolError, "non-numeric embedding component");
        raw[static_cast<Eigen::Index>(i)] = x.get<float>();
    }
    return normalize(raw);
}

UnitVector embed_remote(std::string_view text, const EmbedderConfig& cfg) {
    return RemoteEmbedder(cfg).embed(text);
}

std::shared_ptr<Embedder> make_embedder(const EmbedderConfig& cfg) {
    cfg.validate();
    if (cfg.kind == EmbedderKind::Remote) return std::make_shared<RemoteEmbedder>(cfg);
    return std::make_shared<HashingEmbedder>(cfg.dimension, cfg.seed);
}

} // namespace memrouter
