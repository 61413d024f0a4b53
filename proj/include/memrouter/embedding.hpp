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

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "memrouter/vector_math.hpp"

namespace memrouter {

enum class EmbedderKind { Hashing, Remote };

struct EmbedderConfig {
    EmbedderKind kind = EmbedderKind::Hashing;
    std::size_t dimension = 256;
    std::string endpoint;    // remote only, e.g. "https://api.openai.com/v1"
    std::string model_name;  // remote only
    std::uint64_t seed = 0;  // hashing only
    double timeout_seconds = 10.0;

    /// Defaults for the OpenAI-compatible service: text-embedding-3-small, 1536 dims.
    static EmbedderConfig remote_defaults();

    void validate() const;
};

/// Maps text to a unit vector of fixed dimension.
class Embedder {
public:
    virtual ~Embedder() = default;

    virtual UnitVector embed(std::string_view text) const = 0;
    virtual std::size_t dim() const = 0;
};

/// Deterministic signed feature-hashing embedder. Each content token (stopwords
/// dropped unless nothing else remains) is hashed with the seed to a bucket in
/// [0, dim) and a sign; counts accumulate and the sum is normalized.
class HashingEmbedder final : public Embedder {
public:
    explicit HashingEmbedder(std::size_t dim = 256, std::uint64_t seed = 0);

    UnitVector embed(std::string_view text) const override;
    std::size_t dim() const override { return dim_; }

private:
    std::size_t dim_;
    std::uint64_t seed_;
};

/// Seeded 64-bit token hash: FNV-1a over the bytes, then a splitmix64
/// finalizer over (hash ^ seed). Bucket is hash % dim, sign is the top bit.
std::uint64_t token_hash(std::string_view token, std::uint64_t seed);

/// Convenience wrapper matching the hashing embedder contract.
UnitVector embed_text(std::string_view text, const EmbedderConfig& cfg);

/// Client for an OpenAI-compatible `/embeddings` endpoint. The API key is
/// read from MEMROUTER_EMBED_API_KEY at construction.
class RemoteEmbedder final : public Embedder {
public:
    explicit RemoteEmbedder(EmbedderConfig cfg);

    UnitVector embed(std::string_view text) const override;
    std::size_t dim() const override { return cfg_.dimension; }

private:
    EmbedderConfig cfg_;
    std::string api_key_;
};

UnitVector embed_remote(std::string_view text, const EmbedderConfig& cfg);

std::shared_ptr<Embedder> make_embedder(const EmbedderConfig& cfg);

} // namespace memrouter
