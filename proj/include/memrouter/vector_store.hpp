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

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "memrouter/chunker.hpp"
#include "memrouter/clock.hpp"
#include "memrouter/vector_math.hpp"

namespace memrouter {

class Embedder;

struct DocumentChunk {
    std::string chunk_id;
    std::string doc_id;
    std::string text;
    UnitVector embedding;
};

using ChunkPtr = std::shared_ptr<const DocumentChunk>;

struct ScoredChunk {
    ChunkPtr chunk;
    float score = 0.0f;
};

/// Results of one search, best first, with the elapsed time of the call.
struct SearchResponse {
    std::vector<ScoredChunk> results;
    double latency_ms = 0.0;
};

/// Authoritative document index.
class VectorStore {
public:
    virtual ~VectorStore() = default;

    /// Inserts or replaces chunks by chunk_id; returns the number written.
    virtual std::size_t upsert(std::span<const DocumentChunk> chunks) = 0;

    /// The min(k, size) chunks with highest cosine to `query`, sorted
    /// descending, ties broken by earliest insertion.
    virtual SearchResponse search(const UnitVector& query, std::size_t k) const = 0;

    /// As search(), tagged with a caller-chosen request key. Latency wrappers
    /// draw the delay from the key instead of their call counter, so two runs
    /// issuing the same logical request see the same delay.
    virtual SearchResponse search_keyed(const UnitVector& query, std::size_t k, std::uint64_t) const {
        return search(query, k);
    }

    virtual std::size_t dim() const = 0;
    virtual std::size_t size() const = 0;
};

/// Exact flat inner-product index held in memory. Concurrent searches share a
/// reader lock; upserts are exclusive.
class LocalVectorStore final : public VectorStore {
public:
    explicit LocalVectorStore(std::size_t dim);

    std::size_t upsert(std::span<const DocumentChunk> chunks) override;
    SearchResponse search(const UnitVector& query, std::size_t k) const override;
    std::size_t dim() const override { return dim_; }
    std::size_t size() const override;

private:
    std::size_t dim_;
    mutable std::shared_mutex mutex_;
    Eigen::MatrixXf keys_;  // dim x capacity, one column per chunk in insertion order
    std::vector<ChunkPtr> chunks_;
    std::unordered_map<std::string, std::size_t> slot_of_;
};

enum class LatencyKind { None, Fixed, Uniform };

/// Simulated network delay. The delay of the i-th call is a pure function of
/// (seed, i). Fixed uses lo_ms.
struct LatencyModel {
    LatencyKind kind = LatencyKind::None;
    double lo_ms = 97.0;
    double hi_ms = 307.0;
    std::uint64_t seed = 0;

    static LatencyModel uniform(double lo_ms, double hi_ms, std::uint64_t seed) {
        return {LatencyKind::Uniform, lo_ms, hi_ms, seed};
    }
    static LatencyModel fixed(double ms) { return {LatencyKind::Fixed, ms, ms, 0}; }

    double delay_ms(std::uint64_t call_index) const;
    void validate() const;
};

/// Wraps a store so that each search first waits a delay drawn from the model
/// on the given clock. Results are those of the inner store. Under a virtual
/// clock nothing sleeps: the reported latency is delay + modelled scan cost.
class LatencyInjectedStore final : public VectorStore {
public:
    LatencyInjectedStore(std::shared_ptr<VectorStore> inner, LatencyModel model,
                         std::shared_ptr<Clock> clock);

    std::size_t upsert(std::span<const DocumentChunk> chunks) override { return inner_->upsert(chunks); }
    SearchResponse search(const UnitVector& query, std::size_t k) const override;
    SearchResponse search_keyed(const UnitVector& query, std::size_t k, std::uint64_t key) const override;
    std::size_t dim() const override { return inner_->dim(); }
    std::size_t size() const override { return inner_->size(); }

    std::uint64_t search_calls() const { return calls_.load(); }

private:
    SearchResponse timed_search(const UnitVector& query, std::size_t k, double delay) const;

    std::shared_ptr<VectorStore> inner_;
    LatencyModel model_;
    std::shared_ptr<Clock> clock_;
    mutable std::atomic<std::uint64_t> calls_{0};
};

std::shared_ptr<VectorStore> with_latency(std::shared_ptr<VectorStore> store, LatencyModel model,
                                          std::shared_ptr<Clock> clock);

struct RemoteStoreConfig {
    std::string endpoint;  // e.g. "https://xyz.cloud.qdrant.io:6333"
    std::string collection = "memrouter";
    std::size_t dimension = 1536;
    double timeout_seconds = 5.0;
};

/// Client for a Qdrant-compatible vector database. API key from
/// MEMROUTER_VDB_API_KEY. Searches ask for stored vectors; when a point comes
/// back without one, its text is re-embedded with `embedder` if provided.
class RemoteVectorStore final : public VectorStore {
public:
    explicit RemoteVectorStore(RemoteStoreConfig cfg, std::shared_ptr<const Embedder> embedder = nullptr);

    std::size_t upsert(std::span<const DocumentChunk> chunks) override;
    SearchResponse search(const UnitVector& query, std::size_t k) const override;
    std::size_t dim() const override { return cfg_.dimension; }
    std::size_t size() const override { return upserted_.load(); }

private:
    RemoteStoreConfig cfg_;
    std::shared_ptr<const Embedder> embedder_;
    std::string api_key_;
    std::atomic<std::size_t> upserted_{0};
};

struct IngestStats {
    std::size_t documents = 0;
    std::size_t chunks = 0;
};

/// Splits, embeds and upserts every document.
IngestStats ingest(std::span<const RawDocument> docs, const ChunkerConfig& chunker, const Embedder& embedder,
                   VectorStore& store);

} // namespace memrouter
