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
#include <shared_mutex>
#include <string_view>
#include <vector>

#include "memrouter/clock.hpp"
#include "memrouter/vector_store.hpp"

namespace memrouter {

enum class CacheSource { Direct, Prediction, MissFallback, Priority };

std::string_view to_string(CacheSource source);

struct CacheConfig {
    std::size_t max_size = 2000;
    double ttl_seconds = 300.0;
    double similarity_threshold = 0.40;  // tau
    double dedup_threshold = 0.95;

    void validate() const;
};

struct CacheEntry {
    ChunkPtr chunk;
    float relevance_score = 0.0f;  // score when fetched; metadata only
    Timestamp inserted_at;
    Timestamp expires_at;
    Timestamp last_access;
    CacheSource source = CacheSource::Direct;
};

struct CacheHit {
    CacheEntry entry;
    float similarity = 0.0f;
};

struct CacheStats {
    std::size_t size = 0;
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::uint64_t puts = 0;
    std::uint64_t dedup_updates = 0;
    std::uint64_t evictions_lru = 0;
    std::uint64_t evictions_ttl = 0;
    double total_get_latency_ms = 0.0;
};

enum class PutOutcome { Inserted, DedupUpdated, EvictedThenInserted };

/// Chunks indexed by their own embeddings in a flat inner-product matrix.
///
/// Storage is append-only with tombstones; slot order is insertion order, so
/// ties in similarity resolve to the earlier insertion. Tombstoned slots are
/// compacted away once they exceed a quarter of the allocated capacity.
///
/// get() runs under a shared lock (LRU touches and hit counters are atomic);
/// put(), evict_expired() and clear() are exclusive.
class SemanticCache {
public:
    SemanticCache(std::size_t dim, CacheConfig cfg = {});

    SemanticCache(const SemanticCache&) = delete;
    SemanticCache& operator=(const SemanticCache&) = delete;

    /// Inserts `chunk`, merging into the nearest entry when their cosine
    /// exceeds the dedup threshold (payload replaced, score = max, TTL
    /// refreshed). A full cache first drops the least recently accessed entry.
    PutOutcome put(ChunkPtr chunk, float relevance_score, CacheSource source, Timestamp now);

    /// Live entries with similarity >= tau, best first, at most k. Touches
    /// last_access of the returned entries. Empty results count as misses.
    std::vector<CacheHit> get(const UnitVector& query, std::size_t k, double tau, Timestamp now) const;

    std::vector<CacheHit> get(const UnitVector& query, std::size_t k, Timestamp now) const {
        return get(query, k, cfg_.similarity_threshold, now);
    }

    /// Removes entries whose deadline is at or before `now`.
    std::size_t evict_expired(Timestamp now);

    CacheStats stats() const;

    /// Drops all entries; lifetime counters are kept.
    void clear();

    std::size_t size() const;
    std::size_t dim() const noexcept { return dim_; }
    const CacheConfig& config() const noexcept { return cfg_; }

    /// Every live entry in slot order. Diagnostic/test use.
    std::vector<CacheEntry> entries() const;

private:
    struct Slot {
        ChunkPtr chunk;
        float relevance = 0.0f;
        double inserted_at = 0.0;
        double expires_at = 0.0;
        mutable double last_access = 0.0;  // written through std::atomic_ref under the shared lock
        CacheSource source = CacheSource::Direct;
        bool live = false;
    };

    CacheEntry entry_of(const Slot& s) const;
    void tombstone(std::size_t slot);
    void compact();
    std::size_t append(ChunkPtr chunk, float relevance, CacheSource source, double now);

    std::size_t dim_;
    CacheConfig cfg_;

    mutable std::shared_mutex mutex_;
    Eigen::MatrixXf keys_;  // dim x capacity
    std::vector<Slot> slots_;
    std::size_t live_ = 0;
    std::size_t tombstones_ = 0;

    std::uint64_t puts_ = 0;
    std::uint64_t dedup_updates_ = 0;
    std::uint64_t evictions_lru_ = 0;
    std::uint64_t evictions_ttl_ = 0;
    mutable std::atomic<std::uint64_t> hits_{0};
    mutable std::atomic<std::uint64_t> misses_{0};
    mutable std::atomic<double> get_latency_ms_{0.0};
};

} // namespace memrouter
