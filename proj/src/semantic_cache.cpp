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

#include "memrouter/semantic_cache.hpp"

#include <atomic>
#include <mutex>

#include "detail.hpp"

namespace memrouter {

namespace {

// Float rounding leaves |v|^2 a few ulps below 1, so a threshold of exactly
// 1.0 would otherwise reject an identical vector.
constexpr float kThresholdSlack = 1e-6f;

constexpr Eigen::Index kMinCapacity = 16;

} // namespace

std::string_view to_string(CacheSource source) {
    switch (source) {
    case CacheSource::Direct: return "direct";
    case CacheSource::Prediction: return "prediction";
    case CacheSource::MissFallback: return "miss_fallback";
    case CacheSource::Priority: return "priority";
    }
    return "unknown";
}

void CacheConfig::validate() const {
    if (max_size == 0) throw Error(Errc::ConfigInvalid, "cache max_size must be positive");
    if (!(ttl_seconds > 0)) throw Error(Errc::ConfigInvalid, "cache ttl_seconds must be positive");
    if (similarity_threshold < 0 || similarity_threshold > 1) {
        throw Error(Errc::ConfigInvalid, "similarity_threshold must be in [0, 1]");
    }
    if (dedup_threshold < 0 || dedup_threshold > 1) {
        throw Error(Errc::ConfigInvalid, "dedup_threshold must be in [0, 1]");
    }
    if (!(dedup_threshold > similarity_threshold)) {
        throw Error(Errc::ConfigInvalid, "dedup_threshold must exceed similarity_threshold");
    }
}

SemanticCache::SemanticCache(std::size_t dim, CacheConfig cfg) : dim_(dim), cfg_(cfg) {
    if (dim_ == 0) throw Error(Errc::ConfigInvalid, "cache dimension must be positive");
    cfg_.validate();
    keys_.resize(static_cast<Eigen::Index>(dim_), kMinCapacity);
    slots_.reserve(static_cast<std::size_t>(kMinCapacity));
}

CacheEntry SemanticCache::entry_of(const Slot& s) const {
    CacheEntry e;
    e.chunk = s.chunk;
    e.relevance_score = s.relevance;
    e.inserted_at = {s.inserted_at};
    e.expires_at = {s.expires_at};
    e.last_access = {std::atomic_ref<double>(s.last_access).load(std::memory_order_relaxed)};
    e.source = s.source;
    return e;
}

void SemanticCache::tombstone(std::size_t slot) {
    slots_[slot].live = false;
    slots_[slot].chunk.reset();
    --live_;
    ++tombstones_;
}

void SemanticCache::compact() {
    std::size_t out = 0;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        if (!slots_[i].live) continue;
        if (out != i) {
            slots_[out] = std::move(slots_[i]);
            keys_.col(static_cast<Eigen::Index>(out)) = keys_.col(static_cast<Eigen::Index>(i));
        }
        ++out;
    }
    slots_.resize(out);
    tombstones_ = 0;
}

std::size_t SemanticCache::append(ChunkPtr chunk, float relevance, CacheSource source, double now) {
    if (static_cast<Eigen::Index>(slots_.size()) == keys_.cols()) {
        if (tombstones_ * 4 > static_cast<std::size_t>(keys_.cols())) {
            compact();
        } else {
            keys_.conservativeResize(Eigen::NoChange, std::max(kMinCapacity, 2 * keys_.cols()));
        }
    }
    const std::size_t slot = slots_.size();
    keys_.col(static_cast<Eigen::Index>(slot)) = chunk->embedding.values();
    Slot s;
    s.chunk = std::move(chunk);
    s.relevance = relevance;
    s.inserted_at = now;
    s.expires_at = now + cfg_.ttl_seconds;
    s.last_access = now;
    s.source = source;
    s.live = true;
    slots_.push_back(std::move(s));
    ++live_;
    return slot;
}

PutOutcome SemanticCache::put(ChunkPtr chunk, float relevance_score, CacheSource source, Timestamp now) {
    if (!chunk) throw Error(Errc::InvalidArgument, "cannot cache a null chunk");
    require_same_dim(dim_, chunk->embedding.dim(), "cache put");
    const double t = now.seconds;

    std::unique_lock lock(mutex_);
    ++puts_;

    if (live_ > 0) {
        const auto n = static_cast<Eigen::Index>(slots_.size());
        const Eigen::VectorXf scores = keys_.leftCols(n).transpose() * chunk->embedding.values();
        Eigen::Index nearest = -1;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (slots_[static_cast<std::size_t>(i)].live && (nearest < 0 || scores[i] > scores[nearest])) {
                nearest = i;
            }
        }
        if (nearest >= 0 && clamp_similarity(scores[nearest]) > cfg_.dedup_threshold) {
            Slot& s = slots_[static_cast<std::size_t>(nearest)];
            keys_.col(nearest) = chunk->embedding.values();
            s.chunk = std::move(chunk);
            s.relevance = std::max(s.relevance, relevance_score);
            s.expires_at = t + cfg_.ttl_seconds;
            s.source = source;
            ++dedup_updates_;
            return PutOutcome::DedupUpdated;
        }
    }

    PutOutcome outcome = PutOutcome::Inserted;
    if (live_ >= cfg_.max_size) {
        std::size_t victim = slots_.size();
        for (std::size_t i = 0; i < slots_.size(); ++i) {
            if (!slots_[i].live) continue;
            if (victim == slots_.size() || slots_[i].last_access < slots_[victim].last_access) victim = i;
        }
        tombstone(victim);
        ++evictions_lru_;
        outcome = PutOutcome::EvictedThenInserted;
    }
    append(std::move(chunk), relevance_score, source, t);
    return outcome;
}

std::vector<CacheHit> SemanticCache::get(const UnitVector& query, std::size_t k, double tau,
                                         Timestamp now) const {
    require_same_dim(dim_, query.dim(), "cache get");
    const Stopwatch sw;
    const double t = now.seconds;
    const float threshold = static_cast<float>(tau) - kThresholdSlack;

    std::vector<CacheHit> out;
    {
        std::shared_lock lock(mutex_);
        const auto n = static_cast<Eigen::Index>(slots_.size());
        if (n > 0 && k > 0 && live_ > 0) {
            const Eigen::VectorXf scores = keys_.leftCols(n).transpose() * query.values();
            const auto best = detail::top_k(scores, k, [&](Eigen::Index i) {
                const Slot& s = slots_[static_cast<std::size_t>(i)];
                return s.live && s.expires_at > t && scores[i] >= threshold;
            });
            out.reserve(best.size());
            for (const auto i : best) {
                const Slot& s = slots_[static_cast<std::size_t>(i)];
                // Monotone: a reader holding an older timestamp never moves it back.
                std::atomic_ref<double> last(s.last_access);
                double seen = last.load(std::memory_order_relaxed);
                while (seen < t && !last.compare_exchange_weak(seen, t, std::memory_order_relaxed)) {
                }
                out.push_back({entry_of(s), clamp_similarity(scores[i])});
            }
        }
    }
    (out.empty() ? misses_ : hits_).fetch_add(1, std::memory_order_relaxed);
    get_latency_ms_.fetch_add(sw.elapsed_ms(), std::memory_order_relaxed);
    return out;
}

std::size_t SemanticCache::evict_expired(Timestamp now) {
    std::unique_lock lock(mutex_);
    std::size_t removed = 0;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        if (slots_[i].live && slots_[i].expires_at <= now.seconds) {
            tombstone(i);
            ++removed;
        }
    }
    evictions_ttl_ += removed;
    if (tombstones_ * 4 > static_cast<std::size_t>(keys_.cols())) compact();
    return removed;
}

CacheStats SemanticCache::stats() const {
    std::shared_lock lock(mutex_);
    CacheStats st;
    st.size = live_;
    st.hits = hits_.load(std::memory_order_relaxed);
    st.misses = misses_.load(std::memory_order_relaxed);
    st.puts = puts_;
    st.dedup_updates = dedup_updates_;
    st.evictions_lru = evictions_lru_;
    st.evictions_ttl = evictions_ttl_;
    st.total_get_latency_ms = get_latency_ms_.load(std::memory_order_relaxed);
    return st;
}

void SemanticCache::clear() {
    std::unique_lock lock(mutex_);
    slots_.clear();
    live_ = 0;
    tombstones_ = 0;
}

std::size_t SemanticCache::size() const {
    std::shared_lock lock(mutex_);
    return live_;
}

std::vector<CacheEntry> SemanticCache::entries() const {
    std::shared_lock lock(mutex_);
    std::vector<CacheEntry> out;
    out.reserve(live_);
    for (const auto& s : slots_) {
        if (s.live) out.push_back(entry_of(s));
    }
    return out;
}

} // namespace memrouter
