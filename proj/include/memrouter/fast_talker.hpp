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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "memrouter/clock.hpp"
#include "memrouter/conversation_stream.hpp"
#include "memrouter/embedding.hpp"
#include "memrouter/predictor.hpp"
#include "memrouter/semantic_cache.hpp"
#include "memrouter/vector_store.hpp"

namespace memrouter {

enum class RetrievalSource { CacheHit, StoreFallback };

std::string_view to_string(RetrievalSource source);

struct RetrievedChunk {
    ChunkPtr chunk;
    float similarity = 0.0f;
};

struct RetrievalOutcome {
    RetrievalSource source = RetrievalSource::StoreFallback;
    std::vector<RetrievedChunk> chunks;  // best first
    double retrieval_latency_ms = 0.0;   // cache lookup on a hit, store search on a miss
    double embed_latency_ms = 0.0;
    bool degraded = false;  // answered without the context it should have had
};

struct FastTalkerConfig {
    std::size_t max_context_chunks = 10;
    bool fallback_enabled = true;
    bool cache_on_miss = true;
    std::size_t top_k = 10;  // cache lookup and store fallback alike

    void validate() const;
};

/// "[i] (doc_id) text" per chunk, joined by blank lines.
std::string format_context(std::span<const RetrievedChunk> chunks);

/// Turns a query and its retrieved context into the agent's reply.
class Responder {
public:
    virtual ~Responder() = default;

    virtual std::string respond(std::string_view query, std::span<const RetrievedChunk> chunks,
                                std::string_view context) const = 0;
};

/// "Based on {m} passages about {doc_ids}: {first sentence of top chunk}".
class TemplateResponder final : public Responder {
public:
    std::string respond(std::string_view query, std::span<const RetrievedChunk> chunks,
                        std::string_view context) const override;
};

/// Answers through a chat-completions endpoint.
class ChatResponder final : public Responder {
public:
    explicit ChatResponder(ChatConfig cfg);

    std::string respond(std::string_view query, std::span<const RetrievedChunk> chunks,
                        std::string_view context) const override;

private:
    ChatConfig cfg_;
    std::string api_key_;
};

struct QueryReply {
    RetrievalOutcome outcome;
    std::string response;
};

/// Foreground agent. Embeds the query, serves it from the cache when
/// anything clears tau, otherwise searches the store, caches the results and
/// asks the Slow Thinker for a priority retrieval.
///
/// Without a cache every query goes straight to the store and nothing is
/// published, which is the plain retrieve-then-respond pipeline.
class FastTalker {
public:
    FastTalker(FastTalkerConfig cfg, std::shared_ptr<const Embedder> embedder,
               std::shared_ptr<const VectorStore> store, std::shared_ptr<SemanticCache> cache,
               std::shared_ptr<const Responder> responder, ConversationStream* bus,
               std::shared_ptr<const Clock> clock);

    /// Throws EmptyQuery for blank text and EmbeddingFailed when the query
    /// cannot be embedded. Store and responder failures degrade the reply.
    QueryReply handle_query(std::string_view text, Timestamp now, std::size_t turn_index);

    const FastTalkerConfig& config() const noexcept { return cfg_; }

private:
    FastTalkerConfig cfg_;
    std::shared_ptr<const Embedder> embedder_;
    std::shared_ptr<const VectorStore> store_;
    std::shared_ptr<SemanticCache> cache_;
    std::shared_ptr<const Responder> responder_;
    ConversationStream* bus_;
    std::shared_ptr<const Clock> clock_;
    TemplateResponder fallback_responder_;
};

} // namespace memrouter
