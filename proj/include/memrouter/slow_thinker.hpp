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

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "memrouter/conversation_stream.hpp"
#include "memrouter/embedding.hpp"
#include "memrouter/predictor.hpp"
#include "memrouter/semantic_cache.hpp"
#include "memrouter/vector_store.hpp"

namespace memrouter {

struct SlowThinkerConfig {
    std::size_t prefetch_top_k = 10;
    double rate_limit_seconds = 0.5;
    std::size_t priority_k_multiplier = 2;
    PredictorConfig predictor;

    void validate() const;
};

/// What one UserUtterance produced. Counts are new cache entries (dedup
/// merges are not counted).
struct PrefetchReport {
    std::size_t turn_index = 0;
    std::size_t direct_cached = 0;
    std::size_t predictions_made = 0;
    std::size_t prefetched = 0;
    bool rate_limited = false;
    bool degraded = false;  // primary predictor failed, keyword fallback used
    std::vector<std::string> errors;
};

/// Background agent. Handles UserUtterance (direct retrieval, prediction,
/// parallel prefetch) and PriorityRetrieval (expanded direct retrieval).
/// Failures are recorded in reports, never thrown.
class SlowThinker {
public:
    SlowThinker(SlowThinkerConfig cfg, std::shared_ptr<const Embedder> embedder,
                std::shared_ptr<const VectorStore> store, std::shared_ptr<SemanticCache> cache,
                std::shared_ptr<const Predictor> predictor, const ConversationStream* window);
    ~SlowThinker();

    SlowThinker(const SlowThinker&) = delete;
    SlowThinker& operator=(const SlowThinker&) = delete;

    PrefetchReport on_user_utterance(const ConversationEvent& event, Timestamp now);
    std::size_t on_priority_retrieval(const ConversationEvent& event, Timestamp now);

    /// Starts the consumer thread. Events are processed only once released
    /// through release_through(), which lets the router decide when the
    /// background window opens.
    void start(Subscription subscription, std::shared_ptr<const Clock> clock);
    void release_through(std::uint64_t sequence);
    void release_all();
    /// Blocks until every event up to `sequence` has been handled.
    void wait_processed(std::uint64_t sequence);
    /// Abandons queued events, lets in-flight work finish and joins the thread.
    void stop();

    std::optional<PrefetchReport> report_for(std::size_t turn_index) const;

private:
    std::size_t fetch_and_cache(const std::string& text, std::size_t k, CacheSource source, Timestamp now);
    void run(Subscription subscription);

    SlowThinkerConfig cfg_;
    std::shared_ptr<const Embedder> embedder_;
    std::shared_ptr<const VectorStore> store_;
    std::shared_ptr<SemanticCache> cache_;
    std::shared_ptr<const Predictor> predictor_;
    KeywordPredictor keyword_fallback_;
    const ConversationStream* window_;
    std::optional<Timestamp> last_prediction_;

    std::shared_ptr<const Clock> clock_;
    std::thread worker_;
    mutable std::mutex mutex_;
    std::condition_variable gate_;
    std::uint64_t released_ = 0;
    std::uint64_t processed_ = 0;
    bool stopping_ = false;
    bool finished_ = false;
    std::map<std::size_t, PrefetchReport> reports_;
};

} // namespace memrouter
