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
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "memrouter/clock.hpp"
#include "memrouter/conversation_stream.hpp"
#include "memrouter/embedding.hpp"
#include "memrouter/fast_talker.hpp"
#include "memrouter/semantic_cache.hpp"
#include "memrouter/slow_thinker.hpp"
#include "memrouter/vector_store.hpp"

namespace memrouter {

enum class ClockKind { Real, Virtual };

std::string_view to_string(ClockKind kind);

struct RouterConfig {
    CacheConfig cache;
    FastTalkerConfig fast;
    SlowThinkerConfig slow;
    EmbedderConfig embedder;
    LatencyModel latency;
    ClockKind clock = ClockKind::Real;
    std::size_t window_capacity = 10;

    void validate() const;
};

struct TurnResult {
    std::size_t turn_index = 0;
    RetrievalOutcome outcome;
    std::string response;
    std::size_t cache_size_after = 0;
    std::optional<PrefetchReport> prefetch_report;
    double foreground_ms = 0.0;  // wall time of the foreground step
};

/// Replacements for components the session would otherwise build from the
/// config. Any field may be left empty.
struct SessionOverrides {
    std::shared_ptr<const Embedder> embedder;
    std::shared_ptr<const Predictor> predictor;
    std::shared_ptr<const Responder> responder;
    std::shared_ptr<Clock> clock;
};

/// One conversation: its own cache, bus, clock and pair of agents over a
/// shared, already ingested store.
///
/// Under a real clock the Slow Thinker sees each event as soon as it is
/// published and the inter-turn delay is slept. Under a virtual clock it is
/// held back until the foreground step of the turn is done, then given the
/// whole inter-turn window before the clock jumps, which makes runs
/// reproducible.
class Session {
public:
    /// Throws ConfigInvalid on an invalid config or when the embedder, store
    /// and configured dimensions disagree.
    static std::unique_ptr<Session> start(const RouterConfig& cfg, std::shared_ptr<VectorStore> store,
                                          SessionOverrides overrides = {});

    ~Session();

    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    TurnResult user_turn(std::string_view text, double inter_turn_delay_s);

    /// Closes the bus and stops the background agent; idempotent.
    CacheStats shutdown();

    const SemanticCache& cache() const { return *cache_; }
    const ConversationStream& bus() const { return *bus_; }
    const Clock& clock() const { return *clock_; }
    std::size_t turns() const noexcept { return next_turn_; }

    /// Store searches issued by the foreground and background agents.
    std::uint64_t foreground_searches() const { return fg_store_->search_calls(); }
    std::uint64_t background_searches() const { return bg_store_->search_calls(); }

private:
    Session() = default;

    RouterConfig cfg_;
    std::shared_ptr<Clock> clock_;
    std::shared_ptr<LatencyInjectedStore> fg_store_;
    std::shared_ptr<LatencyInjectedStore> bg_store_;
    std::shared_ptr<SemanticCache> cache_;
    std::unique_ptr<ConversationStream> bus_;
    std::unique_ptr<SlowThinker> slow_;
    std::unique_ptr<FastTalker> fast_;
    std::size_t next_turn_ = 0;
    bool closed_ = false;
    CacheStats final_stats_;
};

inline std::unique_ptr<Session> start_session(const RouterConfig& cfg, std::shared_ptr<VectorStore> store,
                                              SessionOverrides overrides = {}) {
    return Session::start(cfg, std::move(store), std::move(overrides));
}

} // namespace memrouter
