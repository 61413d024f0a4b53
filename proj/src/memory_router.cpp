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


#include "memrouter/memory_router.hpp"

#include "detail.hpp"
#include "memrouter/error.hpp"
#include "memrouter/text.hpp"

namespace memrouter {

std::string_view to_string(ClockKind kind) { return kind == ClockKind::Virtual ? "virtual" : "real"; }

void RouterConfig::validate() const {
    cache.validate();
    fast.validate();
    slow.validate();
    embedder.validate();
    latency.validate();
    if (window_capacity == 0) throw Error(Errc::ConfigInvalid, "window_capacity must be positive");
    if (slow.predictor.context_turns > window_capacity) {
        throw Error(Errc::ConfigInvalid, "context_turns cannot exceed window_capacity");
    }
}

std::unique_ptr<Session> Session::start(const RouterConfig& cfg, std::shared_ptr<VectorStore> store,
                                        SessionOverrides overrides) {
    cfg.validate();
    if (!store) throw Error(Errc::ConfigInvalid, "session needs a vector store");

    std::shared_ptr<const Embedder> embedder =
        overrides.embedder ? std::move(overrides.embedder) : make_embedder(cfg.embedder);
    if (embedder->dim() != cfg.embedder.dimension) {
        throw Error(Errc::ConfigInvalid, "embedder dimension " + std::to_string(embedder->dim()) +
                                             " differs from configured " + std::to_string(cfg.embedder.dimension));
    }
    if (store->dim() != embedder->dim()) {
        throw Error(Errc::ConfigInvalid, "store dimension " + std::to_string(store->dim()) +
                                             " differs from embedder dimension " + std::to_string(embedder->dim()));
    }

    std::unique_ptr<Session> s(new Session());
    s->cfg_ = cfg;
    s->clock_ = overrides.clock ? std::move(overrides.clock)
                                : (cfg.clock == ClockKind::Virtual ? std::shared_ptr<Clock>(std::make_shared<VirtualClock>())
                                                                   : std::make_shared<RealClock>());
    // Separate delay streams so background traffic never shifts the delays
    // the foreground draws.
    LatencyModel bg_latency = cfg.latency;
    bg_latency.seed = detail::splitmix64(cfg.latency.seed ^ 0x6267u);
    s->fg_store_ = std::make_shared<LatencyInjectedStore>(store, cfg.latency, s->clock_);
    s->bg_store_ = std::make_shared<LatencyInjectedStore>(store, bg_latency, s->clock_);
    s->cache_ = std::make_shared<SemanticCache>(embedder->dim(), cfg.cache);
    s->bus_ = std::make_unique<ConversationStream>(cfg.window_capacity);

    std::shared_ptr<const Predictor> predictor =
        overrides.predictor ? std::move(overrides.predictor) : make_predictor(cfg.slow.predictor);
    std::shared_ptr<const Responder> responder =
        overrides.responder ? std::move(overrides.responder) : std::make_shared<TemplateResponder>();

    s->slow_ = std::make_unique<SlowThinker>(cfg.slow, embedder, s->bg_store_, s->cache_, std::move(predictor),
                                             s->bus_.get());
    s->fast_ = std::make_unique<FastTalker>(cfg.fast, embedder, s->fg_store_, s->cache_, std::move(responder),
                                            s->bus_.get(), s->clock_);
    s->slow_->start(s->bus_->subscribe(), s->clock_);
    if (!s->clock_->is_virtual()) s->slow_->release_all();
    return s;
}

Session::~Session() { shutdown(); }

TurnResult Session::user_turn(std::string_view text, double inter_turn_delay_s) {
    if (closed_) throw Error(Errc::BusClosed, "session is shut down");
    if (inter_turn_delay_s < 0) throw Error(Errc::InvalidArgument, "inter-turn delay must be non-negative");
    if (trim(text).empty()) throw Error(Errc::EmptyQuery, "query text is empty");

    TurnResult result;
    result.turn_index = next_turn_;
    const Timestamp now = clock_->now();

    const Stopwatch sw;
    bus_->publish({EventKind::UserUtterance, result.turn_index, std::string(text), now, 0});
    ++next_turn_;
    QueryReply reply = fast_->handle_query(text, now, result.turn_index);
    result.foreground_ms = sw.elapsed_ms();
    result.outcome = std::move(reply.outcome);
    result.response = std::move(reply.response);
    const std::uint64_t last = bus_->publish({EventKind::AgentResponse, result.turn_index, result.response, now, 0});

    if (clock_->is_virtual()) {
        slow_->release_through(last);
        slow_->wait_processed(last);
    }
    clock_->advance(Seconds{inter_turn_delay_s});
    cache_->evict_expired(clock_->now());

    result.cache_size_after = cache_->size();
    result.prefetch_report = slow_->report_for(result.turn_index);
    return result;
}

CacheStats Session::shutdown() {
    if (closed_) return final_stats_;
    closed_ = true;
    bus_->close();
    slow_->stop();
    final_stats_ = cache_->stats();
    return final_stats_;
}

} // namespace memrouter
