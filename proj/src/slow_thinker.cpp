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

#include "memrouter/slow_thinker.hpp"

#include <future>
#include <limits>

#include "memrouter/error.hpp"

namespace memrouter {

void SlowThinkerConfig::validate() const {
    if (prefetch_top_k == 0) throw Error(Errc::ConfigInvalid, "prefetch_top_k must be at least 1");
    if (rate_limit_seconds < 0) throw Error(Errc::ConfigInvalid, "rate_limit_seconds must be non-negative");
    if (priority_k_multiplier == 0) throw Error(Errc::ConfigInvalid, "priority_k_multiplier must be positive");
    if (predictor.max_predictions == 0) throw Error(Errc::ConfigInvalid, "max_predictions must be at least 1");
    if (predictor.context_turns == 0) throw Error(Errc::ConfigInvalid, "context_turns must be at least 1");
}

SlowThinker::SlowThinker(SlowThinkerConfig cfg, std::shared_ptr<const Embedder> embedder,
                         std::shared_ptr<const VectorStore> store, std::shared_ptr<SemanticCache> cache,
                         std::shared_ptr<const Predictor> predictor, const ConversationStream* window)
    : cfg_(std::move(cfg)),
      embedder_(std::move(embedder)),
      store_(std::move(store)),
      cache_(std::move(cache)),
      predictor_(std::move(predictor)),
      keyword_fallback_(cfg_.predictor.max_predictions),
      window_(window) {
    cfg_.validate();
    if (!embedder_ || !store_ || !cache_) {
        throw Error(Errc::ConfigInvalid, "slow thinker needs an embedder, a store and a cache");
    }
}

SlowThinker::~SlowThinker() { stop(); }

std::size_t SlowThinker::fetch_and_cache(const std::string& text, std::size_t k, CacheSource source,
                                         Timestamp now) {
    const UnitVector query = embedder_->embed(text);
    const SearchResponse found = store_->search(query, k);
    std::size_t added = 0;
    for (const auto& r : found.results) {
        if (cache_->put(r.chunk, r.score, source, now) != PutOutcome::DedupUpdated) ++added;
    }
    return added;
}

PrefetchReport SlowThinker::on_user_utterance(const ConversationEvent& event, Timestamp now) {
    PrefetchReport report;
    report.turn_index = event.turn_index;

    try {
        report.direct_cached = fetch_and_cache(event.text, cfg_.prefetch_top_k, CacheSource::Direct, now);
    } catch (const std::exception& e) {
        report.errors.emplace_back(std::string("direct retrieval: ") + e.what());
    }

    if (last_prediction_ && (now - *last_prediction_).count() < cfg_.rate_limit_seconds) {
        report.rate_limited = true;
        return report;
    }
    last_prediction_ = now;

    std::vector<Turn> context;
    if (window_) context = window_->window_context(cfg_.predictor.context_turns);
    if (context.empty() && !event.text.empty()) context.push_back({Role::User, event.text});

    std::vector<Prediction> predictions;
    try {
        if (!predictor_) throw Error(Errc::PredictorUnavailable, "no predictor configured");
        predictions = predictor_->predict(context, event.turn_index);
    } catch (const std::exception& e) {
        report.degraded = true;
        report.errors.emplace_back(std::string("prediction: ") + e.what());
        try {
            predictions = keyword_fallback_.predict(context, event.turn_index);
        } catch (const std::exception& fallback_error) {
            report.errors.emplace_back(std::string("keyword fallback: ") + fallback_error.what());
        }
    }
    if (predictions.size() > cfg_.predictor.max_predictions) predictions.resize(cfg_.predictor.max_predictions);
    report.predictions_made = predictions.size();

    // One task per prediction; each embeds, searches and caches on its own.
    std::vector<std::future<std::size_t>> tasks;
    tasks.reserve(predictions.size());
    for (const auto& p : predictions) {
        tasks.push_back(std::async(std::launch::async, [this, text = p.text, now] {
            return fetch_and_cache(text, cfg_.prefetch_top_k, CacheSource::Prediction, now);
        }));
    }
    for (auto& task : tasks) {
        try {
            report.prefetched += task.get();
        } catch (const std::exception& e) {
            report.errors.emplace_back(std::string("prefetch: ") + e.what());
        }
    }
    return report;
}

std::size_t SlowThinker::on_priority_retrieval(const ConversationEvent& event, Timestamp now) {
    try {
        return fetch_and_cache(event.text, cfg_.prefetch_top_k * cfg_.priority_k_multiplier, CacheSource::Priority,
                               now);
    } catch (const std::exception&) {
        return 0;
    }
}

void SlowThinker::start(Subscription subscription, std::shared_ptr<const Clock> clock) {
    if (worker_.joinable()) throw Error(Errc::InvalidArgument, "slow thinker already started");
    if (!clock) throw Error(Errc::ConfigInvalid, "slow thinker needs a clock");
    clock_ = std::move(clock);
    worker_ = std::thread([this, sub = std::move(subscription)]() mutable { run(std::move(sub)); });
}

void SlowThinker::run(Subscription subscription) {
    for (;;) {
        auto event = subscription.next_event_for(std::chrono::milliseconds(50));
        if (!event) {
            if (subscription.ended()) break;
            std::lock_guard lock(mutex_);
            if (stopping_) break;
            continue;
        }
        {
            std::unique_lock lock(mutex_);
            gate_.wait(lock, [&] { return stopping_ || released_ >= event->sequence; });
            if (stopping_) continue;
        }
        const Timestamp now = clock_->now();
        if (event->kind == EventKind::UserUtterance) {
            auto report = on_user_utterance(*event, now);
            std::lock_guard lock(mutex_);
            reports_[report.turn_index] = std::move(report);
        } else if (event->kind == EventKind::PriorityRetrieval) {
            on_priority_retrieval(*event, now);
        }
        // AgentResponse, SilenceDetected and TopicShift need no handling.
        {
            std::lock_guard lock(mutex_);
            processed_ = event->sequence;
        }
        gate_.notify_all();
    }
    {
        std::lock_guard lock(mutex_);
        finished_ = true;
    }
    gate_.notify_all();
}

void SlowThinker::release_through(std::uint64_t sequence) {
    {
        std::lock_guard lock(mutex_);
        released_ = std::max(released_, sequence);
    }
    gate_.notify_all();
}

void SlowThinker::release_all() { release_through(std::numeric_limits<std::uint64_t>::max()); }

void SlowThinker::wait_processed(std::uint64_t sequence) {
    std::unique_lock lock(mutex_);
    gate_.wait(lock, [&] { return processed_ >= sequence || finished_ || stopping_; });
}

void SlowThinker::stop() {
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    gate_.notify_all();
    if (worker_.joinable()) worker_.join();
}

std::optional<PrefetchReport> SlowThinker::report_for(std::size_t turn_index) const {
    std::lock_guard lock(mutex_);
    const auto it = reports_.find(turn_index);
    if (it == reports_.end()) return std::nullopt;
    return it->second;
}

} // namespace memrouter
