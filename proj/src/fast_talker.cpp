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


#include "memrouter/fast_talker.hpp"

#include <algorithm>
#include <optional>

#include "http_client.hpp"
#include "memrouter/error.hpp"
#include "memrouter/text.hpp"

namespace memrouter {

namespace {

std::string_view first_sentence(std::string_view text) {
    text = trim(text);
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '\n') return trim(text.substr(0, i));
        if ((c == '.' || c == '?' || c == '!') && (i + 1 == text.size() || text[i + 1] == ' ' || text[i + 1] == '\n')) {
            return text.substr(0, i + 1);
        }
    }
    return text;
}

} // namespace

std::string_view to_string(RetrievalSource source) {
    return source == RetrievalSource::CacheHit ? "cache_hit" : "store_fallback";
}

void FastTalkerConfig::validate() const {
    if (max_context_chunks == 0) throw Error(Errc::ConfigInvalid, "max_context_chunks must be at least 1");
    if (top_k == 0) throw Error(Errc::ConfigInvalid, "top_k must be at least 1");
}

std::string format_context(std::span<const RetrievedChunk> chunks) {
    std::string out;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (i > 0) out += "\n\n";
        out += '[' + std::to_string(i + 1) + "] (" + chunks[i].chunk->doc_id + ") " + chunks[i].chunk->text;
    }
    return out;
}

std::string TemplateResponder::respond(std::string_view, std::span<const RetrievedChunk> chunks,
                                       std::string_view) const {
    if (chunks.empty()) return "I could not find anything about that in the knowledge base.";
    std::vector<std::string_view> docs;
    for (const auto& c : chunks) {
        if (std::find(docs.begin(), docs.end(), c.chunk->doc_id) == docs.end()) docs.push_back(c.chunk->doc_id);
    }
    std::string out = "Based on " + std::to_string(chunks.size()) + " passages about ";
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (i > 0) out += ", ";
        out += docs[i];
    }
    out += ": ";
    out += first_sentence(chunks.front().chunk->text);
    return out;
}

ChatResponder::ChatResponder(ChatConfig cfg)
    : cfg_(std::move(cfg)), api_key_(detail::env_or_empty("MEMROUTER_LLM_API_KEY")) {
    if (cfg_.endpoint.empty()) throw Error(Errc::ConfigInvalid, "chat responder needs an endpoint");
}

std::string ChatResponder::respond(std::string_view query, std::span<const RetrievedChunk>,
                                   std::string_view context) const {
    std::string system =
        "You are a voice support agent. Answer in two or three short spoken sentences using only the "
        "numbered passages below. If they do not cover the question, say so.\n\n";
    system += context;
    const std::pair<std::string, std::string> messages[] = {{"system", std::move(system)},
                                                            {"user", std::string(query)}};
    return chat_complete(cfg_, api_key_, messages);
}

FastTalker::FastTalker(FastTalkerConfig cfg, std::shared_ptr<const Embedder> embedder,
                       std::shared_ptr<const VectorStore> store, std::shared_ptr<SemanticCache> cache,
                       std::shared_ptr<const Responder> responder, ConversationStream* bus,
                       std::shared_ptr<const Clock> clock)
    : cfg_(cfg),
      embedder_(std::move(embedder)),
      store_(std::move(store)),
      cache_(std::move(cache)),
      responder_(std::move(responder)),
      bus_(bus),
      clock_(std::move(clock)) {
    cfg_.validate();
    if (!embedder_ || !store_ || !clock_) {
        throw Error(Errc::ConfigInvalid, "fast talker needs an embedder, a store and a clock");
    }
    if (cache_ && cache_->dim() != embedder_->dim()) {
        throw Error(Errc::ConfigInvalid, "cache and embedder dimensions differ");
    }
    if (store_->dim() != embedder_->dim()) throw Error(Errc::ConfigInvalid, "store and embedder dimensions differ");
}

QueryReply FastTalker::handle_query(std::string_view text, Timestamp now, std::size_t turn_index) {
    if (trim(text).empty()) throw Error(Errc::EmptyQuery, "query text is empty");

    QueryReply reply;
    RetrievalOutcome& out = reply.outcome;
    const CostModel& costs = clock_->costs();

    std::optional<UnitVector> query;
    {
        const Stopwatch sw;
        try {
            query = embedder_->embed(text);
        } catch (const std::exception& e) {
            throw Error(Errc::EmbeddingFailed, e.what());
        }
        out.embed_latency_ms = clock_->charge(sw.elapsed_ms(), costs.embed_ms(text.size()));
    }

    if (cache_) {
        const std::size_t scanned = cache_->size();
        const Stopwatch sw;
        auto hits = cache_->get(*query, cfg_.top_k, now);
        const double lookup_ms = clock_->charge(sw.elapsed_ms(), costs.scan_ms(scanned, cache_->dim()));
        if (!hits.empty()) {
            out.source = RetrievalSource::CacheHit;
            out.retrieval_latency_ms = lookup_ms;
            out.chunks.reserve(hits.size());
            for (auto& h : hits) out.chunks.push_back({std::move(h.entry.chunk), h.similarity});
        } else if (bus_) {
            bus_->publish({EventKind::PriorityRetrieval, turn_index, std::string(text), now, 0});
        }
        if (!hits.empty() || !cfg_.fallback_enabled) {
            out.retrieval_latency_ms = lookup_ms;
            out.degraded = hits.empty();
        }
    }

    if (out.source == RetrievalSource::StoreFallback && (!cache_ || cfg_.fallback_enabled)) {
        try {
            const SearchResponse found = store_->search_keyed(*query, cfg_.top_k, turn_index);
            out.retrieval_latency_ms = found.latency_ms;
            out.chunks.reserve(found.results.size());
            for (const auto& r : found.results) {
                out.chunks.push_back({r.chunk, r.score});
                if (cache_ && cfg_.cache_on_miss) cache_->put(r.chunk, r.score, CacheSource::MissFallback, now);
            }
        } catch (const Error&) {
            out.chunks.clear();
            out.degraded = true;
        }
    }

    const std::size_t shown = std::min(out.chunks.size(), cfg_.max_context_chunks);
    const std::span<const RetrievedChunk> context_chunks(out.chunks.data(), shown);
    const std::string context = format_context(context_chunks);
    const Responder& responder = responder_ ? *responder_ : fallback_responder_;
    try {
        reply.response = responder.respond(text, context_chunks, context);
    } catch (const std::exception&) {
        reply.response = fallback_responder_.respond(text, context_chunks, context);
        out.degraded = true;
    }
    return reply;
}

} // namespace memrouter
