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

#include "memrouter/vector_store.hpp"

#include <mutex>

#include "detail.hpp"
#include "http_client.hpp"
#include "memrouter/embedding.hpp"

namespace memrouter {

LocalVectorStore::LocalVectorStore(std::size_t dim) : dim_(dim) {
    if (dim_ == 0) throw Error(Errc::ConfigInvalid, "store dimension must be positive");
    keys_.resize(static_cast<Eigen::Index>(dim_), 0);
}

std::size_t LocalVectorStore::upsert(std::span<const DocumentChunk> chunks) {
    for (const auto& c : chunks) require_same_dim(dim_, c.embedding.dim(), "upsert");

    std::unique_lock lock(mutex_);
    const auto needed = static_cast<Eigen::Index>(chunks_.size() + chunks.size());
    if (keys_.cols() < needed) {
        keys_.conservativeResize(Eigen::NoChange, std::max<Eigen::Index>(needed, 2 * keys_.cols()));
    }
    for (const auto& c : chunks) {
        auto ptr = std::make_shared<const DocumentChunk>(c);
        std::size_t slot;
        if (auto it = slot_of_.find(c.chunk_id); it != slot_of_.end()) {
            slot = it->second;
            chunks_[slot] = std::move(ptr);
        } else {
            slot = chunks_.size();
            slot_of_.emplace(c.chunk_id, slot);
            chunks_.push_back(std::move(ptr));
        }
        keys_.col(static_cast<Eigen::Index>(slot)) = c.embedding.values();
    }
    return chunks.size();
}

SearchResponse LocalVectorStore::search(const UnitVector& query, std::size_t k) const {
    require_same_dim(dim_, query.dim(), "search");
    const Stopwatch sw;
    SearchResponse out;
    {
        std::shared_lock lock(mutex_);
        const auto n = static_cast<Eigen::Index>(chunks_.size());
        if (n > 0 && k > 0) {
            const Eigen::VectorXf scores = keys_.leftCols(n).transpose() * query.values();
            const auto best = detail::top_k(scores, k, [](Eigen::Index) { return true; });
            out.results.reserve(best.size());
            for (const auto i : best) {
                out.results.push_back({chunks_[static_cast<std::size_t>(i)], clamp_similarity(scores[i])});
            }
        }
    }
    out.latency_ms = sw.elapsed_ms();
    return out;
}

std::size_t LocalVectorStore::size() const {
    std::shared_lock lock(mutex_);
    return chunks_.size();
}

double LatencyModel::delay_ms(std::uint64_t call_index) const {
    switch (kind) {
    case LatencyKind::None: return 0.0;
    case LatencyKind::Fixed: return lo_ms;
    case LatencyKind::Uniform: {
        const std::uint64_t bits = detail::splitmix64(seed ^ detail::splitmix64(call_index));
        return lo_ms + (hi_ms - lo_ms) * detail::unit_interval(bits);
    }
    }
    return 0.0;
}

void LatencyModel::validate() const {
    if (lo_ms < 0 || hi_ms < 0 || lo_ms > hi_ms) {
        throw Error(Errc::ConfigInvalid, "latency model needs 0 <= lo_ms <= hi_ms");
    }
}

LatencyInjectedStore::LatencyInjectedStore(std::shared_ptr<VectorStore> inner, LatencyModel model,
                                           std::shared_ptr<Clock> clock)
    : inner_(std::move(inner)), model_(model), clock_(std::move(clock)) {
    model_.validate();
    if (!inner_ || !clock_) throw Error(Errc::ConfigInvalid, "latency wrapper needs a store and a clock");
}

SearchResponse LatencyInjectedStore::search(const UnitVector& query, std::size_t k) const {
    const std::uint64_t call = calls_.fetch_add(1, std::memory_order_relaxed);
    return timed_search(query, k, model_.delay_ms(call));
}

SearchResponse LatencyInjectedStore::search_keyed(const UnitVector& query, std::size_t k, std::uint64_t key) const {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return timed_search(query, k, model_.delay_ms(key));
}

SearchResponse LatencyInjectedStore::timed_search(const UnitVector& query, std::size_t k, double delay) const {
    const Stopwatch sw;
    clock_->wait(Seconds{delay / 1000.0});
    SearchResponse out = inner_->search(query, k);
    out.latency_ms = clock_->charge(sw.elapsed_ms(),
                                    delay + clock_->costs().scan_ms(inner_->size(), inner_->dim()));
    return out;
}

std::shared_ptr<VectorStore> with_latency(std::shared_ptr<VectorStore> store, LatencyModel model,
                                          std::shared_ptr<Clock> clock) {
    return std::make_shared<LatencyInjectedStore>(std::move(store), model, std::move(clock));
}

RemoteVectorStore::RemoteVectorStore(RemoteStoreConfig cfg, std::shared_ptr<const Embedder> embedder)
    : cfg_(std::move(cfg)),
      embedder_(std::move(embedder)),
      api_key_(detail::env_or_empty("MEMROUTER_VDB_API_KEY")) {
    if (cfg_.endpoint.empty()) throw Error(Errc::ConfigInvalid, "remote store needs an endpoint");
    if (cfg_.dimension == 0) throw Error(Errc::ConfigInvalid, "store dimension must be positive");
}

std::size_t RemoteVectorStore::upsert(std::span<const DocumentChunk> chunks) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& c : chunks) {
        require_same_dim(cfg_.dimension, c.embedding.dim(), "upsert");
        const auto& v = c.embedding.values();
        points.push_back({
            // Qdrant ids must be unsigned integers or UUIDs.
            {"id", token_hash(c.chunk_id, 0) >> 1},
            {"vector", std::vector<float>(v.data(), v.data() + v.size())},
            {"payload", {{"text", c.text}, {"doc_id", c.doc_id}, {"chunk_id", c.chunk_id}}},
        });
    }
    detail::request_json(detail::HttpMethod::Put, cfg_.endpoint,
                         "/collections/" + cfg_.collection + "/points?wait=true", {{"points", points}},
                         api_key_, cfg_.timeout_seconds);
    upserted_ += chunks.size();
    return chunks.size();
}

SearchResponse RemoteVectorStore::search(const UnitVector& query, std::size_t k) const {
    require_same_dim(cfg_.dimension, query.dim(), "search");
    const auto& q = query.values();
    const nlohmann::json body = {
        {"vector", std::vector<float>(q.data(), q.data() + q.size())},
        {"limit", k},
        {"with_payload", true},
        {"with_vector", true},
    };
    const Stopwatch sw;
    const auto response = detail::post_json(cfg_.endpoint, "/collections/" + cfg_.collection + "/points/search",
                                            body, api_key_, cfg_.timeout_seconds);
    SearchResponse out;
    out.latency_ms = sw.elapsed_ms();

    if (!response.is_object() || !response.contains("result") || !response["result"].is_array()) {
        throw Error(Errc::ProtocolError, "search response lacks a result array");
    }
    for (const auto& point : response["result"]) {
        if (!point.is_object() || !point.contains("score") || !point["score"].is_number() ||
            !point.contains("payload") || !point["payload"].is_object()) {
            throw Error(Errc::ProtocolError, "malformed scored point");
        }
        const double score = point["score"].get<double>();
        if (score < -1.0 || score > 1.0) {
            throw Error(Errc::ProtocolError, "score out of range: " + std::to_string(score));
        }
        const auto& payload = point["payload"];
        DocumentChunk chunk;
        chunk.text = payload.value("text", std::string());
        chunk.doc_id = payload.value("doc_id", std::string());
        if (payload.contains("chunk_id") && payload["chunk_id"].is_string()) {
            chunk.chunk_id = payload["chunk_id"].get<std::string>();
        } else if (point.contains("id")) {
            chunk.chunk_id = point["id"].is_string() ? point["id"].get<std::string>() : point["id"].dump();
        }
        if (point.contains("vector") && point["vector"].is_array()) {
            const auto& vec = point["vector"];
            if (vec.size() != cfg_.dimension) throw Error(Errc::ProtocolError, "point vector has wrong dimension");
            Vector<float> raw(static_cast<Eigen::Index>(vec.size()));
            for (std::size_t i = 0; i < vec.size(); ++i) {
                if (!vec[i].is_number()) throw Error(Errc::ProtocolError, "non-numeric vector component");
                raw[static_cast<Eigen::Index>(i)] = vec[i].get<float>();
            }
            chunk.embedding = normalize(raw);
        } else if (embedder_) {
            chunk.embedding = embedder_->embed(chunk.text);
        } else {
            throw Error(Errc::ProtocolError, "point has no vector and no embedder is configured");
        }
        out.results.push_back({std::make_shared<const DocumentChunk>(std::move(chunk)),
                               static_cast<float>(score)});
    }
    return out;
}

IngestStats ingest(std::span<const RawDocument> docs, const ChunkerConfig& chunker, const Embedder& embedder,
                   VectorStore& store) {
    if (embedder.dim() != store.dim()) {
        throw Error(Errc::DimensionMismatch, "embedder dimension " + std::to_string(embedder.dim()) +
                                                 " differs from store dimension " + std::to_string(store.dim()));
    }
    IngestStats stats;
    for (const auto& doc : docs) {
        std::vector<DocumentChunk> batch;
        for (auto& c : split_document(doc, chunker)) {
            UnitVector v = embedder.embed(c.text);
            batch.push_back({std::move(c.chunk_id), std::move(c.doc_id), std::move(c.text), std::move(v)});
        }
        stats.chunks += store.upsert(batch);
        ++stats.documents;
    }
    return stats;
}

} // namespace memrouter
