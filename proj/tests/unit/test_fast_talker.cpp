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


#include <gtest/gtest.h>

#include "memrouter/fast_talker.hpp"
#include "test_support.hpp"

using namespace memrouter;

namespace {

constexpr std::size_t kDim = 64;

struct Fixture {
    std::shared_ptr<HashingEmbedder> embedder = std::make_shared<HashingEmbedder>(kDim, 0);
    std::shared_ptr<LocalVectorStore> inner = std::make_shared<LocalVectorStore>(kDim);
    std::shared_ptr<VirtualClock> clock = std::make_shared<VirtualClock>();
    std::shared_ptr<LatencyInjectedStore> store;
    std::shared_ptr<SemanticCache> cache = std::make_shared<SemanticCache>(kDim);
    ConversationStream bus;
    Subscription sub = bus.subscribe();

    Fixture() {
        const std::vector<std::pair<std::string, std::string>> docs = {
            {"pricing", "Starter plan pricing is 29 dollars per seat. Annual billing saves 20 percent."},
            {"pricing", "Enterprise plan pricing is negotiated. Volume discounts apply."},
            {"api", "The contacts API endpoint accepts JSON. Rate limits are 100 requests per minute."},
            {"security", "Single sign on supports SAML and OIDC."},
        };
        std::vector<DocumentChunk> chunks;
        for (std::size_t i = 0; i < docs.size(); ++i) {
            chunks.push_back({docs[i].first + "#" + std::to_string(i), docs[i].first, docs[i].second,
                              embedder->embed(docs[i].second)});
        }
        inner->upsert(chunks);
        store = std::make_shared<LatencyInjectedStore>(inner, LatencyModel::uniform(97, 307, 5), clock);
    }

    FastTalker make(FastTalkerConfig cfg = {}, bool with_cache = true, std::shared_ptr<const Responder> r = nullptr) {
        return FastTalker(cfg, embedder, store, with_cache ? cache : nullptr, std::move(r), &bus, clock);
    }

    std::vector<ConversationEvent> drain() {
        std::vector<ConversationEvent> out;
        while (auto e = sub.next_event_for(std::chrono::milliseconds(0))) out.push_back(*e);
        return out;
    }
};

class FailingResponder final : public Responder {
public:
    std::string respond(std::string_view, std::span<const RetrievedChunk>, std::string_view) const override {
        throw Error(Errc::NetworkError, "llm down");
    }
};

class FailingEmbedder final : public Embedder {
public:
    UnitVector embed(std::string_view) const override { throw Error(Errc::NetworkError, "embedder down"); }
    std::size_t dim() const override { return kDim; }
};

class BrokenStore final : public VectorStore {
public:
    std::size_t upsert(std::span<const DocumentChunk>) override { return 0; }
    SearchResponse search(const UnitVector&, std::size_t) const override { throw Error(Errc::NetworkError, "down"); }
    std::size_t dim() const override { return kDim; }
    std::size_t size() const override { return 0; }
};

} // namespace

TEST(FastTalker, MissFallsBackPublishesPriorityAndCaches) {
    Fixture f;
    auto ft = f.make();
    const auto reply = ft.handle_query("starter plan pricing", {0}, 3);
    EXPECT_EQ(reply.outcome.source, RetrievalSource::StoreFallback);
    EXPECT_FALSE(reply.outcome.degraded);
    EXPECT_EQ(f.store->search_calls(), 1u);
    EXPECT_DOUBLE_EQ(reply.outcome.retrieval_latency_ms,
                     LatencyModel::uniform(97, 307, 5).delay_ms(3) + f.clock->costs().scan_ms(4, kDim));
    EXPECT_EQ(reply.outcome.chunks.size(), 4u);
    EXPECT_EQ(reply.outcome.chunks[0].chunk->chunk_id, "pricing#0");
    EXPECT_EQ(f.cache->size(), 4u);
    const auto events = f.drain();
    ASSERT_EQ(events.size(), 1u);
    EXPECT_EQ(events[0].kind, EventKind::PriorityRetrieval);
    EXPECT_EQ(events[0].turn_index, 3u);
    EXPECT_EQ(events[0].text, "starter plan pricing");
}

TEST(FastTalker, HitNeverTouchesStore) {
    Fixture f;
    f.cache->put(test::make_chunk("c", f.embedder->embed("contacts API endpoint"), "api", "Contacts. More."),
                 0.5f, CacheSource::Prediction, {0});
    auto ft = f.make();
    const auto reply = ft.handle_query("contacts endpoint", {1}, 0);
    EXPECT_EQ(reply.outcome.source, RetrievalSource::CacheHit);
    EXPECT_EQ(f.store->search_calls(), 0u);
    EXPECT_TRUE(f.drain().empty());
    ASSERT_EQ(reply.outcome.chunks.size(), 1u);
    EXPECT_NEAR(reply.outcome.chunks[0].similarity,
                cosine(f.embedder->embed("contacts endpoint"), f.embedder->embed("contacts API endpoint")), 1e-6);
    EXPECT_DOUBLE_EQ(reply.outcome.retrieval_latency_ms, f.clock->costs().scan_ms(1, kDim));
    EXPECT_LT(reply.outcome.retrieval_latency_ms, 1.0);
    EXPECT_EQ(reply.response, "Based on 1 passages about api: Contacts.");
}

TEST(FastTalker, RepeatedQueryHitsAfterMiss) {
    Fixture f;
    auto ft = f.make();
    EXPECT_EQ(ft.handle_query("enterprise volume discounts", {0}, 0).outcome.source, RetrievalSource::StoreFallback);
    EXPECT_EQ(ft.handle_query("enterprise volume discounts", {1}, 1).outcome.source, RetrievalSource::CacheHit);
    EXPECT_EQ(f.store->search_calls(), 1u);
}

TEST(FastTalker, RepeatedChunkTextHitsAtSimilarityOne) {
    Fixture f;
    auto ft = f.make();
    const std::string text = "Single sign on supports SAML and OIDC.";
    EXPECT_EQ(ft.handle_query(text, {0}, 0).outcome.source, RetrievalSource::StoreFallback);
    const auto second = ft.handle_query(text, {1}, 1).outcome;
    ASSERT_EQ(second.source, RetrievalSource::CacheHit);
    EXPECT_EQ(second.chunks.front().chunk->chunk_id, "security#3");
    EXPECT_NEAR(second.chunks.front().similarity, 1.0f, 1e-6f);
}

TEST(FastTalker, BaselineModeAlwaysSearches) {
    Fixture f;
    auto ft = f.make({}, false);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(ft.handle_query("single sign on", {0}, i).outcome.source, RetrievalSource::StoreFallback);
    }
    EXPECT_EQ(f.store->search_calls(), 3u);
    EXPECT_TRUE(f.drain().empty());
}

TEST(FastTalker, FallbackDisabledDegrades) {
    Fixture f;
    FastTalkerConfig cfg;
    cfg.fallback_enabled = false;
    auto ft = f.make(cfg);
    const auto reply = ft.handle_query("saml", {0}, 0);
    EXPECT_TRUE(reply.outcome.degraded);
    EXPECT_TRUE(reply.outcome.chunks.empty());
    EXPECT_EQ(f.store->search_calls(), 0u);
    EXPECT_EQ(f.drain().size(), 1u);
    EXPECT_EQ(reply.response, "I could not find anything about that in the knowledge base.");
}

TEST(FastTalker, CacheOnMissCanBeDisabled) {
    Fixture f;
    FastTalkerConfig cfg;
    cfg.cache_on_miss = false;
    f.make(cfg).handle_query("saml", {0}, 0);
    EXPECT_EQ(f.cache->size(), 0u);
}

TEST(FastTalker, ContextIsCapped) {
    Fixture f;
    FastTalkerConfig cfg;
    cfg.max_context_chunks = 2;
    const auto reply = f.make(cfg).handle_query("pricing", {0}, 0);
    EXPECT_EQ(reply.outcome.chunks.size(), 4u);
    EXPECT_EQ(reply.response.rfind("Based on 2 passages about pricing:", 0), 0u);
}

TEST(FastTalker, FailuresDegradeOrThrowTyped) {
    Fixture f;
    const auto r = f.make({}, true, std::make_shared<FailingResponder>()).handle_query("pricing", {0}, 0);
    EXPECT_TRUE(r.outcome.degraded);
    EXPECT_FALSE(r.response.empty());

    FastTalker broken({}, f.embedder, std::make_shared<BrokenStore>(), f.cache, nullptr, nullptr, f.clock);
    const auto b = broken.handle_query("zebra crossing", {0}, 0);
    EXPECT_TRUE(b.outcome.degraded);
    EXPECT_TRUE(b.outcome.chunks.empty());

    auto ft = f.make();
    try {
        ft.handle_query("  \n", {0}, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::EmptyQuery);
    }
    FastTalker no_embed({}, std::make_shared<FailingEmbedder>(), f.store, f.cache, nullptr, nullptr, f.clock);
    try {
        no_embed.handle_query("pricing", {0}, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::EmbeddingFailed);
    }
}

TEST(FastTalker, FormatsContext) {
    const std::vector<RetrievedChunk> chunks = {{test::make_chunk("a", test::axis(3, 0), "pricing", "Plans."), 0.9f},
                                                {test::make_chunk("b", test::axis(3, 1), "faq", "Yes."), 0.5f}};
    EXPECT_EQ(format_context(chunks), "[1] (pricing) Plans.\n\n[2] (faq) Yes.");
    EXPECT_EQ(TemplateResponder().respond("q", chunks, ""), "Based on 2 passages about pricing, faq: Plans.");
    EXPECT_EQ(to_string(RetrievalSource::CacheHit), "cache_hit");
}

TEST(FastTalker, ChatResponderSendsContext) {
    std::string body;
    test::MockServer server([&](httplib::Server& s) {
        s.Post("/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
            body = req.body;
            res.set_content(R"({"choices":[{"message":{"content":"It costs 29 dollars."}}]})", "application/json");
        });
    });
    ChatConfig cfg;
    cfg.endpoint = server.url();
    cfg.timeout_seconds = 2;
    Fixture f;
    const auto reply = f.make({}, true, std::make_shared<ChatResponder>(cfg)).handle_query("starter pricing", {0}, 0);
    EXPECT_EQ(reply.response, "It costs 29 dollars.");
    EXPECT_NE(body.find("(pricing) Starter plan pricing"), std::string::npos);
    EXPECT_THROW(ChatResponder(ChatConfig{}), Error);
}

TEST(FastTalker, RejectsMismatchedDimensions) {
    Fixture f;
    EXPECT_THROW(FastTalker({}, f.embedder, f.store, std::make_shared<SemanticCache>(8), nullptr, nullptr, f.clock),
                 Error);
    EXPECT_THROW(FastTalker({}, std::make_shared<HashingEmbedder>(8, 0), f.store, nullptr, nullptr, nullptr, f.clock),
                 Error);
    FastTalkerConfig cfg;
    cfg.top_k = 0;
    EXPECT_THROW(f.make(cfg), Error);
}
