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

#include "memrouter/slow_thinker.hpp"
#include "test_support.hpp"

using namespace memrouter;

namespace {

constexpr std::size_t kDim = 64;

struct Fixture {
    std::shared_ptr<HashingEmbedder> embedder = std::make_shared<HashingEmbedder>(kDim, 0);
    std::shared_ptr<LocalVectorStore> store = std::make_shared<LocalVectorStore>(kDim);
    std::shared_ptr<SemanticCache> cache = std::make_shared<SemanticCache>(kDim);

    Fixture() {
        const std::vector<std::string> texts = {
            "starter plan pricing monthly",  "enterprise plan pricing annual", "contacts api endpoint",
            "deals api pipeline stages",     "single sign on saml setup",      "audit log export",
            "webhook retries and signatures", "data residency regions",        "mobile app offline mode",
            "password reset troubleshooting", "import contacts from csv",       "billing invoices and receipts",
        };
        std::vector<DocumentChunk> chunks;
        for (std::size_t i = 0; i < texts.size(); ++i) {
            chunks.push_back({"d#" + std::to_string(i), "d", texts[i], embedder->embed(texts[i])});
        }
        store->upsert(chunks);
    }

    SlowThinker make(SlowThinkerConfig cfg, std::shared_ptr<const Predictor> predictor,
                     const ConversationStream* bus = nullptr, std::shared_ptr<const VectorStore> s = nullptr) {
        return SlowThinker(cfg, embedder, s ? s : store, cache, std::move(predictor), bus);
    }
};

class ThrowingPredictor final : public Predictor {
public:
    std::vector<Prediction> predict(std::span<const Turn>, std::size_t) const override {
        throw Error(Errc::PredictorUnavailable, "offline");
    }
};

class BrokenStore final : public VectorStore {
public:
    std::size_t upsert(std::span<const DocumentChunk>) override { return 0; }
    SearchResponse search(const UnitVector&, std::size_t) const override {
        throw Error(Errc::NetworkError, "store down");
    }
    std::size_t dim() const override { return kDim; }
    std::size_t size() const override { return 0; }
};

ConversationEvent utterance(std::size_t turn, std::string text) {
    return {EventKind::UserUtterance, turn, std::move(text), {}, 0};
}

SlowThinkerConfig small_k(std::size_t k) {
    SlowThinkerConfig cfg;
    cfg.prefetch_top_k = k;
    return cfg;
}

} // namespace

TEST(SlowThinker, DirectRetrievalAndPrefetch) {
    Fixture f;
    auto predictor = std::make_shared<ScriptedPredictor>(
        std::map<std::size_t, std::vector<std::string>>{{0, {"single sign on saml", "audit log export"}}});
    auto st = f.make(small_k(1), predictor);
    const auto r = st.on_user_utterance(utterance(0, "starter plan pricing"), {0});
    EXPECT_EQ(r.direct_cached, 1u);
    EXPECT_EQ(r.predictions_made, 2u);
    EXPECT_EQ(r.prefetched, 2u);
    EXPECT_FALSE(r.degraded);
    EXPECT_TRUE(r.errors.empty());
    EXPECT_EQ(f.cache->size(), 3u);
    const auto hit = f.cache->get(f.embedder->embed("saml single sign on setup"), 1, 0.9, {1});
    ASSERT_EQ(hit.size(), 1u);
    EXPECT_EQ(hit[0].entry.source, CacheSource::Prediction);
}

TEST(SlowThinker, RepeatTurnCountsOnlyNewEntries) {
    Fixture f;
    auto st = f.make(small_k(3), std::make_shared<ScriptedPredictor>(std::map<std::size_t, std::vector<std::string>>{}));
    EXPECT_EQ(st.on_user_utterance(utterance(0, "contacts api"), {0}).direct_cached, 3u);
    EXPECT_EQ(st.on_user_utterance(utterance(1, "contacts api"), {5}).direct_cached, 0u);
    EXPECT_EQ(f.cache->size(), 3u);
}

TEST(SlowThinker, RateLimitSkipsPrediction) {
    Fixture f;
    auto predictor = std::make_shared<ScriptedPredictor>(
        std::map<std::size_t, std::vector<std::string>>{{0, {"audit log"}}, {1, {"webhook retries"}}});
    SlowThinkerConfig cfg = small_k(1);
    cfg.rate_limit_seconds = 1.0;
    auto st = f.make(cfg, predictor);
    EXPECT_FALSE(st.on_user_utterance(utterance(0, "billing"), {10.0}).rate_limited);
    const auto limited = st.on_user_utterance(utterance(1, "billing"), {10.5});
    EXPECT_TRUE(limited.rate_limited);
    EXPECT_EQ(limited.predictions_made, 0u);
    EXPECT_FALSE(st.on_user_utterance(utterance(1, "billing"), {11.0}).rate_limited);
}

TEST(SlowThinker, PredictorFailureFallsBackToKeywords) {
    Fixture f;
    auto st = f.make(small_k(1), std::make_shared<ThrowingPredictor>());
    const auto r = st.on_user_utterance(utterance(0, "How do I reset my password?"), {0});
    EXPECT_TRUE(r.degraded);
    EXPECT_EQ(r.predictions_made, 2u);  // reset, password
    ASSERT_FALSE(r.errors.empty());
    EXPECT_NE(r.errors[0].find("offline"), std::string::npos);

    auto none = f.make(small_k(1), nullptr);
    EXPECT_TRUE(none.on_user_utterance(utterance(1, "audit"), {0}).degraded);
}

TEST(SlowThinker, StoreFailuresAreReportedNotThrown) {
    Fixture f;
    auto predictor = std::make_shared<ScriptedPredictor>(
        std::map<std::size_t, std::vector<std::string>>{{0, {"a topic"}}});
    auto st = f.make(small_k(2), predictor, nullptr, std::make_shared<BrokenStore>());
    PrefetchReport r;
    ASSERT_NO_THROW(r = st.on_user_utterance(utterance(0, "pricing"), {0}));
    EXPECT_EQ(r.direct_cached, 0u);
    EXPECT_EQ(r.prefetched, 0u);
    EXPECT_EQ(r.errors.size(), 2u);
    EXPECT_EQ(st.on_priority_retrieval({EventKind::PriorityRetrieval, 0, "pricing", {}, 0}, {0}), 0u);
}

TEST(SlowThinker, PriorityRetrievalUsesExpandedK) {
    Fixture f;
    SlowThinkerConfig cfg = small_k(3);
    cfg.priority_k_multiplier = 2;
    auto st = f.make(cfg, nullptr);
    EXPECT_EQ(st.on_priority_retrieval({EventKind::PriorityRetrieval, 0, "api endpoint", {}, 0}, {0}), 6u);
    for (const auto& e : f.cache->entries()) EXPECT_EQ(e.source, CacheSource::Priority);
}

TEST(SlowThinker, ConsumesReleasedEventsFromBus) {
    Fixture f;
    ConversationStream bus;
    auto predictor = std::make_shared<ScriptedPredictor>(
        std::map<std::size_t, std::vector<std::string>>{{0, {"data residency"}}});
    auto st = f.make(small_k(1), predictor, &bus);
    auto clock = std::make_shared<VirtualClock>();
    st.start(bus.subscribe(), clock);

    const auto seq = bus.publish({EventKind::UserUtterance, 0, "mobile offline", clock->now(), 0});
    std::this_thread::sleep_for(std::chrono::milliseconds(30));
    EXPECT_FALSE(st.report_for(0).has_value());  // gated until released
    st.release_through(seq);
    st.wait_processed(seq);
    const auto report = st.report_for(0);
    ASSERT_TRUE(report.has_value());
    EXPECT_EQ(report->direct_cached, 1u);
    EXPECT_EQ(report->prefetched, 1u);

    const auto seq2 = bus.publish({EventKind::PriorityRetrieval, 0, "csv import", clock->now(), 0});
    st.release_all();
    st.wait_processed(seq2);
    EXPECT_EQ(f.cache->size(), 4u);
    bus.close();
    st.stop();
    st.stop();
}

TEST(SlowThinker, StopWithoutClosingBus) {
    Fixture f;
    ConversationStream bus;
    auto st = f.make(small_k(1), nullptr, &bus);
    st.start(bus.subscribe(), std::make_shared<VirtualClock>());
    bus.publish(utterance(0, "never released"));
    st.stop();
    EXPECT_FALSE(st.report_for(0).has_value());
}

TEST(SlowThinker, ConfigValidation) {
    Fixture f;
    EXPECT_THROW(f.make(small_k(0), nullptr), Error);
    SlowThinkerConfig cfg;
    cfg.rate_limit_seconds = -1;
    EXPECT_THROW(f.make(cfg, nullptr), Error);
    EXPECT_THROW(SlowThinker({}, nullptr, f.store, f.cache, nullptr, nullptr), Error);
}
