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

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "memrouter/config.hpp"

using namespace memrouter;

namespace {

Errc code_of(std::string_view text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::Io;
}

} // namespace

TEST(Config, DefaultsMatchDocumentedValues) {
    const AppConfig c;
    EXPECT_EQ(c.router.cache.max_size, 2000u);
    EXPECT_EQ(c.router.cache.ttl_seconds, 300.0);
    EXPECT_EQ(c.router.cache.similarity_threshold, 0.40);
    EXPECT_EQ(c.router.cache.dedup_threshold, 0.95);
    EXPECT_EQ(c.router.fast.max_context_chunks, 10u);
    EXPECT_EQ(c.router.slow.prefetch_top_k, 10u);
    EXPECT_EQ(c.router.slow.rate_limit_seconds, 0.5);
    EXPECT_EQ(c.router.slow.priority_k_multiplier, 2u);
    EXPECT_EQ(c.router.slow.predictor.max_predictions, 5u);
    EXPECT_EQ(c.router.slow.predictor.context_turns, 6u);
    EXPECT_EQ(c.router.slow.predictor.llm.temperature, 0.3);
    EXPECT_EQ(c.router.window_capacity, 10u);
    EXPECT_EQ(c.chunker.chunk_size, 512u);
    EXPECT_EQ(c.chunker.overlap, 50u);
    EXPECT_EQ(EmbedderConfig::remote_defaults().dimension, 1536u);
    EXPECT_EQ(EmbedderConfig::remote_defaults().model_name, "text-embedding-3-small");
    EXPECT_NO_THROW(c.router.validate());
}

TEST(Config, PartialOverlayKeepsBase) {
    const auto c = parse_config(R"({"cache":{"similarity_threshold":0.5},"latency":{"kind":"uniform","seed":9},
                                    "clock":"virtual","slow_thinker":{"predictor":{"strategy":"keyword"}}})");
    EXPECT_EQ(c.router.cache.similarity_threshold, 0.5);
    EXPECT_EQ(c.router.cache.max_size, 2000u);
    EXPECT_EQ(c.router.latency.kind, LatencyKind::Uniform);
    EXPECT_EQ(c.router.latency.seed, 9u);
    EXPECT_EQ(c.router.latency.lo_ms, 97.0);
    EXPECT_EQ(c.router.clock, ClockKind::Virtual);
    EXPECT_EQ(c.router.slow.predictor.strategy, PredictionStrategy::Keyword);
}

TEST(Config, EveryFieldRoundTrips) {
    AppConfig c;
    c.router.cache = {100, 60, 0.35, 0.9};
    c.router.fast = {4, false, false, 7};
    c.router.slow.prefetch_top_k = 3;
    c.router.slow.rate_limit_seconds = 0;
    c.router.slow.priority_k_multiplier = 4;
    c.router.slow.predictor = {PredictionStrategy::Scripted, 2, 3, {"http://h/v1", "m", 0.1, 3}};
    c.router.embedder = EmbedderConfig::remote_defaults();
    c.router.embedder.endpoint = "http://e/v1";
    c.router.latency = LatencyModel::uniform(10, 20, 5);
    c.router.clock = ClockKind::Virtual;
    c.router.window_capacity = 8;
    c.chunker = {256, 20};
    c.store = StoreKind::Remote;
    c.remote_store = {"http://q:6333", "kb", 1536, 2};
    c.responder = ResponderKind::Chat;
    c.chat = {"http://c/v1", "x", 0.7, 4};
    const std::string dumped = dump_config(c);
    const AppConfig back = parse_config(dumped);
    EXPECT_EQ(dump_config(back), dumped);
    EXPECT_EQ(back.router.fast.top_k, 7u);
    EXPECT_EQ(back.router.slow.predictor.llm.endpoint, "http://h/v1");
    EXPECT_EQ(back.remote_store.collection, "kb");
    EXPECT_EQ(back.chat.model, "x");
}

TEST(Config, RejectsUnknownKeysAndBadTypes) {
    EXPECT_EQ(code_of(R"({"cache":{"max_sise":5}})"), Errc::ConfigInvalid);
    EXPECT_EQ(code_of(R"({"colour":"blue"})"), Errc::ConfigInvalid);
    EXPECT_EQ(code_of(R"({"cache":{"max_size":"big"}})"), Errc::ConfigInvalid);
    EXPECT_EQ(code_of(R"({"cache":{"max_size":-3}})"), Errc::ConfigInvalid);
    EXPECT_EQ(code_of(R"({"clock":"sundial"})"), Errc::ConfigInvalid);
    EXPECT_EQ(code_of(R"([1,2])"), Errc::ConfigInvalid);
    EXPECT_EQ(code_of("{not json"), Errc::ConfigInvalid);
}

TEST(Config, ValidatesResult) {
    EXPECT_EQ(code_of(R"({"cache":{"similarity_threshold":0.97}})"), Errc::ConfigInvalid);
    EXPECT_EQ(code_of(R"({"chunker":{"overlap":600}})"), Errc::ConfigInvalid);
    EXPECT_EQ(code_of(R"({"latency":{"lo_ms":300,"hi_ms":100}})"), Errc::ConfigInvalid);
    EXPECT_EQ(code_of(R"({"embedder":{"kind":"remote"}})"), Errc::ConfigInvalid);
    EXPECT_EQ(code_of(R"({"slow_thinker":{"predictor":{"context_turns":11}}})"), Errc::ConfigInvalid);
}

TEST(Config, LoadsFromFile) {
    const auto path = std::filesystem::temp_directory_path() / "memrouter_config_test.json";
    std::ofstream(path) << R"({"window_capacity": 12})";
    EXPECT_EQ(load_config(path).router.window_capacity, 12u);
    std::filesystem::remove(path);
    try {
        load_config(path);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::Io);
    }
}
