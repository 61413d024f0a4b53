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

#include <cmath>
#include <cstdlib>

#include <json.hpp>

#include "memrouter/embedding.hpp"
#include "memrouter/error.hpp"
#include "memrouter/text.hpp"
#include "test_support.hpp"

using namespace memrouter;

namespace {

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no memrouter::Error thrown";
    return Errc::Io;
}

} // namespace

TEST(VectorMath, NormalizeScalesToUnitLength) {
    const UnitVector v = normalize({3.0f, 4.0f});
    EXPECT_FLOAT_EQ(v[0], 0.6f);
    EXPECT_FLOAT_EQ(v[1], 0.8f);
    const UnitVector u = normalize({1.0f, 0.0f});
    EXPECT_EQ(u[0], 1.0f);
    EXPECT_EQ(u[1], 0.0f);
}

TEST(VectorMath, NormalizeRejectsZeroVector) {
    EXPECT_EQ(code_of([] { normalize({0.0f, 0.0f}); }), Errc::ZeroVector);
    EXPECT_EQ(code_of([] { normalize({1e-14f, 0.0f}); }), Errc::ZeroVector);
}

TEST(VectorMath, NormalizeIsTemplatedOnScalar) {
    Vector<double> v(2);
    v << 3.0, 4.0;
    const BasicUnitVector<double> u = normalize(v);
    EXPECT_DOUBLE_EQ(u[0], 0.6);
    EXPECT_DOUBLE_EQ(u[1], 0.8);
}

TEST(VectorMath, CosineExamples) {
    EXPECT_FLOAT_EQ(cosine(normalize({1, 0}), normalize({0.6f, 0.8f})), 0.6f);
    EXPECT_EQ(cosine(normalize({1, 0}), normalize({0, 1})), 0.0f);
    EXPECT_EQ(code_of([] { cosine(normalize({1, 0}), normalize({1, 0, 0})); }), Errc::DimensionMismatch);
}

TEST(VectorMath, CosineSymmetricAndSelfIsOne) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const std::size_t dim = 1 + rng() % 300;
        const UnitVector a = test::random_unit(dim, rng);
        const UnitVector b = test::random_unit(dim, rng);
        EXPECT_EQ(cosine(a, b), cosine(b, a));
        EXPECT_NEAR(cosine(a, a), 1.0f, 1e-6f);
        EXPECT_NEAR(a.values().cast<double>().norm(), 1.0, 1e-6);
        EXPECT_LE(cosine(a, b), 1.0f);
        EXPECT_GE(cosine(a, b), -1.0f);
    }
}

TEST(Text, TokenizeLowercasesAndStripsPunctuation) {
    EXPECT_EQ(tokenize("Hello, World! API-v2"), (std::vector<std::string>{"hello", "world", "api", "v2"}));
    EXPECT_EQ(tokenize("  ...  "), std::vector<std::string>{});
    EXPECT_EQ(tokenize("caf\xC3\xA9 au lait"), (std::vector<std::string>{"caf\xC3\xA9", "au", "lait"}));
}

TEST(Text, ContentTokensDropStopwords) {
    EXPECT_EQ(content_tokens("How do I configure the contacts API endpoint?"),
              (std::vector<std::string>{"configure", "contacts", "api", "endpoint"}));
    EXPECT_TRUE(is_stopword("the"));
    EXPECT_FALSE(is_stopword("pricing"));
}

TEST(HashingEmbedder, DeterministicAndUnitNorm) {
    const HashingEmbedder e(256, 3);
    for (const char* t : {"enterprise pricing plans", "x", "The the THE", "caf\xC3\xA9", "12 34 56"}) {
        const UnitVector a = e.embed(t);
        EXPECT_EQ(a, e.embed(t));
        EXPECT_EQ(a.dim(), 256u);
        EXPECT_NEAR(a.values().cast<double>().norm(), 1.0, 1e-6);
    }
}

TEST(HashingEmbedder, PureFunctionOfTextSeedAndDim) {
    EmbedderConfig cfg;
    cfg.dimension = 64;
    cfg.seed = 9;
    EXPECT_EQ(embed_text("pricing plans", cfg), HashingEmbedder(64, 9).embed("pricing plans"));
    EXPECT_FALSE(embed_text("pricing plans", cfg) == HashingEmbedder(64, 10).embed("pricing plans"));
    EXPECT_EQ(HashingEmbedder(64, 9).embed("Pricing, plans!"), HashingEmbedder(64, 9).embed("pricing plans"));
}

TEST(HashingEmbedder, EmptyTextRejected) {
    const HashingEmbedder e;
    EXPECT_EQ(code_of([&] { e.embed(""); }), Errc::EmptyText);
    EXPECT_EQ(code_of([&] { e.embed(" \n\t "); }), Errc::EmptyText);
    EXPECT_EQ(code_of([&] { e.embed("?!."); }), Errc::EmptyText);
}

TEST(HashingEmbedder, StopwordOnlyTextStillEmbeds) {
    const HashingEmbedder e;
    EXPECT_NO_THROW(e.embed("what is it"));
    EXPECT_FALSE(e.embed("what is it") == e.embed("who was it"));
}

TEST(RemoteEmbedder, NormalizesReturnedVector) {
    std::string seen_body;
    std::string seen_auth;
    test::MockServer server([&](httplib::Server& s) {
        s.Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
            seen_body = req.body;
            seen_auth = req.get_header_value("Authorization");
            res.set_content(R"({"data":[{"embedding":[3,4]}]})", "application/json");
        });
    });
    ::setenv("MEMROUTER_EMBED_API_KEY", "sk-test", 1);
    EmbedderConfig cfg;
    cfg.kind = EmbedderKind::Remote;
    cfg.dimension = 2;
    cfg.endpoint = server.url("/v1");
    cfg.model_name = "text-embedding-3-small";
    const UnitVector v = embed_remote("hello", cfg);
    ::unsetenv("MEMROUTER_EMBED_API_KEY");
    EXPECT_FLOAT_EQ(v[0], 0.6f);
    EXPECT_FLOAT_EQ(v[1], 0.8f);
    const auto body = nlohmann::json::parse(seen_body);
    EXPECT_EQ(body["model"], "text-embedding-3-small");
    EXPECT_EQ(body["input"], "hello");
    EXPECT_EQ(seen_auth, "Bearer sk-test");
}

TEST(RemoteEmbedder, ErrorPaths) {
    test::MockServer server([](httplib::Server& s) {
        s.Post("/fail/embeddings", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
        s.Post("/wrongdim/embeddings", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(R"({"data":[{"embedding":[1,2,3]}]})", "application/json");
        });
        s.Post("/garbage/embeddings", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("not json", "application/json");
        });
        s.Post("/shape/embeddings", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(R"({"data":[]})", "application/json");
        });
        s.Post("/zero/embeddings", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(R"({"data":[{"embedding":[0,0]}]})", "application/json");
        });
    });
    EmbedderConfig cfg;
    cfg.kind = EmbedderKind::Remote;
    cfg.dimension = 2;
    cfg.model_name = "m";
    const auto at = [&](const char* path) {
        EmbedderConfig c = cfg;
        c.endpoint = server.url(path);
        return c;
    };
    try {
        embed_remote("x", at("/fail"));
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NetworkError);
        EXPECT_TRUE(e.retryable());
    }
    EXPECT_EQ(code_of([&] { embed_remote("x", at("/wrongdim")); }), Errc::ProtocolError);
    EXPECT_EQ(code_of([&] { embed_remote("x", at("/garbage")); }), Errc::ProtocolError);
    EXPECT_EQ(code_of([&] { embed_remote("x", at("/shape")); }), Errc::ProtocolError);
    EXPECT_EQ(code_of([&] { embed_remote("x", at("/zero")); }), Errc::ZeroVector);
}

TEST(RemoteEmbedder, UnreachableEndpointIsNetworkError) {
    EmbedderConfig cfg;
    cfg.kind = EmbedderKind::Remote;
    cfg.dimension = 2;
    cfg.model_name = "m";
    cfg.endpoint = "http://127.0.0.1:1";
    cfg.timeout_seconds = 1.0;
    EXPECT_EQ(code_of([&] { embed_remote("x", cfg); }), Errc::NetworkError);
}

TEST(EmbedderConfig, Validation) {
    EmbedderConfig cfg;
    cfg.dimension = 0;
    EXPECT_EQ(code_of([&] { cfg.validate(); }), Errc::ConfigInvalid);
    EmbedderConfig remote = EmbedderConfig::remote_defaults();
    EXPECT_EQ(remote.dimension, 1536u);
    EXPECT_EQ(remote.model_name, "text-embedding-3-small");
    EXPECT_EQ(code_of([&] { remote.validate(); }), Errc::ConfigInvalid);  // no endpoint
    remote.endpoint = "https://api.openai.com/v1";
    EXPECT_NO_THROW(remote.validate());
}
