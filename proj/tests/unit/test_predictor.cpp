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

#include <json.hpp>

#include "memrouter/error.hpp"
#include "memrouter/predictor.hpp"
#include "test_support.hpp"

using namespace memrouter;

namespace {

std::vector<std::string> texts(const std::vector<Prediction>& ps) {
    std::vector<std::string> out;
    for (const auto& p : ps) out.push_back(p.text);
    return out;
}

} // namespace

TEST(KeywordPredictor, PinnedExample) {
    const std::vector<Turn> ctx = {{Role::User, "How do I configure the contacts API endpoint?"}};
    const auto p = KeywordPredictor(5).predict(ctx, 3);
    EXPECT_EQ(texts(p), (std::vector<std::string>{"information about configure", "information about contacts",
                                                  "information about api", "information about endpoint"}));
    EXPECT_EQ(p[0].origin_turn, 3u);
}

TEST(KeywordPredictor, RanksByContextFrequency) {
    const std::vector<Turn> ctx = {{Role::User, "Tell me about webhooks"},
                                   {Role::Agent, "Webhooks notify you about deals."},
                                   {Role::User, "Do deals trigger webhooks or billing events?"}};
    EXPECT_EQ(texts(KeywordPredictor(2).predict(ctx, 1)),
              (std::vector<std::string>{"information about webhooks", "information about deals"}));
}

TEST(KeywordPredictor, DeterministicAndBounded) {
    const std::vector<Turn> ctx = {{Role::User, "alpha beta gamma delta epsilon zeta eta theta"}};
    const KeywordPredictor k(3);
    EXPECT_EQ(k.predict(ctx, 0), k.predict(ctx, 0));
    EXPECT_EQ(k.predict(ctx, 0).size(), 3u);
    EXPECT_THROW(k.predict({}, 0), Error);
    const std::vector<Turn> stop = {{Role::User, "what is the"}};
    EXPECT_TRUE(k.predict(stop, 0).empty());
}

TEST(ScriptedPredictor, ReturnsRegisteredLabels) {
    ScriptedPredictor s({{0, {"pricing tiers", " ", "billing"}}, {1, {"a", "b", "c"}}}, 2);
    EXPECT_EQ(texts(s.predict({}, 0)), (std::vector<std::string>{"pricing tiers", "billing"}));
    EXPECT_EQ(s.predict({}, 1).size(), 2u);
    EXPECT_TRUE(s.predict({}, 7).empty());
}

TEST(LlmPredictor, ParsesNumberedAndBulletedLists) {
    EXPECT_EQ(LlmPredictor::parse_topics("1. Enterprise pricing\n2) API limits\n\n- SSO setup\n* Audit logs\n"
                                         "\xE2\x80\xA2 Data export\n\"Quoted topic\"",
                                         10),
              (std::vector<std::string>{"Enterprise pricing", "API limits", "SSO setup", "Audit logs", "Data export",
                                        "Quoted topic"}));
    EXPECT_EQ(LlmPredictor::parse_topics("a\nb\nc", 2), (std::vector<std::string>{"a", "b"}));
    EXPECT_TRUE(LlmPredictor::parse_topics("\n  \n", 5).empty());
}

TEST(LlmPredictor, PromptAsksForDocumentStyleTopics) {
    const std::vector<Turn> ctx = {{Role::User, "pricing?"}, {Role::Agent, "We have three plans."}};
    const auto m = LlmPredictor::build_messages(ctx, 4);
    ASSERT_EQ(m.size(), 2u);
    EXPECT_EQ(m[0].first, "system");
    EXPECT_NE(m[0].second.find("4 most likely"), std::string::npos);
    EXPECT_NE(m[0].second.find("documentation"), std::string::npos);
    EXPECT_NE(m[1].second.find("User: pricing?\nAgent: We have three plans.\n"), std::string::npos);
}

TEST(LlmPredictor, TalksToChatEndpoint) {
    nlohmann::json seen;
    test::MockServer server([&](httplib::Server& s) {
        s.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
            seen = nlohmann::json::parse(req.body);
            res.set_content(R"({"choices":[{"message":{"content":"1. Plan pricing\n2. Seats\n3. Discounts"}}]})",
                            "application/json");
        });
        s.Post("/down/chat/completions", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
        s.Post("/odd/chat/completions", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(R"({"choices":[]})", "application/json");
        });
    });
    const std::vector<Turn> ctx = {{Role::User, "How much is it?"}};
    ChatConfig cfg;
    cfg.endpoint = server.url("/v1");
    cfg.model = "m";
    cfg.timeout_seconds = 2;
    const auto p = LlmPredictor(cfg, 2).predict(ctx, 5);
    EXPECT_EQ(texts(p), (std::vector<std::string>{"Plan pricing", "Seats"}));
    EXPECT_EQ(seen["model"], "m");
    EXPECT_EQ(seen["messages"].size(), 2u);

    auto code = [&](const std::string& base) {
        ChatConfig c = cfg;
        c.endpoint = base.empty() ? "" : server.url(base);
        try {
            LlmPredictor(c, 2).predict(ctx, 0);
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::Io;
    };
    EXPECT_EQ(code("/down"), Errc::PredictorUnavailable);
    EXPECT_EQ(code("/odd"), Errc::PredictorUnavailable);
    EXPECT_EQ(code(""), Errc::PredictorUnavailable);
}

TEST(PredictorConfig, Validation) {
    PredictorConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.max_predictions = 0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = {};
    cfg.context_turns = 0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = {};
    cfg.strategy = PredictionStrategy::Keyword;
    EXPECT_NE(dynamic_cast<KeywordPredictor*>(make_predictor(cfg).get()), nullptr);
    EXPECT_EQ(to_string(PredictionStrategy::Scripted), "scripted");
}
