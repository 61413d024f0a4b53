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
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "memrouter/conversation_stream.hpp"

namespace memrouter {

struct Prediction {
    std::string text;  // document-style topic description
    std::size_t origin_turn = 0;

    friend bool operator==(const Prediction&, const Prediction&) = default;
};

enum class PredictionStrategy { Llm, Keyword, Scripted };

std::string_view to_string(PredictionStrategy s);

/// Settings for an OpenAI-compatible chat-completions endpoint. The API key is
/// read from MEMROUTER_LLM_API_KEY.
struct ChatConfig {
    std::string endpoint;
    std::string model = "gpt-4o-mini";
    double temperature = 0.3;
    double timeout_seconds = 15.0;
};

struct PredictorConfig {
    PredictionStrategy strategy = PredictionStrategy::Llm;
    std::size_t max_predictions = 5;
    std::size_t context_turns = 6;
    ChatConfig llm;

    void validate() const;
};

class Predictor {
public:
    virtual ~Predictor() = default;

    /// At most `max_predictions` follow-up topics given the recent turns
    /// (oldest first) at `turn_index`.
    virtual std::vector<Prediction> predict(std::span<const Turn> context, std::size_t turn_index) const = 0;
};

/// Benchmark oracle: returns the labels registered for `turn_index`.
class ScriptedPredictor final : public Predictor {
public:
    ScriptedPredictor(std::map<std::size_t, std::vector<std::string>> labels_by_turn, std::size_t max_predictions = 5);

    std::vector<Prediction> predict(std::span<const Turn> context, std::size_t turn_index) const override;

private:
    std::map<std::size_t, std::vector<std::string>> labels_;
    std::size_t max_predictions_;
};

/// Content terms of the last user turn ranked by their frequency across the
/// whole context (ties keep first-occurrence order), each expanded to
/// "information about {term}".
class KeywordPredictor final : public Predictor {
public:
    explicit KeywordPredictor(std::size_t max_predictions = 5);

    std::vector<Prediction> predict(std::span<const Turn> context, std::size_t turn_index) const override;

private:
    std::size_t max_predictions_;
};

/// Asks a chat model for document-style follow-up topics, one per line.
/// Transport and protocol failures, and a missing endpoint, surface as
/// PredictorUnavailable.
class LlmPredictor final : public Predictor {
public:
    LlmPredictor(ChatConfig cfg, std::size_t max_predictions = 5);

    std::vector<Prediction> predict(std::span<const Turn> context, std::size_t turn_index) const override;

    /// The chat messages sent for `context` (system, then user).
    static std::vector<std::pair<std::string, std::string>> build_messages(std::span<const Turn> context,
                                                                           std::size_t max_predictions);

    /// Splits a completion into topic lines, stripping list numbering and
    /// bullets, dropping blanks, keeping at most `limit`.
    static std::vector<std::string> parse_topics(std::string_view completion, std::size_t limit);

private:
    ChatConfig cfg_;
    std::size_t max_predictions_;
    std::string api_key_;
};

/// Sends `messages` to `{endpoint}/chat/completions` and returns
/// choices[0].message.content. Throws NetworkError/ProtocolError.
std::string chat_complete(const ChatConfig& cfg, std::string_view api_key,
                          std::span<const std::pair<std::string, std::string>> messages);

std::shared_ptr<Predictor> make_predictor(const PredictorConfig& cfg);

} // namespace memrouter
