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

#include "memrouter/predictor.hpp"

#include <algorithm>
#include <unordered_map>

#include "http_client.hpp"
#include "memrouter/error.hpp"
#include "memrouter/text.hpp"

namespace memrouter {

std::string_view to_string(PredictionStrategy s) {
    switch (s) {
    case PredictionStrategy::Llm: return "llm";
    case PredictionStrategy::Keyword: return "keyword";
    case PredictionStrategy::Scripted: return "scripted";
    }
    return "unknown";
}

void PredictorConfig::validate() const {
    if (max_predictions == 0) throw Error(Errc::ConfigInvalid, "max_predictions must be at least 1");
    if (context_turns == 0) throw Error(Errc::ConfigInvalid, "context_turns must be at least 1");
}

ScriptedPredictor::ScriptedPredictor(std::map<std::size_t, std::vector<std::string>> labels_by_turn,
                                     std::size_t max_predictions)
    : labels_(std::move(labels_by_turn)), max_predictions_(max_predictions) {}

std::vector<Prediction> ScriptedPredictor::predict(std::span<const Turn>, std::size_t turn_index) const {
    std::vector<Prediction> out;
    const auto it = labels_.find(turn_index);
    if (it == labels_.end()) return out;
    for (const auto& label : it->second) {
        if (out.size() == max_predictions_) break;
        if (!trim(label).empty()) out.push_back({label, turn_index});
    }
    return out;
}

KeywordPredictor::KeywordPredictor(std::size_t max_predictions) : max_predictions_(max_predictions) {}

std::vector<Prediction> KeywordPredictor::predict(std::span<const Turn> context, std::size_t turn_index) const {
    if (context.empty()) throw Error(Errc::InvalidArgument, "keyword prediction needs context");

    auto last_user = std::find_if(context.rbegin(), context.rend(),
                                  [](const Turn& t) { return t.role == Role::User; });
    const Turn& anchor = last_user != context.rend() ? *last_user : context.back();

    std::unordered_map<std::string, std::size_t> frequency;
    for (const auto& turn : context) {
        for (auto& token : content_tokens(turn.text)) ++frequency[std::move(token)];
    }

    std::vector<std::string> terms;
    for (auto& token : content_tokens(anchor.text)) {
        if (std::find(terms.begin(), terms.end(), token) == terms.end()) terms.push_back(std::move(token));
    }
    std::stable_sort(terms.begin(), terms.end(), [&](const std::string& a, const std::string& b) {
        return frequency[a] > frequency[b];
    });

    std::vector<Prediction> out;
    for (const auto& term : terms) {
        if (out.size() == max_predictions_) break;
        out.push_back({"information about " + term, turn_index});
    }
    return out;
}

LlmPredictor::LlmPredictor(ChatConfig cfg, std::size_t max_predictions)
    : cfg_(std::move(cfg)),
      max_predictions_(max_predictions),
      api_key_(detail::env_or_empty("MEMROUTER_LLM_API_KEY")) {}

std::vector<std::pair<std::string, std::string>> LlmPredictor::build_messages(std::span<const Turn> context,
                                                                              std::size_t max_predictions) {
    std::string system =
        "You anticipate what a customer will ask next in a support conversation. "
        "Reply with the " + std::to_string(max_predictions) +
        " most likely follow-up topics, one per line. Write each topic as a short "
        "description phrased like a passage of product documentation (for example: "
        "\"Enterprise plan pricing and annual billing discounts\"), not as a question. "
        "Do not add numbering or any other text.";

    std::string user = "Conversation so far:\n";
    for (const auto& turn : context) {
        user += turn.role == Role::User ? "User: " : "Agent: ";
        user += turn.text;
        user += '\n';
    }
    user += "\nList the likely next topics.";
    return {{"system", std::move(system)}, {"user", std::move(user)}};
}

std::vector<std::string> LlmPredictor::parse_topics(std::string_view completion, std::size_t limit) {
    std::vector<std::string> topics;
    std::size_t pos = 0;
    while (pos <= completion.size() && topics.size() < limit) {
        const auto nl = completion.find('\n', pos);
        std::string_view line =
            completion.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? completion.size() + 1 : nl + 1;

        line = trim(line);
        // "1.", "2)", "-", "*", and the UTF-8 bullet.
        std::size_t skip = 0;
        while (skip < line.size() && line[skip] >= '0' && line[skip] <= '9') ++skip;
        if (skip > 0 && skip < line.size() && (line[skip] == '.' || line[skip] == ')')) {
            line.remove_prefix(skip + 1);
        } else if (line.starts_with("- ") || line.starts_with("* ")) {
            line.remove_prefix(2);
        } else if (line.starts_with("\xE2\x80\xA2")) {
            line.remove_prefix(3);
        }
        line = trim(line);
        if (line.size() >= 2 && line.front() == '"' && line.back() == '"') line = line.substr(1, line.size() - 2);
        if (!line.empty()) topics.emplace_back(line);
    }
    return topics;
}

std::vector<Prediction> LlmPredictor::predict(std::span<const Turn> context, std::size_t turn_index) const {
    if (context.empty()) throw Error(Errc::InvalidArgument, "llm prediction needs context");
    if (cfg_.endpoint.empty()) throw Error(Errc::PredictorUnavailable, "no chat endpoint configured");
    const auto messages = build_messages(context, max_predictions_);
    std::string content;
    try {
        content = chat_complete(cfg_, api_key_, messages);
    } catch (const Error& e) {
        throw Error(Errc::PredictorUnavailable, e.what());
    }
    std::vector<Prediction> out;
    for (auto& topic : parse_topics(content, max_predictions_)) out.push_back({std::move(topic), turn_index});
    return out;
}

std::string chat_complete(const ChatConfig& cfg, std::string_view api_key,
                          std::span<const std::pair<std::string, std::string>> messages) {
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto& [role, content] : messages) msgs.push_back({{"role", role}, {"content", content}});
    const nlohmann::json body = {{"model", cfg.model}, {"temperature", cfg.temperature}, {"messages", msgs}};

    const auto response = detail::post_json(cfg.endpoint, "/chat/completions", body, api_key, cfg.timeout_seconds);
    const auto choices = response.is_object() ? response.find("choices") : response.end();
    if (!response.is_object() || choices == response.end() || !choices->is_array() || choices->empty()) {
        throw Error(Errc::ProtocolError, "chat response lacks choices");
    }
    const auto& first = (*choices)[0];
    if (!first.is_object() || !first.contains("message") || !first["message"].is_object() ||
        !first["message"].contains("content") || !first["message"]["content"].is_string()) {
        throw Error(Errc::ProtocolError, "chat response lacks choices[0].message.content");
    }
    return first["message"]["content"].get<std::string>();
}

std::shared_ptr<Predictor> make_predictor(const PredictorConfig& cfg) {
    switch (cfg.strategy) {
    case PredictionStrategy::Llm: return std::make_shared<LlmPredictor>(cfg.llm, cfg.max_predictions);
    case PredictionStrategy::Keyword: return std::make_shared<KeywordPredictor>(cfg.max_predictions);
    case PredictionStrategy::Scripted:
        return std::make_shared<ScriptedPredictor>(std::map<std::size_t, std::vector<std::string>>{},
                                                   cfg.max_predictions);
    }
    throw Error(Errc::ConfigInvalid, "unknown prediction strategy");
}

} // namespace memrouter
