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


#include "memrouter/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "memrouter/error.hpp"

namespace memrouter {

namespace {

using nlohmann::json;

// Reads the members of one JSON object, rejecting any it was not asked about.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw Error(Errc::ConfigInvalid, where() + " must be an object");
    }

    ~Section() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.contains(key)) throw Error(Errc::ConfigInvalid, "unknown key " + where(key));
        }
    }

    template <typename T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) return;
        if constexpr (std::is_same_v<T, bool>) {
            if (!it->is_boolean()) throw Error(Errc::ConfigInvalid, where(key) + " must be a boolean");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!it->is_string()) throw Error(Errc::ConfigInvalid, where(key) + " must be a string");
        } else if constexpr (std::is_unsigned_v<T>) {
            if (!it->is_number_unsigned()) throw Error(Errc::ConfigInvalid, where(key) + " must be a non-negative integer");
        } else {
            if (!it->is_number()) throw Error(Errc::ConfigInvalid, where(key) + " must be a number");
        }
        out = it->template get<T>();
    }

    template <typename E, std::size_t N>
    void read_enum(const char* key, E& out, const std::pair<const char*, E> (&names)[N]) {
        std::string name;
        for (const auto& [n, v] : names) {
            if (v == out) name = n;
        }
        read(key, name);
        for (const auto& [n, v] : names) {
            if (name == n) {
                out = v;
                return;
            }
        }
        throw Error(Errc::ConfigInvalid, where(key) + " has unknown value \"" + name + "\"");
    }

    /// Nested object, or nullptr when absent.
    const json* child(const char* key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    std::string where(std::string_view key = {}) const {
        std::string p = path_.empty() ? std::string(key) : path_ + (key.empty() ? "" : "." + std::string(key));
        return p.empty() ? "config" : p;
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string, std::less<>> seen_;
};

constexpr std::pair<const char*, EmbedderKind> kEmbedderKinds[] = {{"hashing", EmbedderKind::Hashing},
                                                                   {"remote", EmbedderKind::Remote}};
constexpr std::pair<const char*, LatencyKind> kLatencyKinds[] = {
    {"none", LatencyKind::None}, {"fixed", LatencyKind::Fixed}, {"uniform", LatencyKind::Uniform}};
constexpr std::pair<const char*, PredictionStrategy> kStrategies[] = {{"llm", PredictionStrategy::Llm},
                                                                      {"keyword", PredictionStrategy::Keyword},
                                                                      {"scripted", PredictionStrategy::Scripted}};
constexpr std::pair<const char*, ClockKind> kClocks[] = {{"real", ClockKind::Real}, {"virtual", ClockKind::Virtual}};
constexpr std::pair<const char*, StoreKind> kStores[] = {{"local", StoreKind::Local}, {"remote", StoreKind::Remote}};
constexpr std::pair<const char*, ResponderKind> kResponders[] = {{"template", ResponderKind::Template},
                                                                 {"chat", ResponderKind::Chat}};

template <typename E, std::size_t N>
const char* name_of(E v, const std::pair<const char*, E> (&names)[N]) {
    for (const auto& [n, x] : names) {
        if (x == v) return n;
    }
    return "unknown";
}

void read_chat(const json& j, const std::string& path, ChatConfig& c) {
    Section s(j, path);
    s.read("endpoint", c.endpoint);
    s.read("model", c.model);
    s.read("temperature", c.temperature);
    s.read("timeout_seconds", c.timeout_seconds);
}

json chat_json(const ChatConfig& c) {
    return {{"endpoint", c.endpoint}, {"model", c.model}, {"temperature", c.temperature},
            {"timeout_seconds", c.timeout_seconds}};
}

void read_root(const json& root, AppConfig& cfg) {
    Section s(root, "");
    RouterConfig& r = cfg.router;
    if (const json* j = s.child("cache")) {
        Section c(*j, "cache");
        c.read("max_size", r.cache.max_size);
        c.read("ttl_seconds", r.cache.ttl_seconds);
        c.read("similarity_threshold", r.cache.similarity_threshold);
        c.read("dedup_threshold", r.cache.dedup_threshold);
    }
    if (const json* j = s.child("fast_talker")) {
        Section c(*j, "fast_talker");
        c.read("max_context_chunks", r.fast.max_context_chunks);
        c.read("fallback_enabled", r.fast.fallback_enabled);
        c.read("cache_on_miss", r.fast.cache_on_miss);
        c.read("top_k", r.fast.top_k);
    }
    if (const json* j = s.child("slow_thinker")) {
        Section c(*j, "slow_thinker");
        c.read("prefetch_top_k", r.slow.prefetch_top_k);
        c.read("rate_limit_seconds", r.slow.rate_limit_seconds);
        c.read("priority_k_multiplier", r.slow.priority_k_multiplier);
        if (const json* p = c.child("predictor")) {
            Section ps(*p, "slow_thinker.predictor");
            ps.read_enum("strategy", r.slow.predictor.strategy, kStrategies);
            ps.read("max_predictions", r.slow.predictor.max_predictions);
            ps.read("context_turns", r.slow.predictor.context_turns);
            if (const json* l = ps.child("llm")) read_chat(*l, "slow_thinker.predictor.llm", r.slow.predictor.llm);
        }
    }
    if (const json* j = s.child("embedder")) {
        Section c(*j, "embedder");
        c.read_enum("kind", r.embedder.kind, kEmbedderKinds);
        c.read("dimension", r.embedder.dimension);
        c.read("endpoint", r.embedder.endpoint);
        c.read("model_name", r.embedder.model_name);
        c.read("seed", r.embedder.seed);
        c.read("timeout_seconds", r.embedder.timeout_seconds);
    }
    if (const json* j = s.child("latency")) {
        Section c(*j, "latency");
        c.read_enum("kind", r.latency.kind, kLatencyKinds);
        c.read("lo_ms", r.latency.lo_ms);
        c.read("hi_ms", r.latency.hi_ms);
        c.read("seed", r.latency.seed);
    }
    s.read_enum("clock", r.clock, kClocks);
    s.read("window_capacity", r.window_capacity);
    if (const json* j = s.child("chunker")) {
        Section c(*j, "chunker");
        c.read("chunk_size", cfg.chunker.chunk_size);
        c.read("overlap", cfg.chunker.overlap);
    }
    if (const json* j = s.child("store")) {
        Section c(*j, "store");
        c.read_enum("kind", cfg.store, kStores);
        c.read("endpoint", cfg.remote_store.endpoint);
        c.read("collection", cfg.remote_store.collection);
        c.read("dimension", cfg.remote_store.dimension);
        c.read("timeout_seconds", cfg.remote_store.timeout_seconds);
    }
    if (const json* j = s.child("responder")) {
        Section c(*j, "responder");
        c.read_enum("kind", cfg.responder, kResponders);
        if (const json* l = c.child("chat")) read_chat(*l, "responder.chat", cfg.chat);
    }
}

} // namespace

AppConfig parse_config(std::string_view json_text, const AppConfig& base) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(Errc::ConfigInvalid, std::string("config is not valid JSON: ") + e.what());
    }
    AppConfig cfg = base;
    try {
        read_root(root, cfg);
    } catch (const json::exception& e) {
        throw Error(Errc::ConfigInvalid, e.what());
    }
    cfg.router.validate();
    cfg.chunker.validate();
    if (cfg.store == StoreKind::Remote && cfg.remote_store.endpoint.empty()) {
        throw Error(Errc::ConfigInvalid, "remote store needs an endpoint");
    }
    if (cfg.responder == ResponderKind::Chat && cfg.chat.endpoint.empty()) {
        throw Error(Errc::ConfigInvalid, "chat responder needs an endpoint");
    }
    return cfg;
}

AppConfig load_config(const std::filesystem::path& path, const AppConfig& base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), base);
}

std::string dump_config(const AppConfig& cfg) {
    const RouterConfig& r = cfg.router;
    const json j = {
        {"cache",
         {{"max_size", r.cache.max_size},
          {"ttl_seconds", r.cache.ttl_seconds},
          {"similarity_threshold", r.cache.similarity_threshold},
          {"dedup_threshold", r.cache.dedup_threshold}}},
        {"fast_talker",
         {{"max_context_chunks", r.fast.max_context_chunks},
          {"fallback_enabled", r.fast.fallback_enabled},
          {"cache_on_miss", r.fast.cache_on_miss},
          {"top_k", r.fast.top_k}}},
        {"slow_thinker",
         {{"prefetch_top_k", r.slow.prefetch_top_k},
          {"rate_limit_seconds", r.slow.rate_limit_seconds},
          {"priority_k_multiplier", r.slow.priority_k_multiplier},
          {"predictor",
           {{"strategy", name_of(r.slow.predictor.strategy, kStrategies)},
            {"max_predictions", r.slow.predictor.max_predictions},
            {"context_turns", r.slow.predictor.context_turns},
            {"llm", chat_json(r.slow.predictor.llm)}}}}},
        {"embedder",
         {{"kind", name_of(r.embedder.kind, kEmbedderKinds)},
          {"dimension", r.embedder.dimension},
          {"endpoint", r.embedder.endpoint},
          {"model_name", r.embedder.model_name},
          {"seed", r.embedder.seed},
          {"timeout_seconds", r.embedder.timeout_seconds}}},
        {"latency",
         {{"kind", name_of(r.latency.kind, kLatencyKinds)},
          {"lo_ms", r.latency.lo_ms},
          {"hi_ms", r.latency.hi_ms},
          {"seed", r.latency.seed}}},
        {"clock", name_of(r.clock, kClocks)},
        {"window_capacity", r.window_capacity},
        {"chunker", {{"chunk_size", cfg.chunker.chunk_size}, {"overlap", cfg.chunker.overlap}}},
        {"store",
         {{"kind", name_of(cfg.store, kStores)},
          {"endpoint", cfg.remote_store.endpoint},
          {"collection", cfg.remote_store.collection},
          {"dimension", cfg.remote_store.dimension},
          {"timeout_seconds", cfg.remote_store.timeout_seconds}}},
        {"responder", {{"kind", name_of(cfg.responder, kResponders)}, {"chat", chat_json(cfg.chat)}}},
    };
    return j.dump(2) + "\n";
}

} // namespace memrouter
