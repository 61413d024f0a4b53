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


#include "memrouter/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "detail.hpp"
#include "memrouter/error.hpp"
#include "memrouter/text.hpp"

namespace memrouter {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::string percent(double rate) { return std::to_string(static_cast<long long>(std::floor(rate * 100.0 + 0.5))) + "%"; }

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

} // namespace

Scenario parse_scenario(std::string_view json_text, std::string scenario_id) {
    const auto bad = [&](const std::string& what) {
        return Error(Errc::InvalidArgument, "scenario " + scenario_id + ": " + what);
    };
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw bad(std::string("not valid JSON: ") + e.what());
    }
    if (!root.is_array()) throw bad("expected an array of turns");

    Scenario s;
    s.scenario_id = std::move(scenario_id);
    for (std::size_t i = 0; i < root.size(); ++i) {
        const json& t = root[i];
        const std::string at = "turn " + std::to_string(i);
        if (!t.is_object()) throw bad(at + " is not an object");
        for (const auto& [key, value] : t.items()) {
            if (key != "query" && key != "topic_labels" && key != "delay_s") throw bad(at + " has unknown key " + key);
        }
        ScenarioTurn turn;
        if (!t.contains("query") || !t["query"].is_string() || trim(t["query"].get<std::string>()).empty()) {
            throw bad(at + " needs a non-empty query");
        }
        turn.query = t["query"].get<std::string>();
        if (t.contains("topic_labels")) {
            if (!t["topic_labels"].is_array()) throw bad(at + " topic_labels must be an array");
            for (const auto& label : t["topic_labels"]) {
                if (!label.is_string()) throw bad(at + " topic_labels must hold strings");
                turn.topic_labels.push_back(label.get<std::string>());
            }
        }
        if (!t.contains("delay_s") || !t["delay_s"].is_number()) throw bad(at + " needs a numeric delay_s");
        turn.delay_s = t["delay_s"].get<double>();
        if (!(turn.delay_s >= 3.0 && turn.delay_s <= 7.0)) throw bad(at + " delay_s must be in [3, 7]");
        s.turns.push_back(std::move(turn));
    }
    if (s.turns.empty()) throw bad("has no turns");
    return s;
}

std::vector<Scenario> load_scenarios(const std::filesystem::path& path) {
    namespace fs = std::filesystem;
    std::error_code ec;
    std::vector<fs::path> files;
    if (fs::is_directory(path, ec)) {
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) throw Error(Errc::Io, "no .json scenarios in " + path.string());
    } else if (fs::is_regular_file(path, ec)) {
        files.push_back(path);
    } else {
        throw Error(Errc::Io, "no such scenario file or directory: " + path.string());
    }
    std::vector<Scenario> out;
    for (const auto& f : files) out.push_back(parse_scenario(read_file(f), f.stem().string()));
    return out;
}

std::string_view to_string(RunMode mode) { return mode == RunMode::Baseline ? "baseline" : "dual"; }

RouterConfig benchmark_defaults() {
    RouterConfig cfg;
    cfg.clock = ClockKind::Virtual;
    cfg.latency = LatencyModel::uniform(97.0, 307.0, 0);
    cfg.slow.predictor.strategy = PredictionStrategy::Scripted;
    return cfg;
}

std::uint64_t scenario_seed(std::uint64_t seed, std::string_view scenario_id) {
    return detail::splitmix64(seed ^ token_hash(scenario_id, 0));
}

std::vector<TurnRecord> run_scenario(const Scenario& scenario, RunMode mode, const RouterConfig& cfg,
                                     std::shared_ptr<VectorStore> store, std::uint64_t seed) {
    RouterConfig c = cfg;
    c.clock = ClockKind::Virtual;
    c.latency.seed = scenario_seed(seed, scenario.scenario_id);
    c.validate();

    const std::shared_ptr<const Embedder> embedder = make_embedder(c.embedder);
    std::vector<TurnRecord> records;
    records.reserve(scenario.turns.size());

    if (mode == RunMode::Baseline) {
        auto clock = std::make_shared<VirtualClock>();
        auto timed = std::make_shared<LatencyInjectedStore>(std::move(store), c.latency, clock);
        FastTalker talker(c.fast, embedder, timed, nullptr, nullptr, nullptr, clock);
        for (std::size_t t = 0; t < scenario.turns.size(); ++t) {
            const ScenarioTurn& turn = scenario.turns[t];
            const QueryReply reply = talker.handle_query(turn.query, clock->now(), t);
            records.push_back({scenario.scenario_id, t, RunMode::Baseline, turn.query, false,
                               reply.outcome.retrieval_latency_ms, reply.outcome.embed_latency_ms, 0});
            clock->advance(Seconds{turn.delay_s});
        }
        return records;
    }

    SessionOverrides overrides;
    overrides.embedder = embedder;
    if (c.slow.predictor.strategy == PredictionStrategy::Scripted) {
        std::map<std::size_t, std::vector<std::string>> labels;
        for (std::size_t t = 0; t + 1 < scenario.turns.size(); ++t) labels[t] = scenario.turns[t + 1].topic_labels;
        overrides.predictor = std::make_shared<ScriptedPredictor>(std::move(labels), c.slow.predictor.max_predictions);
    }
    auto session = Session::start(c, std::move(store), std::move(overrides));
    for (const ScenarioTurn& turn : scenario.turns) {
        const TurnResult r = session->user_turn(turn.query, turn.delay_s);
        records.push_back({scenario.scenario_id, r.turn_index, RunMode::Dual, turn.query,
                           r.outcome.source == RetrievalSource::CacheHit, r.outcome.retrieval_latency_ms,
                           r.outcome.embed_latency_ms, r.cache_size_after});
    }
    session->shutdown();
    return records;
}

std::vector<TurnRecord> run_suite(std::span<const Scenario> scenarios, SuiteModes modes, const RouterConfig& cfg,
                                  std::shared_ptr<VectorStore> store, std::uint64_t seed, std::size_t jobs) {
    const auto run_one = [&](const Scenario& s) {
        std::vector<TurnRecord> out;
        if (modes != SuiteModes::Dual) out = run_scenario(s, RunMode::Baseline, cfg, store, seed);
        if (modes != SuiteModes::Baseline) {
            auto dual = run_scenario(s, RunMode::Dual, cfg, store, seed);
            out.insert(out.end(), std::make_move_iterator(dual.begin()), std::make_move_iterator(dual.end()));
        }
        return out;
    };

    std::vector<std::vector<TurnRecord>> per(scenarios.size());
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, scenarios.size()));
    if (jobs == 1) {
        for (std::size_t i = 0; i < scenarios.size(); ++i) per[i] = run_one(scenarios[i]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(scenarios.size());
        std::vector<std::thread> workers;
        for (std::size_t w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < scenarios.size();) {
                    try {
                        per[i] = run_one(scenarios[i]);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        for (auto& w : workers) w.join();
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    std::vector<TurnRecord> records;
    for (auto& p : per) records.insert(records.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
    return records;
}

BenchmarkReport aggregate(std::vector<TurnRecord> records, std::vector<SweepRow> sweep) {
    BenchmarkReport r;
    using Key = std::pair<std::string, std::size_t>;
    std::map<Key, const TurnRecord*> baseline;
    std::map<Key, const TurnRecord*> dual;
    std::vector<const TurnRecord*> dual_order;
    for (const auto& rec : records) {
        auto& side = rec.mode == RunMode::Baseline ? baseline : dual;
        if (!side.emplace(Key{rec.scenario_id, rec.turn_index}, &rec).second) {
            throw Error(Errc::UnpairedRecords, "duplicate " + std::string(to_string(rec.mode)) + " record for " +
                                                   rec.scenario_id + " turn " + std::to_string(rec.turn_index));
        }
        if (rec.mode == RunMode::Dual) dual_order.push_back(&rec);
    }
    if (!baseline.empty() && !dual.empty()) {
        if (baseline.size() != dual.size()) throw Error(Errc::UnpairedRecords, "baseline and dual record counts differ");
        for (auto b = baseline.begin(), d = dual.begin(); b != baseline.end(); ++b, ++d) {
            if (b->first != d->first) {
                throw Error(Errc::UnpairedRecords, "no dual record pairs with " + b->first.first + " turn " +
                                                       std::to_string(b->first.second));
            }
            if (b->second->query != d->second->query) {
                throw Error(Errc::UnpairedRecords, "queries differ at " + b->first.first + " turn " +
                                                       std::to_string(b->first.second));
            }
        }
    }

    std::vector<std::string> scenario_ids;
    std::map<std::string, ScenarioRow> rows;
    std::map<std::size_t, BucketRow> buckets;
    double hit_latency = 0.0;
    double miss_latency = 0.0;
    double saved = 0.0;
    for (const TurnRecord* rec : dual_order) {
        ++r.queries;
        auto [row, fresh] = rows.try_emplace(rec->scenario_id);
        if (fresh) {
            scenario_ids.push_back(rec->scenario_id);
            row->second.scenario_id = rec->scenario_id;
        }
        ++row->second.turns;
        BucketRow& bucket = buckets[rec->turn_index / kTurnsPerBucket];
        ++bucket.queries;
        if (rec->hit) {
            ++r.hits;
            ++row->second.hits;
            ++bucket.hits;
            hit_latency += rec->retrieval_latency_ms;
            if (!baseline.empty()) {
                saved += baseline.at({rec->scenario_id, rec->turn_index})->retrieval_latency_ms -
                         rec->retrieval_latency_ms;
            }
        } else {
            miss_latency += rec->retrieval_latency_ms;
        }
    }
    r.scenarios = scenario_ids.size();

    if (r.queries > 0) r.overall_hit_rate = static_cast<double>(r.hits) / static_cast<double>(r.queries);
    if (r.queries > r.scenarios) {
        r.warm_hit_rate = static_cast<double>(r.hits) / static_cast<double>(r.queries - r.scenarios);
    }
    if (!baseline.empty()) {
        double sum = 0.0;
        for (const auto& rec : records) {
            if (rec.mode == RunMode::Baseline) sum += rec.retrieval_latency_ms;
        }
        r.mean_store_latency_ms = sum / static_cast<double>(baseline.size());
    } else if (r.queries > r.hits) {
        r.mean_store_latency_ms = miss_latency / static_cast<double>(r.queries - r.hits);
    }
    if (r.hits > 0) r.mean_cache_hit_latency_ms = hit_latency / static_cast<double>(r.hits);
    if (r.mean_store_latency_ms && r.mean_cache_hit_latency_ms && *r.mean_cache_hit_latency_ms > 0) {
        r.speedup = *r.mean_store_latency_ms / *r.mean_cache_hit_latency_ms;
    }
    if (!baseline.empty() && !dual.empty()) r.total_saved_ms = saved;

    for (const auto& id : scenario_ids) {
        ScenarioRow row = rows.at(id);
        row.hit_rate = static_cast<double>(row.hits) / static_cast<double>(row.turns);
        r.per_scenario.push_back(std::move(row));
    }
    for (auto& [index, b] : buckets) {
        b.first_turn = index * kTurnsPerBucket + 1;
        b.last_turn = (index + 1) * kTurnsPerBucket;
        b.hit_rate = static_cast<double>(b.hits) / static_cast<double>(b.queries);
        r.buckets.push_back(b);
    }
    r.sweep = std::move(sweep);
    r.records = std::move(records);
    return r;
}

std::vector<SweepRow> sweep_threshold(std::span<const double> taus, std::span<const Scenario> scenarios,
                                      const RouterConfig& cfg, std::shared_ptr<VectorStore> store,
                                      std::uint64_t seed, std::size_t jobs) {
    for (const double tau : taus) {
        if (!(tau >= 0.0 && tau <= 1.0)) {
            throw Error(Errc::InvalidArgument, "threshold " + fmt("%g", tau) + " is outside [0, 1]");
        }
    }
    std::vector<SweepRow> rows;
    for (const double tau : taus) {
        RouterConfig c = cfg;
        c.cache.similarity_threshold = tau;
        const auto records = run_suite(scenarios, SuiteModes::Dual, c, store, seed, jobs);
        SweepRow row{tau, records.size(), 0, 0.0};
        for (const auto& rec : records) row.hits += rec.hit ? 1 : 0;
        if (row.queries > 0) row.hit_rate = static_cast<double>(row.hits) / static_cast<double>(row.queries);
        rows.push_back(row);
    }
    return rows;
}

std::string format_speedup(std::optional<double> speedup) {
    if (!speedup) return "n/a";
    return std::to_string(static_cast<long long>(std::floor(*speedup + 0.5))) + "×";
}

std::string render_report(const BenchmarkReport& r, ReportFormat format) {
    if (format == ReportFormat::Json) {
        json records = json::array();
        for (const auto& rec : r.records) {
            records.push_back({{"scenario_id", rec.scenario_id},
                               {"turn_index", rec.turn_index},
                               {"mode", to_string(rec.mode)},
                               {"query", rec.query},
                               {"hit", rec.hit},
                               {"retrieval_latency_ms", rec.retrieval_latency_ms},
                               {"embed_latency_ms", rec.embed_latency_ms},
                               {"cache_size", rec.cache_size}});
        }
        json scenarios = json::array();
        for (const auto& s : r.per_scenario) {
            scenarios.push_back({{"scenario_id", s.scenario_id}, {"turns", s.turns}, {"hits", s.hits},
                                 {"hit_rate", s.hit_rate}});
        }
        json buckets = json::array();
        for (const auto& b : r.buckets) {
            buckets.push_back({{"first_turn", b.first_turn}, {"last_turn", b.last_turn}, {"queries", b.queries},
                               {"hits", b.hits}, {"hit_rate", b.hit_rate}});
        }
        json sweep = json::array();
        for (const auto& s : r.sweep) {
            sweep.push_back({{"tau", s.tau}, {"queries", s.queries}, {"hits", s.hits}, {"hit_rate", s.hit_rate}});
        }
        const json doc = {{"summary",
                           {{"scenarios", r.scenarios},
                            {"queries", r.queries},
                            {"hits", r.hits},
                            {"overall_hit_rate", opt(r.overall_hit_rate)},
                            {"warm_hit_rate", opt(r.warm_hit_rate)},
                            {"mean_store_latency_ms", opt(r.mean_store_latency_ms)},
                            {"mean_cache_hit_latency_ms", opt(r.mean_cache_hit_latency_ms)},
                            {"speedup", opt(r.speedup)},
                            {"total_saved_ms", opt(r.total_saved_ms)}}},
                          {"per_scenario", scenarios},
                          {"turn_buckets", buckets},
                          {"threshold_sweep", sweep},
                          {"records", records}};
        return doc.dump(2) + "\n";
    }

    std::string out;
    const auto line = [&](const std::string& label, const std::string& value) {
        out += "  " + pad(label, 36) + value + "\n";
    };
    const auto rate = [](const std::optional<double>& v, std::size_t num, std::size_t den) {
        return v ? percent(*v) + " (" + std::to_string(num) + "/" + std::to_string(den) + ")" : std::string("n/a");
    };
    const auto ms = [](const std::optional<double>& v) { return v ? fmt("%.2f ms", *v) : std::string("n/a"); };

    out += "Summary\n";
    line("Scenarios", std::to_string(r.scenarios));
    line("Queries", std::to_string(r.queries));
    line("Cache hit rate (overall)", rate(r.overall_hit_rate, r.hits, r.queries));
    line("Cache hit rate (warm, turn >= 2)", rate(r.warm_hit_rate, r.hits, r.queries - r.scenarios));
    line("Mean store latency", ms(r.mean_store_latency_ms));
    line("Mean cache-hit latency", ms(r.mean_cache_hit_latency_ms));
    line("Retrieval speedup", format_speedup(r.speedup));
    line("Total retrieval time saved", r.total_saved_ms ? fmt("%.1f ms", *r.total_saved_ms) : "n/a");

    std::size_t id_width = 12;
    for (const auto& s : r.per_scenario) id_width = std::max(id_width, s.scenario_id.size() + 2);
    out += "\nPer scenario\n";
    out += "  " + pad("scenario", id_width) + pad("turns", 8) + pad("hits", 8) + "hit rate\n";
    for (const auto& s : r.per_scenario) {
        out += "  " + pad(s.scenario_id, id_width) + pad(std::to_string(s.turns), 8) + pad(std::to_string(s.hits), 8) +
               percent(s.hit_rate) + "\n";
    }

    out += "\nBy turn depth\n";
    out += "  " + pad("turns", 12) + pad("queries", 10) + pad("hits", 8) + "hit rate\n";
    for (const auto& b : r.buckets) {
        out += "  " + pad(std::to_string(b.first_turn) + "-" + std::to_string(b.last_turn), 12) +
               pad(std::to_string(b.queries), 10) + pad(std::to_string(b.hits), 8) + percent(b.hit_rate) + "\n";
    }

    out += "\nThreshold sweep\n";
    out += "  " + pad("tau", 10) + pad("queries", 10) + pad("hits", 8) + "hit rate\n";
    for (const auto& s : r.sweep) {
        out += "  " + pad(fmt("%.2f", s.tau), 10) + pad(std::to_string(s.queries), 10) +
               pad(std::to_string(s.hits), 8) + percent(s.hit_rate) + "\n";
    }
    return out;
}

BenchmarkReport parse_report(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("report is not valid JSON: ") + e.what());
    }
    try {
        std::vector<TurnRecord> records;
        for (const auto& j : doc.at("records")) {
            TurnRecord rec;
            rec.scenario_id = j.at("scenario_id").get<std::string>();
            rec.turn_index = j.at("turn_index").get<std::size_t>();
            const auto mode = j.at("mode").get<std::string>();
            if (mode != "baseline" && mode != "dual") throw Error(Errc::InvalidArgument, "unknown mode " + mode);
            rec.mode = mode == "baseline" ? RunMode::Baseline : RunMode::Dual;
            rec.query = j.at("query").get<std::string>();
            rec.hit = j.at("hit").get<bool>();
            rec.retrieval_latency_ms = j.at("retrieval_latency_ms").get<double>();
            rec.embed_latency_ms = j.at("embed_latency_ms").get<double>();
            rec.cache_size = j.at("cache_size").get<std::size_t>();
            records.push_back(std::move(rec));
        }
        std::vector<SweepRow> sweep;
        if (doc.contains("threshold_sweep")) {
            for (const auto& j : doc.at("threshold_sweep")) {
                sweep.push_back({j.at("tau").get<double>(), j.at("queries").get<std::size_t>(),
                                 j.at("hits").get<std::size_t>(), j.at("hit_rate").get<double>()});
            }
        }
        return aggregate(std::move(records), std::move(sweep));
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("malformed report: ") + e.what());
    }
}

} // namespace memrouter
