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
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "memrouter/memory_router.hpp"
#include "memrouter/vector_store.hpp"

namespace memrouter {

struct ScenarioTurn {
    std::string query;
    std::vector<std::string> topic_labels;  // what this turn is about; predicted on the turn before
    double delay_s = 5.0;                   // pause after this turn, in [3, 7]
};

struct Scenario {
    std::string scenario_id;
    std::vector<ScenarioTurn> turns;
};

/// A JSON array of {"query", "topic_labels", "delay_s"} objects.
Scenario parse_scenario(std::string_view json_text, std::string scenario_id);

/// One file, or every `*.json` in a directory sorted by name. The file stem
/// is the scenario id.
std::vector<Scenario> load_scenarios(const std::filesystem::path& path);

enum class RunMode { Baseline, Dual };

std::string_view to_string(RunMode mode);

struct TurnRecord {
    std::string scenario_id;
    std::size_t turn_index = 0;  // 0-based
    RunMode mode = RunMode::Dual;
    std::string query;
    bool hit = false;  // always false in baseline mode
    double retrieval_latency_ms = 0.0;
    double embed_latency_ms = 0.0;
    std::size_t cache_size = 0;  // after the turn; 0 in baseline mode

    friend bool operator==(const TurnRecord&, const TurnRecord&) = default;
};

/// Router settings for benchmark runs: virtual clock, uniform(97, 307) store
/// latency and the scripted predictor; everything else at its default.
RouterConfig benchmark_defaults();

/// Delay seed used for one scenario, derived from the run seed and the
/// scenario id so that results do not depend on scenario order.
std::uint64_t scenario_seed(std::uint64_t seed, std::string_view scenario_id);

/// Runs one scenario on a fresh virtual clock. Baseline mode embeds, searches
/// the store and responds, with no cache and no Slow Thinker. Dual mode runs
/// a full session whose scripted predictor is fed each next turn's labels.
/// Both modes draw the store delay of turn t from the same stream, so the
/// latencies of a miss pair up exactly.
std::vector<TurnRecord> run_scenario(const Scenario& scenario, RunMode mode, const RouterConfig& cfg,
                                     std::shared_ptr<VectorStore> store, std::uint64_t seed);

enum class SuiteModes { Baseline, Dual, Paired };

/// Every scenario in the requested modes; records are grouped by scenario,
/// baseline first. `jobs` > 1 runs scenarios concurrently.
std::vector<TurnRecord> run_suite(std::span<const Scenario> scenarios, SuiteModes modes, const RouterConfig& cfg,
                                  std::shared_ptr<VectorStore> store, std::uint64_t seed, std::size_t jobs = 1);

struct ScenarioRow {
    std::string scenario_id;
    std::size_t turns = 0;
    std::size_t hits = 0;
    double hit_rate = 0.0;

    friend bool operator==(const ScenarioRow&, const ScenarioRow&) = default;
};

/// Dual-mode turns [first_turn, last_turn], 1-based.
struct BucketRow {
    std::size_t first_turn = 0;
    std::size_t last_turn = 0;
    std::size_t queries = 0;
    std::size_t hits = 0;
    double hit_rate = 0.0;

    friend bool operator==(const BucketRow&, const BucketRow&) = default;
};

struct SweepRow {
    double tau = 0.0;
    std::size_t queries = 0;
    std::size_t hits = 0;
    double hit_rate = 0.0;

    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

inline constexpr std::size_t kTurnsPerBucket = 5;

/// Metrics over the dual-mode records, paired with baseline records where
/// present. Figures that cannot be computed from the given records are
/// empty.
struct BenchmarkReport {
    std::size_t scenarios = 0;  // distinct scenarios with dual records
    std::size_t queries = 0;    // dual records
    std::size_t hits = 0;
    std::optional<double> overall_hit_rate;
    std::optional<double> warm_hit_rate;  // first turn of each scenario excluded
    std::optional<double> mean_store_latency_ms;  // baseline records, else dual misses
    std::optional<double> mean_cache_hit_latency_ms;
    std::optional<double> speedup;
    std::optional<double> total_saved_ms;  // needs baseline records
    std::vector<ScenarioRow> per_scenario;
    std::vector<BucketRow> buckets;
    std::vector<SweepRow> sweep;
    std::vector<TurnRecord> records;

    friend bool operator==(const BenchmarkReport&, const BenchmarkReport&) = default;
};

/// Pure function of the records. When both modes are present they must cover
/// the same (scenario, turn) pairs with the same queries, otherwise
/// UnpairedRecords.
BenchmarkReport aggregate(std::vector<TurnRecord> records, std::vector<SweepRow> sweep = {});

/// Reruns the dual-mode suite once per tau with the same seed. Each tau must
/// lie in [0, 1] and stay below the dedup threshold.
std::vector<SweepRow> sweep_threshold(std::span<const double> taus, std::span<const Scenario> scenarios,
                                      const RouterConfig& cfg, std::shared_ptr<VectorStore> store,
                                      std::uint64_t seed, std::size_t jobs = 1);

enum class ReportFormat { Text, Json };

std::string render_report(const BenchmarkReport& report, ReportFormat format);

/// Reads the JSON form back and re-aggregates it.
BenchmarkReport parse_report(std::string_view json_text);

/// Rounds half up and appends the multiplication sign; "n/a" when empty.
std::string format_speedup(std::optional<double> speedup);

} // namespace memrouter
