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


#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "memrouter/benchmark.hpp"
#include "memrouter/config.hpp"
#include "memrouter/error.hpp"

using namespace memrouter;

namespace {

AppConfig bench_config(const std::string& path) {
    AppConfig base;
    base.router = benchmark_defaults();
    return path.empty() ? base : load_config(path, base);
}

std::shared_ptr<VectorStore> open_store(const AppConfig& cfg, const std::string& kb, bool fill) {
    const auto embedder = make_embedder(cfg.router.embedder);
    std::shared_ptr<VectorStore> store;
    if (cfg.store == StoreKind::Remote) {
        RemoteStoreConfig rc = cfg.remote_store;
        rc.dimension = embedder->dim();
        store = std::make_shared<RemoteVectorStore>(rc, embedder);
    } else {
        store = std::make_shared<LocalVectorStore>(embedder->dim());
    }
    if (fill) {
        const auto docs = load_corpus(kb);
        const IngestStats stats = ingest(docs, cfg.chunker, *embedder, *store);
        std::fprintf(stderr, "ingested %zu documents, %zu chunks\n", stats.documents, stats.chunks);
    }
    return store;
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw Error(Errc::Io, "cannot write " + out);
    f << text;
    if (!f.flush()) throw Error(Errc::Io, "cannot write " + out);
}

ReportFormat parse_format(const std::string& f) { return f == "json" ? ReportFormat::Json : ReportFormat::Text; }

std::vector<double> parse_thresholds(const std::string& list) {
    std::vector<double> taus;
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ',');) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw Error(Errc::InvalidArgument, "bad threshold \"" + item + "\"");
        taus.push_back(v);
    }
    if (taus.empty()) throw Error(Errc::InvalidArgument, "no thresholds given");
    return taus;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dual-agent memory router for voice retrieval"};
    app.require_subcommand(1);

    std::string kb = "data/kb";
    std::string scenarios = "data/scenarios";
    std::string config_path;
    std::string out;
    std::string format = "text";
    std::string mode = "paired";
    std::string store_kind;
    std::string thresholds = "0.30,0.35,0.40,0.45,0.50,0.55";
    std::string in;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;

    auto* ingest_cmd = app.add_subcommand("ingest", "Chunk, embed and load a knowledge base");
    ingest_cmd->add_option("--kb", kb, "Directory of .txt documents")->required();
    ingest_cmd->add_option("--store", store_kind, "Target store")->check(CLI::IsMember({"local", "remote"}));
    ingest_cmd->add_option("--config", config_path, "JSON config file");

    auto* bench_cmd = app.add_subcommand("bench", "Run the conversation scenarios");
    bench_cmd->add_option("--scenarios", scenarios, "Scenario file or directory")->required();
    bench_cmd->add_option("--mode", mode, "Which pipelines to run")->check(CLI::IsMember({"baseline", "dual", "paired"}));
    bench_cmd->add_option("--seed", seed, "Latency seed")->required();
    bench_cmd->add_option("--config", config_path, "JSON config file");
    bench_cmd->add_option("--kb", kb, "Knowledge base directory");
    bench_cmd->add_option("--out", out, "Write the report here instead of stdout");
    bench_cmd->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));
    bench_cmd->add_option("--jobs", jobs, "Scenarios run concurrently")->check(CLI::PositiveNumber);

    auto* sweep_cmd = app.add_subcommand("sweep", "Hit rate across similarity thresholds");
    sweep_cmd->add_option("--thresholds", thresholds, "Comma-separated tau values")->required();
    sweep_cmd->add_option("--seed", seed, "Latency seed")->required();
    sweep_cmd->add_option("--scenarios", scenarios, "Scenario file or directory");
    sweep_cmd->add_option("--config", config_path, "JSON config file");
    sweep_cmd->add_option("--kb", kb, "Knowledge base directory");
    sweep_cmd->add_option("--out", out, "Write the report here instead of stdout");
    sweep_cmd->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));
    sweep_cmd->add_option("--jobs", jobs, "Scenarios run concurrently")->check(CLI::PositiveNumber);

    auto* report_cmd = app.add_subcommand("report", "Render a saved JSON report");
    report_cmd->add_option("--in", in, "Report written by bench --format json")->required();
    report_cmd->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest_cmd) {
            AppConfig cfg = config_path.empty() ? AppConfig{} : load_config(config_path);
            if (store_kind == "remote") cfg.store = StoreKind::Remote;
            if (store_kind == "local") cfg.store = StoreKind::Local;
            if (cfg.store == StoreKind::Remote && cfg.remote_store.endpoint.empty()) {
                throw Error(Errc::ConfigInvalid, "remote store needs store.endpoint in the config file");
            }
            const auto store = open_store(cfg, kb, true);
            std::printf("%s store now holds %zu chunks (dim %zu)\n",
                        cfg.store == StoreKind::Remote ? "remote" : "local", store->size(), store->dim());
        } else if (*bench_cmd) {
            const AppConfig cfg = bench_config(config_path);
            const auto suite = load_scenarios(scenarios);
            const auto store = open_store(cfg, kb, cfg.store == StoreKind::Local);
            const SuiteModes modes = mode == "baseline" ? SuiteModes::Baseline
                                     : mode == "dual"   ? SuiteModes::Dual
                                                        : SuiteModes::Paired;
            auto records = run_suite(suite, modes, cfg.router, store, seed, jobs);
            emit(render_report(aggregate(std::move(records)), parse_format(format)), out);
        } else if (*sweep_cmd) {
            const AppConfig cfg = bench_config(config_path);
            const auto taus = parse_thresholds(thresholds);
            const auto suite = load_scenarios(scenarios);
            const auto store = open_store(cfg, kb, cfg.store == StoreKind::Local);
            auto rows = sweep_threshold(taus, suite, cfg.router, store, seed, jobs);
            emit(render_report(aggregate({}, std::move(rows)), parse_format(format)), out);
        } else if (*report_cmd) {
            std::ifstream f(in, std::ios::binary);
            if (!f) throw Error(Errc::Io, "cannot open " + in);
            std::ostringstream text;
            text << f.rdbuf();
            emit(render_report(parse_report(text.str()), parse_format(format)), out);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "memrouter: %s\n", e.what());
        return 1;
    }
    return 0;
}
