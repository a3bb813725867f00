#pragma once

// Experiment runner: one RunRecord per (configuration, instance) cell.
// Cells are distributed over a worker pool; each cell's RNG stream is
// derived from (master seed, config index, instance index), so results are
// identical for any thread count. Wall time is recorded per cell but kept
// out of the default CSV so reruns are byte-identical.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "ledfit/csv.hpp"
#include "ledfit/model.hpp"
#include "ledfit/search.hpp"

namespace ledfit {

struct RunRecord {
    std::string config_name;
    std::string instance_id;
    double best_rmsp = 0.0;
    ModelParams best_params;
    long long evaluations = 0;
    long long newton_iterations = 0;  // total over polished candidates
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;
};

struct NamedInstance {
    std::string id;
    IntensitySamples samples;
};

inline unsigned default_thread_count() {
    if (const char* env = std::getenv("LEDFIT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/// Run every configuration on every instance. Records come back ordered by
/// (config index, instance index) regardless of scheduling.
inline std::vector<RunRecord> run_suite(const std::vector<AlgorithmConfig>& configs,
                                        const std::vector<NamedInstance>& instances,
                                        std::uint64_t master_seed, unsigned threads = 0) {
    if (threads == 0) threads = default_thread_count();
    const std::size_t cells = configs.size() * instances.size();
    std::vector<RunRecord> records(cells);
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const std::size_t cell = next.fetch_add(1);
            if (cell >= cells) return;
            const std::size_t ci = cell / instances.size();
            const std::size_t ii = cell % instances.size();
            const std::uint64_t cell_seed =
                derive_seed(master_seed, (static_cast<std::uint64_t>(ci) << 32) | ii);

            const auto t0 = std::chrono::steady_clock::now();
            const ConfigRunResult result = run_config(configs[ci], instances[ii].samples, cell_seed);
            const auto t1 = std::chrono::steady_clock::now();

            RunRecord& rec = records[cell];
            rec.config_name = configs[ci].name;
            rec.instance_id = instances[ii].id;
            rec.best_rmsp = result.best.rmsp;
            rec.best_params = result.best.params;
            rec.evaluations = result.evaluations;
            rec.newton_iterations = result.newton_iterations_total;
            rec.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
            rec.seed = cell_seed;
        }
    };

    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return records;
}

struct RecordWriteOptions {
    bool timestamp = false;      // suppressed by default: reruns stay byte-identical
    bool timing = false;         // include the hardware-dependent wall_seconds column
    std::string version = "1";
    std::string command;
    std::uint64_t seed = 0;
};

inline void write_records(std::ostream& out, const std::vector<RunRecord>& records,
                          const RecordWriteOptions& opts) {
    out << "# ledfit results version=" << opts.version << " seed=" << opts.seed;
    if (!opts.command.empty()) out << " config=\"" << opts.command << '"';
    out << "\n";
    if (opts.timestamp) {
        const std::time_t now = std::time(nullptr);
        char buf[64];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        out << "# generated " << buf << "\n";
    }
    out << "config,instance,best_rmsp,a1,a2,a3,b1,b2,b3,c1,c2,c3,evaluations,newton_iterations,seed";
    if (opts.timing) out << ",wall_seconds";
    out << "\n";
    for (const RunRecord& r : records) {
        out << r.config_name << ',' << r.instance_id << ',' << csv::format_double(r.best_rmsp);
        for (int k = 0; k < kTerms; ++k) out << ',' << csv::format_double(r.best_params.a[k]);
        for (int k = 0; k < kTerms; ++k) out << ',' << csv::format_double(r.best_params.b[k]);
        for (int k = 0; k < kTerms; ++k) out << ',' << csv::format_double(r.best_params.c[k]);
        out << ',' << r.evaluations << ',' << r.newton_iterations << ',' << r.seed;
        if (opts.timing) out << ',' << csv::format_double(r.wall_seconds);
        out << "\n";
    }
}

inline std::vector<RunRecord> read_records(const csv::Table& table) {
    std::vector<RunRecord> records;
    const int c_config = table.column("config");
    const int c_instance = table.column("instance");
    const int c_rmsp = table.column("best_rmsp");
    for (const auto& row : table.rows) {
        RunRecord r;
        r.config_name = row[c_config];
        r.instance_id = row[c_instance];
        r.best_rmsp = csv::parse_double(row[c_rmsp]);
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace ledfit
