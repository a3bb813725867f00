// Command-line frontend: convert photometric files, fit single lenses, run
// the experiment suite and compute the comparison statistics. Every
// stochastic subcommand takes a --seed and records it in the output header,
// so any result file can be regenerated byte-for-byte.
//
// Exit codes: 0 ok, 1 usage error, 2 input/file error, 3 numerical failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "ledfit/experiment.hpp"
#include "ledfit/generator.hpp"
#include "ledfit/photometry.hpp"
#include "ledfit/stats.hpp"
#include "ledfit/version.hpp"

namespace fs = std::filesystem;
using namespace ledfit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

struct CliError : std::runtime_error {
    CliError(std::string msg, int code) : std::runtime_error(std::move(msg)), exit_code(code) {}
    int exit_code;
};

IntensitySamples load_samples(const std::string& path, int plane, bool average) {
    std::ifstream in(path);
    if (!in) throw CliError("cannot open '" + path + "'", kExitInput);
    try {
        const PhotometricFile file = parse_ies(in);
        return average ? extract_plane_mean(file) : extract_plane(file, plane);
    } catch (const std::exception& err) {
        throw CliError(path + ": " + err.what(), kExitInput);
    }
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw CliError("cannot write '" + path + "'", kExitInput);
    return file;
}

void write_header(std::ostream& out, std::uint64_t seed, const std::string& what, bool timestamp) {
    out << "# ledfit " << LEDFIT_VERSION << " seed=" << seed << " config=\"" << what << "\"\n";
    if (timestamp) {
        const std::time_t now = std::time(nullptr);
        char buf[64];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        out << "# generated " << buf << "\n";
    }
}

int cmd_convert(const std::string& input, const std::string& output, int plane, bool average) {
    const IntensitySamples s = load_samples(input, plane, average);
    std::ofstream file;
    std::ostream& out = open_output(file, output);
    out << "phi_deg,candela\n";
    for (std::size_t i = 0; i < s.size(); ++i)
        out << csv::format_double(s.phi[i]) << ',' << csv::format_double(s.candela[i]) << "\n";
    return kExitOk;
}

int cmd_gen(int count, std::uint64_t seed, const std::string& out_dir, int round_digits) {
    WriteOptions wopts;
    wopts.candela_decimals = round_digits;
    const auto ds = generate_dataset(count, seed);
    write_dataset(out_dir, ds, wopts, seed);
    std::cerr << "wrote " << count << " instances + manifest to " << out_dir << "\n";
    return kExitOk;
}

AlgorithmConfig config_for_method(const std::string& method, long long budget, int starts,
                                  std::size_t pool) {
    AlgorithmConfig cfg;
    cfg.name = method;
    if (method == "s-newton" || method == "l-newton") {
        cfg.kind = AlgorithmKind::RandomNewton;
        cfg.total_budget = budget > 0 ? budget : (method == "s-newton" ? 1000000 : 4000000);
        cfg.pool_size = pool;
    } else if (method == "if" || method == "if+newton") {
        cfg.kind = AlgorithmKind::IfNewton;
        cfg.total_budget = budget > 0 ? budget : 1000000;
        cfg.starts = starts > 0 ? starts : 10;
        if (method == "if") cfg.newton.max_iterations = 0;  // search stage only
    } else {
        throw CliError("unknown method '" + method + "'", kExitUsage);
    }
    return cfg;
}

int cmd_fit(const std::string& input, const std::string& method, const std::string& init,
            long long budget, int starts, std::size_t pool, std::uint64_t seed, int plane,
            bool average, const std::string& output, bool timestamp) {
    const IntensitySamples s = load_samples(input, plane, average);

    FitResult fit;
    long long evaluations = 0;
    if (method == "newton") {
        ModelParams p0;
        if (init == "random" || init.empty()) {
            Rng rng(derive_seed(seed, 0));
            p0 = random_params(rng);
        } else {
            // nine whitespace-separated numbers: a1 a2 a3 b1 b2 b3 c1 c2 c3
            std::ifstream pin(init);
            if (!pin) throw CliError("cannot open start point '" + init + "'", kExitInput);
            for (int i = 0; i < kParamCount; ++i) {
                double v;
                if (!(pin >> v)) throw CliError("start point file needs 9 numbers", kExitInput);
                p0.set_component(i, v);
            }
        }
        fit = newton_optimize(p0, s);
        if (fit.termination == Termination::SingularSystem && fit.iterations == 0)
            throw CliError("newton: singular system at the initial point", kExitNumeric);
    } else {
        const AlgorithmConfig cfg = config_for_method(method, budget, starts, pool);
        const ConfigRunResult run = run_config(cfg, s, seed);
        fit = run.best;
        evaluations = run.evaluations;
    }

    std::ofstream file;
    std::ostream& out = open_output(file, output);
    write_header(out, seed, "fit --method " + method, timestamp);
    out << "instance,method,rmsp,rms,e,a1,a2,a3,b1,b2,b3,c1,c2,c3,iterations,termination,"
           "evaluations,seed\n";
    out << fs::path(input).filename().string() << ',' << method << ','
        << csv::format_double(fit.rmsp) << ',' << csv::format_double(fit.rms) << ','
        << csv::format_double(fit.e);
    for (int k = 0; k < kTerms; ++k) out << ',' << csv::format_double(fit.params.a[k]);
    for (int k = 0; k < kTerms; ++k) out << ',' << csv::format_double(fit.params.b[k]);
    for (int k = 0; k < kTerms; ++k) out << ',' << csv::format_double(fit.params.c[k]);
    out << ',' << fit.iterations << ',' << to_string(fit.termination) << ',' << evaluations << ','
        << seed << "\n";
    return kExitOk;
}

std::vector<NamedInstance> load_dataset_dir(const std::string& dir, int plane, bool average) {
    std::vector<NamedInstance> instances;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".ies") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files)
        instances.push_back({f.filename().string(), load_samples(f.string(), plane, average)});
    if (instances.empty()) throw CliError("no .ies files in '" + dir + "'", kExitInput);
    return instances;
}

int cmd_experiment(const std::string& dataset_dir, std::uint64_t seed, const std::string& output,
                   double budget_scale, unsigned threads, bool timestamp, bool timing) {
    const auto instances = load_dataset_dir(dataset_dir, 0, false);
    const auto configs = table1_configs(budget_scale);
    const auto records = run_suite(configs, instances, seed, threads);

    std::ofstream file;
    std::ostream& out = open_output(file, output);
    RecordWriteOptions opts;
    opts.seed = seed;
    opts.version = LEDFIT_VERSION;
    std::ostringstream cmd;
    cmd << "experiment --configs table1 --budget-scale " << budget_scale;
    opts.command = cmd.str();
    opts.timestamp = timestamp;
    opts.timing = timing;
    write_records(out, records, opts);
    return kExitOk;
}

std::map<std::string, std::map<std::string, std::vector<double>>> group_records(
    const std::vector<RunRecord>& records) {
    // config -> instance -> rmsp values
    std::map<std::string, std::map<std::string, std::vector<double>>> grouped;
    for (const auto& r : records) grouped[r.config_name][r.instance_id].push_back(r.best_rmsp);
    return grouped;
}

int cmd_stats(const std::string& input, const std::string& report, const std::string& before_path,
              const std::string& after_path, const std::string& output) {
    std::ofstream file;
    std::ostream& out = open_output(file, output);

    if (report == "improvement") {
        if (before_path.empty() || after_path.empty())
            throw CliError("--report improvement needs --before and --after", kExitUsage);
        auto read_column = [](const std::string& path) {
            const auto table = csv::read_table_file(path);
            const int c_inst = table.column("instance");
            const int c_val = table.column("rmsp");
            std::vector<std::pair<std::string, double>> rows;
            for (const auto& row : table.rows)
                rows.emplace_back(row[c_inst], csv::parse_double(row[c_val]));
            return rows;
        };
        const auto before = read_column(before_path);
        const auto after = read_column(after_path);
        if (before.size() != after.size())
            throw CliError("before/after row counts differ", kExitInput);
        std::vector<double> b, a;
        for (std::size_t i = 0; i < before.size(); ++i) {
            if (before[i].first != after[i].first)
                throw CliError("before/after instances differ at row " + std::to_string(i),
                               kExitInput);
            b.push_back(before[i].second);
            a.push_back(after[i].second);
        }
        const auto delta = improvement_report(b, a);
        out << "instance,before,after,delta_percent\n";
        for (std::size_t i = 0; i < delta.size(); ++i)
            out << before[i].first << ',' << csv::format_double(b[i], 6) << ','
                << csv::format_double(a[i], 6) << ',' << csv::format_double(delta[i], 2) << "\n";
        return kExitOk;
    }

    if (input.empty()) throw CliError("--in is required for this report", kExitUsage);
    const auto records = read_records(csv::read_table_file(input));
    if (records.empty()) throw CliError("no records in '" + input + "'", kExitInput);
    const auto grouped = group_records(records);

    if (report == "summary") {
        out << "config,mean,std_dev,min,max,instances\n";
        for (const auto& [config, per_instance] : grouped) {
            std::vector<double> values;
            for (const auto& [id, v] : per_instance)
                values.insert(values.end(), v.begin(), v.end());
            const SummaryStats s = summary_stats(values);
            out << config << ',' << csv::format_double(s.mean) << ','
                << csv::format_double(s.std_dev) << ',' << csv::format_double(s.min) << ','
                << csv::format_double(s.max) << ',' << per_instance.size() << "\n";
        }
        return kExitOk;
    }
    if (report == "rank") {
        std::vector<std::string> algorithms;
        std::set<std::string> instance_ids;
        for (const auto& [config, per_instance] : grouped) {
            algorithms.push_back(config);
            for (const auto& [id, v] : per_instance) instance_ids.insert(id);
        }
        std::vector<std::vector<std::vector<double>>> values(algorithms.size());
        for (std::size_t a = 0; a < algorithms.size(); ++a) {
            const auto& per_instance = grouped.at(algorithms[a]);
            for (const auto& id : instance_ids) {
                const auto it = per_instance.find(id);
                if (it == per_instance.end())
                    throw CliError("config " + algorithms[a] + " missing instance " + id,
                                   kExitInput);
                values[a].push_back(it->second);
            }
        }
        const RankTable table = weighted_ranking(algorithms, values);
        out << "algorithm,score_best,score_mean\n";
        for (std::size_t a = 0; a < algorithms.size(); ++a)
            out << algorithms[a] << ',' << csv::format_double(table.best_scores[a]) << ','
                << csv::format_double(table.mean_scores[a]) << "\n";
        return kExitOk;
    }
    if (report == "wilcoxon") {
        // pairwise tests over configs, on per-instance best rmsp
        std::vector<std::string> algorithms;
        for (const auto& [config, per_instance] : grouped) algorithms.push_back(config);
        out << "config_a,config_b,n_effective,w_statistic,asymptotic_p\n";
        for (std::size_t i = 0; i < algorithms.size(); ++i) {
            for (std::size_t j = i + 1; j < algorithms.size(); ++j) {
                const auto& pa = grouped.at(algorithms[i]);
                const auto& pb = grouped.at(algorithms[j]);
                std::vector<double> x, y;
                for (const auto& [id, va] : pa) {
                    const auto it = pb.find(id);
                    if (it == pb.end()) continue;
                    x.push_back(*std::min_element(va.begin(), va.end()));
                    y.push_back(*std::min_element(it->second.begin(), it->second.end()));
                }
                try {
                    const WilcoxonResult r = wilcoxon_signed_rank(x, y);
                    out << algorithms[i] << ',' << algorithms[j] << ',' << r.n_effective << ','
                        << csv::format_double(r.w_statistic) << ','
                        << csv::format_double(r.asymptotic_p) << "\n";
                } catch (const std::domain_error&) {
                    out << algorithms[i] << ',' << algorithms[j] << ",0,0,\n";
                }
            }
        }
        return kExitOk;
    }
    throw CliError("unknown report '" + report + "'", kExitUsage);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LED spatial light distribution fitting toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", LEDFIT_VERSION);

    // convert
    auto* convert = app.add_subcommand("convert", "photometric file to phi/candela CSV");
    std::string cv_input, cv_output;
    int cv_plane = 0;
    bool cv_average = false;
    convert->add_option("input", cv_input, "input .ies file")->required();
    convert->add_option("-o,--out", cv_output, "output CSV (default stdout)");
    convert->add_option("--plane", cv_plane, "C-plane index (default 0)");
    convert->add_flag("--average", cv_average, "average all C-planes");

    // fit
    auto* fit = app.add_subcommand("fit", "fit the three-term model to one lens");
    std::string f_input, f_method = "s-newton", f_init, f_output;
    long long f_budget = 0;
    int f_starts = 0, f_plane = 0;
    std::size_t f_pool = 100;
    std::uint64_t f_seed = 1;
    bool f_average = false, f_timestamp = false;
    fit->add_option("input", f_input, "input .ies file")->required();
    fit->add_option("--method", f_method, "newton|if|if+newton|s-newton|l-newton");
    fit->add_option("--init", f_init, "newton start: 'random' or a 9-number file");
    fit->add_option("--budget", f_budget, "evaluation budget (method default otherwise)");
    fit->add_option("--starts", f_starts, "IF multi-start count");
    fit->add_option("--pool", f_pool, "random-method Newton pool size");
    fit->add_option("--seed", f_seed, "RNG seed (recorded in output)");
    fit->add_option("--plane", f_plane, "C-plane index");
    fit->add_flag("--average", f_average, "average all C-planes");
    fit->add_option("-o,--out", f_output, "output CSV (default stdout)");
    fit->add_flag("--timestamp", f_timestamp, "include a timestamp header line");

    // gen
    auto* gen = app.add_subcommand("gen", "generate artificial instances");
    int g_count = 100, g_round = -1;
    std::uint64_t g_seed = 1;
    std::string g_out;
    gen->add_option("--count", g_count, "number of instances");
    gen->add_option("--seed", g_seed, "master seed");
    gen->add_option("--out", g_out, "output directory")->required();
    gen->add_option("--round-digits", g_round,
                    "candela decimal places (default: full precision)");

    // experiment
    auto* exp = app.add_subcommand("experiment", "run the ten-configuration comparison");
    std::string e_dataset, e_output, e_configs = "table1";
    std::uint64_t e_seed = 1;
    double e_scale = 1.0;
    unsigned e_threads = 0;
    bool e_timestamp = false, e_timing = false;
    exp->add_option("--configs", e_configs, "configuration set (table1)");
    exp->add_option("--dataset", e_dataset, "directory of .ies files")->required();
    exp->add_option("--seed", e_seed, "master seed");
    exp->add_option("--out", e_output, "results CSV (default stdout)");
    exp->add_option("--budget-scale", e_scale, "scale all budgets (1 = paper scale)");
    exp->add_option("--threads", e_threads, "worker threads (default: LEDFIT_THREADS or cores)");
    exp->add_flag("--timestamp", e_timestamp, "include a timestamp header line");
    exp->add_flag("--timing", e_timing, "include wall_seconds column");

    // stats
    auto* st = app.add_subcommand("stats", "reports over a results CSV");
    std::string s_input, s_report = "summary", s_before, s_after, s_output;
    st->add_option("--in", s_input, "results CSV from 'experiment'");
    st->add_option("--report", s_report, "summary|rank|wilcoxon|improvement");
    st->add_option("--before", s_before, "fit CSV before post-processing (improvement)");
    st->add_option("--after", s_after, "fit CSV after post-processing (improvement)");
    st->add_option("--out", s_output, "output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (convert->parsed()) return cmd_convert(cv_input, cv_output, cv_plane, cv_average);
        if (fit->parsed())
            return cmd_fit(f_input, f_method, f_init, f_budget, f_starts, f_pool, f_seed, f_plane,
                           f_average, f_output, f_timestamp);
        if (gen->parsed()) return cmd_gen(g_count, g_seed, g_out, g_round);
        if (exp->parsed()) {
            if (e_configs != "table1")
                throw CliError("unknown config set '" + e_configs + "'", kExitUsage);
            return cmd_experiment(e_dataset, e_seed, e_output, e_scale, e_threads, e_timestamp,
                                  e_timing);
        }
        if (st->parsed()) return cmd_stats(s_input, s_report, s_before, s_after, s_output);
    } catch (const CliError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return err.exit_code;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitInput;
    }
    return kExitUsage;
}
