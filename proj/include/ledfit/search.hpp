#pragma once

// Multi-start iterative improvement with fixed (then morphing) neighbourhood
// (IF), uniform random restarts over the discrete parameter grids, and the
// experiment configurations combining either with Newton post-processing.
//
// Comparisons use E rather than RMS; both order candidates identically and
// E avoids the square root. Ties are not accepted as improvements.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "ledfit/model.hpp"
#include "ledfit/newton.hpp"
#include "ledfit/rng.hpp"

namespace ledfit {

/// Uniform draw over the discrete search grids:
/// a on {0, 0.001, ..., 1}, b on {-90, -89.9, ..., 90}, c on {0, 1, ..., 100}.
inline ModelParams random_params(Rng& rng) {
    ModelParams p;
    for (int k = 0; k < kTerms; ++k) {
        p.a[k] = static_cast<double>(rng.next_index(1001)) * 0.001;
        p.b[k] = (static_cast<double>(rng.next_index(1801)) - 900.0) * 0.1;
        p.c[k] = static_cast<double>(rng.next_index(101));
    }
    return p;
}

// Initial neighbourhood steps. da and db follow the published walk; the
// exponent step keeps the same 1%-of-range resolution (a candela-scaled
// step applied to a dimensionless exponent loses to plain random sampling
// at equal budget).
struct StepSizes {
    double da = 0.01;
    double db = 1.0;
    double dc = 1.0;
};

inline double clamp_component(int i, double v) {
    const double lo = i < 3 ? 0.0 : (i < 6 ? -90.0 : 0.0);
    const double hi = i < 3 ? 1.0 : (i < 6 ? 90.0 : 100.0);
    return v < lo ? lo : (v > hi ? hi : v);
}

/// Apply one of the 512 sign choices (+/- per component), clamped to the
/// canonical ranges. Bit j of `signs` selects + for component j.
inline ModelParams if_neighbor(const ModelParams& p, const StepSizes& d, std::uint32_t signs) {
    ModelParams q = p;
    for (int i = 0; i < kParamCount; ++i) {
        const double step = i < 3 ? d.da : (i < 6 ? d.db : d.dc);
        const double dir = (signs >> i) & 1u ? 1.0 : -1.0;
        q.set_component(i, clamp_component(i, p.component(i) + dir * step));
    }
    return q;
}

/// All 512 neighbours; duplicates possible at range corners.
inline std::vector<ModelParams> if_neighbors(const ModelParams& p, const StepSizes& d) {
    std::vector<ModelParams> out;
    out.reserve(512);
    for (std::uint32_t bits = 0; bits < 512; ++bits) out.push_back(if_neighbor(p, d, bits));
    return out;
}

struct IFOptions {
    long long steps_per_start = 100000;  // evaluation budget for one start
    StepSizes initial_steps{};           // da0 = 0.01, db0 = 1 degree, dc0 = 10
    int trials_before_morph = 1000;
    int morph_limit = 10;                // morphs before the step base is refined
    double refine_factor = 0.9;
};

struct SearchResult {
    ModelParams params;
    double e = 0.0;
    long long evaluations = 0;
    long long accepted_moves = 0;
};

/// First-improvement random-neighbour walk. After trials_before_morph
/// consecutive failures the step grows by its base value; after morph_limit
/// growths the base is multiplied by refine_factor and the schedule resets.
/// Stops when the evaluation budget is exhausted; the current point is the
/// best visited because only strict improvements are accepted.
inline SearchResult if_search(const ModelParams& p0, const IntensitySamples& s, const IFOptions& opts,
                              Rng& rng) {
    SearchResult res;
    res.params = p0;
    res.e = eval_e(p0, s);
    res.evaluations = 1;

    StepSizes base = opts.initial_steps;
    StepSizes step = base;
    int morph_level = 0;
    int fails = 0;

    while (res.evaluations < opts.steps_per_start) {
        const auto signs = static_cast<std::uint32_t>(rng.next_u64() & 0x1FFu);
        const ModelParams q = if_neighbor(res.params, step, signs);
        const double eq = eval_e(q, s);
        ++res.evaluations;
        if (eq < res.e) {
            res.params = q;
            res.e = eq;
            ++res.accepted_moves;
            fails = 0;
            continue;
        }
        if (++fails >= opts.trials_before_morph) {
            fails = 0;
            if (morph_level < opts.morph_limit) {
                step.da += base.da;
                step.db += base.db;
                step.dc += base.dc;
                ++morph_level;
            } else {
                base.da *= opts.refine_factor;
                base.db *= opts.refine_factor;
                base.dc *= opts.refine_factor;
                step = base;
                morph_level = 0;
            }
        }
    }
    return res;
}

/// Keep the pool_size best (by E) candidates seen, deterministically:
/// on ties the earlier insertion wins.
class CandidatePool {
  public:
    explicit CandidatePool(std::size_t capacity = 100) : capacity_(capacity) {}

    void offer(const ModelParams& p, double e) {
        const Entry entry{e, counter_++, p};
        if (entries_.size() < capacity_) {
            entries_.push_back(entry);
            std::push_heap(entries_.begin(), entries_.end(), worse);
            return;
        }
        if (!entries_.empty() && less(entry, entries_.front())) {
            std::pop_heap(entries_.begin(), entries_.end(), worse);
            entries_.back() = entry;
            std::push_heap(entries_.begin(), entries_.end(), worse);
        }
    }

    /// Entries sorted ascending by (e, insertion order).
    std::vector<std::pair<ModelParams, double>> sorted() const {
        std::vector<Entry> tmp = entries_;
        std::sort(tmp.begin(), tmp.end(), less);
        std::vector<std::pair<ModelParams, double>> out;
        out.reserve(tmp.size());
        for (const Entry& en : tmp) out.emplace_back(en.params, en.e);
        return out;
    }

    std::size_t size() const { return entries_.size(); }

  private:
    struct Entry {
        double e;
        std::uint64_t order;
        ModelParams params;
    };
    static bool less(const Entry& x, const Entry& y) {
        return x.e != y.e ? x.e < y.e : x.order < y.order;
    }
    static bool worse(const Entry& x, const Entry& y) { return less(x, y); }  // max-heap on less

    std::size_t capacity_;
    std::uint64_t counter_ = 0;
    std::vector<Entry> entries_;
};

enum class AlgorithmKind {
    RandomNewton,  // uniform random initial solutions, Newton on the best pool
    IfNewton,      // multi-start IF, Newton on each start's result
};

struct AlgorithmConfig {
    std::string name;
    AlgorithmKind kind = AlgorithmKind::RandomNewton;
    long long total_budget = 1000000;  // model evaluations for the search stage
    int starts = 1;                    // IF only
    std::size_t pool_size = 100;       // RandomNewton only
    NewtonOptions newton;
    IFOptions if_options;
};

/// The ten experiment configurations: short runs spend one million
/// evaluations, long runs four million, split across IF starts where
/// applicable. `budget_scale` shrinks every budget for desk-scale runs.
inline std::vector<AlgorithmConfig> table1_configs(double budget_scale = 1.0) {
    struct Row {
        const char* name;
        AlgorithmKind kind;
        long long budget;
        int starts;
    };
    static const Row rows[] = {
        {"S-Newton", AlgorithmKind::RandomNewton, 1000000, 1},
        {"IF10", AlgorithmKind::IfNewton, 1000000, 10},
        {"IF20", AlgorithmKind::IfNewton, 1000000, 20},
        {"IF50", AlgorithmKind::IfNewton, 1000000, 50},
        {"IF100", AlgorithmKind::IfNewton, 1000000, 100},
        {"L-Newton", AlgorithmKind::RandomNewton, 4000000, 1},
        {"IF40", AlgorithmKind::IfNewton, 4000000, 40},
        {"IF80", AlgorithmKind::IfNewton, 4000000, 80},
        {"IF200", AlgorithmKind::IfNewton, 4000000, 200},
        {"IF400", AlgorithmKind::IfNewton, 4000000, 400},
    };
    std::vector<AlgorithmConfig> configs;
    for (const Row& r : rows) {
        AlgorithmConfig cfg;
        cfg.name = r.name;
        cfg.kind = r.kind;
        cfg.total_budget = std::max<long long>(1, static_cast<long long>(r.budget * budget_scale));
        cfg.starts = r.starts;
        configs.push_back(cfg);
    }
    return configs;
}

struct ConfigRunResult {
    FitResult best;
    long long evaluations = 0;
    long long newton_candidates = 0;
    long long newton_converged = 0;
    long long newton_iterations_total = 0;      // over all polished candidates
    long long newton_iterations_converged = 0;  // over candidates that converged
};

/// Run one Table-1 configuration on one instance. Deterministic for a given
/// seed: per-start streams are derived from (seed, start index), and best
/// selection breaks ties by candidate order.
inline ConfigRunResult run_config(const AlgorithmConfig& cfg, const IntensitySamples& s,
                                  std::uint64_t seed) {
    ConfigRunResult out;
    bool have_best = false;

    auto consider = [&](const FitResult& fit) {
        out.newton_candidates += 1;
        out.newton_iterations_total += fit.iterations;
        if (fit.termination == Termination::Converged) {
            out.newton_converged += 1;
            out.newton_iterations_converged += fit.iterations;
        }
        if (!have_best || fit.e < out.best.e) {
            out.best = fit;
            have_best = true;
        }
    };

    if (cfg.kind == AlgorithmKind::RandomNewton) {
        Rng rng(derive_seed(seed, 0));
        CandidatePool pool(cfg.pool_size);
        for (long long i = 0; i < cfg.total_budget; ++i) {
            const ModelParams p = random_params(rng);
            pool.offer(p, eval_e(p, s));
        }
        out.evaluations = cfg.total_budget;
        for (const auto& [params, e] : pool.sorted()) consider(newton_optimize(params, s, cfg.newton));
    } else {
        const long long per_start = std::max<long long>(1, cfg.total_budget / cfg.starts);
        for (int start = 0; start < cfg.starts; ++start) {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(start) + 1));
            const ModelParams p0 = random_params(rng);
            IFOptions ifo = cfg.if_options;
            ifo.steps_per_start = per_start;
            const SearchResult sr = if_search(p0, s, ifo, rng);
            out.evaluations += sr.evaluations;
            consider(newton_optimize(sr.params, s, cfg.newton));
        }
    }
    return out;
}

}  // namespace ledfit
