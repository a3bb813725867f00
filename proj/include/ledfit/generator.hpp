#pragma once

// Artificial instances with a known zero-error solution: parameters drawn
// uniformly from the finite generator grids (a step .001 on [0,1], b step
// .01 on [0,90], c step .1 on [0,10]), candela computed at whole degrees
// 0..90 and zero above. Because the fitting convention normalizes by the
// data's own maximum candela, the amplitudes recorded as `truth` are the
// grid draws rescaled by (generation scale / max candela); b and c stay on
// the grids. All-dark draws are redrawn.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ledfit/csv.hpp"
#include "ledfit/model.hpp"
#include "ledfit/photometry.hpp"
#include "ledfit/rng.hpp"

namespace ledfit {

struct ArtificialInstance {
    ModelParams grid_truth;   // as drawn from the generator grids
    ModelParams truth;        // zero-error params under the samples' i_max convention
    IntensitySamples samples; // 91 whole-degree samples, i_max = max candela
    double gen_scale = 1000.0;
    std::uint64_t seed = 0;
};

inline ArtificialInstance generate_instance(Rng& rng, double gen_scale = 1000.0) {
    ArtificialInstance inst;
    inst.gen_scale = gen_scale;
    for (;;) {
        for (int k = 0; k < kTerms; ++k) {
            inst.grid_truth.a[k] = static_cast<double>(rng.next_index(1001)) * 0.001;
            inst.grid_truth.b[k] = static_cast<double>(rng.next_index(9001)) * 0.01;
            inst.grid_truth.c[k] = static_cast<double>(rng.next_index(101)) * 0.1;
        }
        inst.samples.phi.resize(91);
        inst.samples.candela.resize(91);
        inst.samples.i_max = 0.0;
        for (int deg = 0; deg <= 90; ++deg) {
            inst.samples.phi[deg] = deg;
            const double v = eval_intensity(inst.grid_truth, deg, gen_scale);
            inst.samples.candela[deg] = v;
            inst.samples.i_max = std::max(inst.samples.i_max, v);
        }
        if (inst.samples.i_max > 0.0) break;  // dark draw, try again
    }
    inst.truth = inst.grid_truth;
    const double rescale = gen_scale / inst.samples.i_max;
    for (int k = 0; k < kTerms; ++k) inst.truth.a[k] *= rescale;
    return inst;
}

inline ArtificialInstance generate_instance_seeded(std::uint64_t seed, double gen_scale = 1000.0) {
    Rng rng(seed);
    ArtificialInstance inst = generate_instance(rng, gen_scale);
    inst.seed = seed;
    return inst;
}

/// n independent instances with per-index seeds derived from master_seed.
inline std::vector<ArtificialInstance> generate_dataset(std::size_t n, std::uint64_t master_seed,
                                                        double gen_scale = 1000.0) {
    std::vector<ArtificialInstance> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(generate_instance_seeded(derive_seed(master_seed, i), gen_scale));
    return out;
}

inline std::string instance_file_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "lens_%04zu.ies", index);
    return buf;
}

/// Write each instance as a .ies file plus a manifest recording the seeds
/// and the zero-error parameters (expressed for the file's own max-candela
/// normalization, i.e. directly usable against the reparsed samples).
inline void write_dataset(const std::filesystem::path& dir,
                          const std::vector<ArtificialInstance>& instances,
                          const WriteOptions& wopts = {}, std::uint64_t master_seed = 0,
                          bool timestamp = false) {
    std::filesystem::create_directories(dir);
    std::ofstream manifest(dir / "manifest.csv");
    if (!manifest) throw std::runtime_error("cannot write manifest in " + dir.string());
    manifest << "# ledfit dataset manifest; master_seed=" << master_seed << "\n";
    manifest << "# a1..c3 are the zero-error parameters under the file's max-candela scale\n";
    (void)timestamp;
    manifest << "index,seed,a1,a2,a3,b1,b2,b3,c1,c2,c3,i_max,file\n";
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const ArtificialInstance& inst = instances[i];
        const std::string name = instance_file_name(i);
        std::ofstream ies(dir / name);
        if (!ies) throw std::runtime_error("cannot write " + (dir / name).string());
        ies << write_ies(inst.samples, wopts);
        manifest << i << ',' << inst.seed;
        for (int k = 0; k < kTerms; ++k) manifest << ',' << csv::format_double(inst.truth.a[k]);
        for (int k = 0; k < kTerms; ++k) manifest << ',' << csv::format_double(inst.truth.b[k]);
        for (int k = 0; k < kTerms; ++k) manifest << ',' << csv::format_double(inst.truth.c[k]);
        manifest << ',' << csv::format_double(inst.gen_scale) << ',' << name << "\n";
    }
}

}  // namespace ledfit
