// polyxtal: spectral-measure pipeline for uniaxial polycrystalline media.
//
//   polyxtal run            --config cfg.json [overrides]
//   polyxtal compare-oracle --config cfg.json [overrides]
//
// Flag overrides win over the config file; see --help for the list.

#include "polyxtal/errors.hpp"
#include "polyxtal/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>

namespace {

struct Overrides {
    std::string config_path;
    int dim = -1, grid = -1, crystal = -1, samples = -1, bins = -1, e0_axis = -1;
    int j = -1, k = -1, threads = -1;
    long long seed = -1;
    double sigma1_re = 0, sigma1_im = 0, sigma2_re = 0, sigma2_im = 0;
    bool has_s1re = false, has_s1im = false, has_s2re = false, has_s2im = false;
    bool rho_star = false;
    std::vector<std::string> outputs;
    std::string out_dir;
    std::string proj_cache;
};

void add_common_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--config", ov.config_path, "JSON config file");
    cmd->add_option("--dim", ov.dim, "spatial dimension (2 or 3)");
    cmd->add_option("--grid", ov.grid, "sites per axis L");
    cmd->add_option("--crystal", ov.crystal, "crystallite edge Lc (must divide L)");
    cmd->add_option("--samples", ov.samples, "number of geometric configurations");
    cmd->add_option("--seed", ov.seed, "ensemble seed");
    cmd->add_option("--bins", ov.bins, "spectral-function bins K");
    cmd->add_option("--sigma1-re", ov.sigma1_re)->each([&](const std::string&) { ov.has_s1re = true; });
    cmd->add_option("--sigma1-im", ov.sigma1_im)->each([&](const std::string&) { ov.has_s1im = true; });
    cmd->add_option("--sigma2-re", ov.sigma2_re)->each([&](const std::string&) { ov.has_s2re = true; });
    cmd->add_option("--sigma2-im", ov.sigma2_im)->each([&](const std::string&) { ov.has_s2im = true; });
    cmd->add_option("--e0-axis", ov.e0_axis, "applied-field axis (1-based)");
    cmd->add_option("--j", ov.j, "measure row index");
    cmd->add_option("--k", ov.k, "measure column index");
    cmd->add_option("--threads", ov.threads, "worker threads across samples");
    cmd->add_option("--outputs", ov.outputs,
                    "spectral_function|measure_atoms|effective_tensor|fields|oracle_compare");
    cmd->add_option("--out", ov.out_dir, "output directory");
    cmd->add_option("--proj-cache", ov.proj_cache, "directory for (d,L)-keyed projector caches");
    cmd->add_flag("--rho-star", ov.rho_star, "also average the resistivity tensor");
}

polyxtal::ExperimentConfig make_config(const Overrides& ov) {
    polyxtal::ExperimentConfig c;
    if (!ov.config_path.empty()) c = polyxtal::ExperimentConfig::from_file(ov.config_path);
    if (ov.dim > 0) c.d = ov.dim;
    if (ov.grid > 0) c.L = ov.grid;
    if (ov.crystal > 0) c.Lc = ov.crystal;
    if (ov.samples > 0) c.samples = ov.samples;
    if (ov.bins > 0) c.bins = ov.bins;
    if (ov.seed >= 0) c.seed = static_cast<std::uint64_t>(ov.seed);
    if (ov.has_s1re) c.sigma1.real(ov.sigma1_re);
    if (ov.has_s1im) c.sigma1.imag(ov.sigma1_im);
    if (ov.has_s2re) c.sigma2.real(ov.sigma2_re);
    if (ov.has_s2im) c.sigma2.imag(ov.sigma2_im);
    if (ov.e0_axis > 0) c.e0_axis = ov.e0_axis;
    if (ov.j > 0) c.j = ov.j;
    if (ov.k > 0) c.k = ov.k;
    if (ov.threads > 0) c.threads = ov.threads;
    if (!ov.outputs.empty()) c.outputs = {ov.outputs.begin(), ov.outputs.end()};
    if (!ov.out_dir.empty()) c.out_dir = ov.out_dir;
    if (!ov.proj_cache.empty()) c.proj_cache = ov.proj_cache;
    if (ov.rho_star) c.rho_star = true;
    return c;
}

} // namespace

int main(int argc, char** argv) {
    // the worker pool owns the parallelism; keep BLAS single-threaded so
    // results do not depend on its internal scheduling
    setenv("OPENBLAS_NUM_THREADS", "1", 0);
    setenv("OMP_NUM_THREADS", "1", 0);

    CLI::App app{"Spectral measures and effective transport for uniaxial polycrystals"};
    app.require_subcommand(1);

    Overrides run_ov, cmp_ov;
    CLI::App* run_cmd = app.add_subcommand("run", "execute the configured pipeline");
    add_common_flags(run_cmd, run_ov);
    CLI::App* cmp_cmd =
        app.add_subcommand("compare-oracle", "spectral path vs direct solver, per sample");
    add_common_flags(cmp_cmd, cmp_ov);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            auto config = make_config(run_ov);
            if (config.outputs.empty()) config.outputs = {"spectral_function"};
            const auto result = polyxtal::run(config);
            for (const auto& a : result.artifacts) std::printf("wrote %s\n", a.c_str());
            for (const auto& [id, why] : result.quarantined)
                std::fprintf(stderr, "quarantined sample %d: %s\n", id, why.c_str());
            return result.exit_code;
        }
        if (cmp_cmd->parsed()) {
            auto config = make_config(cmp_ov);
            if (config.outputs.empty()) config.outputs = {"oracle_compare"};
            const auto report = polyxtal::compare_against_oracle(config);
            std::printf("%s", report.to_table().c_str());
            return 0;
        }
    } catch (const polyxtal::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
