#ifndef POLYXTAL_RUNNER_HPP
#define POLYXTAL_RUNNER_HPP

#include "polyxtal/polycrystal.hpp"
#include "polyxtal/projection.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace polyxtal {

/// Declarative experiment description. Desk-scale defaults; reference-scale
/// grids are reachable by overriding L/Lc/samples.
struct ExperimentConfig {
    int d = 2;
    int L = 30;
    int Lc = 10;
    int samples = 200;
    int bins = 100;  // K
    std::uint64_t seed = 0;
    Complex sigma1{1.0, 0.0};
    Complex sigma2{1.0, 0.0};
    int e0_axis = 2;  // mirrors the reference setup: E0 along the y-axis
    int j = 1;
    int k = 1;
    bool rho_star = false;
    int threads = 1;
    std::set<std::string> outputs;  // spectral_function | measure_atoms | effective_tensor | fields | oracle_compare
    std::string out_dir = "out";
    std::string proj_cache;  // optional directory holding (d,L)-keyed projector caches

    /// Throws ConfigError naming the offending field.
    void validate() const;
    LatticeSpec lattice() const { return LatticeSpec::make(d, L, Lc); }
    ContrastParams contrast() const { return ContrastParams::make(sigma1, sigma2); }

    std::string to_json() const;
    static ExperimentConfig from_json(const std::string& text);
    static ExperimentConfig from_file(const std::string& path);
};

/// Builds the projections for the config's lattice, round-tripping through
/// the (d,L)-keyed binary cache when one is configured.
ProjectionSet get_projections(const ExperimentConfig& config);

struct OracleReport {
    struct Row {
        int sample_id;
        double sigma11_rel;      // |sigma*_11 spectral - direct| / |direct|
        double sigma_max_rel;    // worst entry of the tensor, scaled by its max norm
        double e_rel;            // field errors in relative max norm
        double j_rel;
    };
    std::vector<Row> rows;
    double max_sigma11_rel = 0.0;
    double mean_sigma11_rel = 0.0;
    double max_sigma_rel = 0.0;
    double max_e_rel = 0.0;
    double max_j_rel = 0.0;

    std::string to_json(const ExperimentConfig& config) const;
    std::string to_table() const;
};

/// Spectral path vs direct solve, sample by sample.
OracleReport compare_against_oracle(const ExperimentConfig& config);

struct RunResult {
    int exit_code = 0;  // 0 ok, 4 if any sample was quarantined
    std::vector<std::string> artifacts;
    std::vector<std::pair<int, std::string>> quarantined;  // (sample_id, reason)
};

/// Executes the configured pipeline and writes the requested artifacts.
/// Deterministic and idempotent for a fixed config.
RunResult run(const ExperimentConfig& config);

} // namespace polyxtal

#endif
