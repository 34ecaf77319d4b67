#ifndef POLYXTAL_SPECTRAL_HPP
#define POLYXTAL_SPECTRAL_HPP

#include "polyxtal/lattice.hpp"
#include "polyxtal/polycrystal.hpp"
#include "polyxtal/projection.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace polyxtal {

/// Which projection-composition matrix a reduced block or measure refers to.
/// X1* blocks are the N1 x N1 upper-left principal sub-matrix of R P R^T,
/// X2* blocks the complementary N2 x N2 lower-right one.
enum class BlockKind { X1Gamma, X2Gamma, X1Upsilon, X2Upsilon };

std::string to_string(BlockKind which);
bool is_first_block(BlockKind which);

/// The reduced block of R P R^T in the component-major layout, symmetrized.
Eigen::MatrixXd reduced_block(const IndicatorMatrices& ind, const ProjectionSet& P,
                              BlockKind which);

/// Eigendecomposition of a reduced block. Eigenvalues are ascending,
/// checked to lie in [0,1] within 1e-10 and clamped onto it.
struct BlockEig {
    BlockKind which = BlockKind::X1Gamma;
    Eigen::VectorXd lambdas;
    Eigen::MatrixXd W1;
    long block_size = 0;
};

BlockEig eig_block(const Eigen::MatrixXd& B, BlockKind which);

/// The block of the rotated basis vector R e_j matching `which`:
/// e_j^{r1} (length N1) for X1 blocks, e_j^{r2} (length N2) for X2 blocks.
/// j is 1-based.
Eigen::VectorXd rotated_basis_block(const IndicatorMatrices& ind, int j, BlockKind which);

/// Discrete spectral measure: atoms (lambda_i, w_i) with
/// w_i = (w1_i . e_j^{r})(w1_i . e_k^{r}) / N1. The 1/N1 implements the
/// volume average, so diagonal masses land in [0,1]. Off-diagonal (j != k)
/// measures are signed.
struct SpectralMeasure {
    struct Atom {
        double lambda;
        double weight;
    };
    std::vector<Atom> atoms;
    int j = 1;
    int k = 1;
    BlockKind which = BlockKind::X1Gamma;
    std::string provenance;  // "sample:<id>" or "ensemble"

    double mass() const;

    std::string to_csv() const;  // "lambda,weight" rows
    std::string to_json(const LatticeSpec& spec, std::uint64_t seed, int samples, int bins) const;
};

SpectralMeasure measure_atoms(const BlockEig& eig, const IndicatorMatrices& ind, int j, int k);

/// Moments mu^n = sum_i lambda_i^n w_i for n = 0..n_max.
std::vector<double> moments(const SpectralMeasure& measure, int n_max);

/// Histogram of ensemble-averaged measure mass over K equal bins of [0,1].
/// Bins are half-open [l, r) except the last, which is closed.
struct SpectralFunction {
    int bins = 0;
    std::vector<double> mass;  // ensemble-averaged mass per bin
    long sample_count = 0;

    double total_mass() const;
    std::string to_csv() const;  // "lambda_lo,lambda_hi,mass,density" rows
};

void bin_measure(const SpectralMeasure& measure, int bins, std::vector<double>& accum);

struct EnsembleParams {
    LatticeSpec spec;
    int samples = 1;
    int bins = 100;
    std::uint64_t seed = 0;
    BlockKind which = BlockKind::X1Gamma;
    int j = 1;
    int k = 1;
    int threads = 1;
};

/// Per-sample binning followed by a deterministic ordered fold over
/// sample_id, so the result is bitwise identical for any thread count.
SpectralFunction ensemble_spectral_function(const EnsembleParams& params, const ProjectionSet& P);

} // namespace polyxtal

#endif
