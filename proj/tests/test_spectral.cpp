#include "polyxtal/errors.hpp"
#include "polyxtal/linalg.hpp"
#include "polyxtal/rng.hpp"
#include "polyxtal/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace polyxtal;

namespace {

// Independent oracle: moments of the measure from the *full* N x N
// eigenproblem of X1 P X1, built from dense products only.
std::vector<double> full_matrix_moments(const IndicatorMatrices& ind, const Eigen::MatrixXd& proj,
                                        bool first, int j, int k, int n_max) {
    const long n1 = ind.spec().n1();
    const long n = ind.spec().n();
    const Eigen::MatrixXd x = first ? ind.dense_X1()
                                    : (Eigen::MatrixXd::Identity(n, n) - ind.dense_X1()).eval();
    const Eigen::MatrixXd m = x * proj * x;
    const auto es = eig_sym(((m + m.transpose()) / 2.0).eval());

    Eigen::VectorXd ej = Eigen::VectorXd::Zero(n);
    ej.segment((j - 1) * n1, n1).setOnes();
    Eigen::VectorXd ek = Eigen::VectorXd::Zero(n);
    ek.segment((k - 1) * n1, n1).setOnes();
    const Eigen::VectorXd pj = es.vectors.transpose() * (x * ej);
    const Eigen::VectorXd pk = es.vectors.transpose() * (x * ek);

    std::vector<double> mu(n_max + 1, 0.0);
    for (long i = 0; i < n; ++i) {
        const double w = pj[i] * pk[i] / static_cast<double>(n1);
        double pw = 1.0;
        for (int q = 0; q <= n_max; ++q) {
            mu[q] += pw * w;
            pw *= es.values[i];
        }
    }
    return mu;
}

// Matrix-power oracle for moments of the reduced block, no eig involved.
double power_moment(const Eigen::MatrixXd& block, const Eigen::VectorXd& ej,
                    const Eigen::VectorXd& ek, int n, long n1) {
    Eigen::VectorXd v = ej;
    for (int q = 0; q < n; ++q) v = (block * v).eval();
    return v.dot(ek) / static_cast<double>(n1);
}

} // namespace

TEST_CASE("identity rotation reduces to Gamma's component-one block") {
    const auto spec = LatticeSpec::make(2, 3, 3);
    const auto P = build_projections(spec);
    OrientationField aligned{spec, 0, 0, 1, {0.0}, {}};
    const auto ind = realize_indicators(aligned);
    const auto block = reduced_block(ind, P, BlockKind::X1Gamma);
    CHECK((block - P.gamma.topLeftCorner(spec.n1(), spec.n1())).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("reduced block eigenvalues live in [0,1]") {
    const auto spec = LatticeSpec::make(2, 3, 1);
    const auto P = build_projections(spec);
    const auto ind = realize_indicators(sample_orientations(spec, 8, 1));
    for (auto which : {BlockKind::X1Gamma, BlockKind::X2Gamma, BlockKind::X1Upsilon,
                       BlockKind::X2Upsilon}) {
        const auto eig = eig_block(reduced_block(ind, P, which), which);
        CHECK(eig.lambdas.minCoeff() >= 0.0);
        CHECK(eig.lambdas.maxCoeff() <= 1.0);
        // eigenvector orthonormality
        const Eigen::MatrixXd gram = eig.W1.transpose() * eig.W1;
        CHECK((gram - Eigen::MatrixXd::Identity(eig.block_size, eig.block_size))
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
    }
}

TEST_CASE("eig_block basics") {
    Eigen::MatrixXd b(2, 2);
    b << 0.2, 0.0, 0.0, 0.7;
    const auto eig = eig_block(b, BlockKind::X1Gamma);
    CHECK(eig.lambdas[0] == doctest::Approx(0.2));
    CHECK(eig.lambdas[1] == doctest::Approx(0.7));
    CHECK(eig.W1.cwiseAbs().isApprox(Eigen::Matrix2d::Identity(), 1e-12));

    Eigen::MatrixXd bad(2, 2);
    bad << 0.2, 0.5, -0.5, 0.7;
    CHECK_THROWS_AS(eig_block(bad, BlockKind::X1Gamma), ArgumentError);
    Eigen::MatrixXd outside(1, 1);
    outside << 1.5;
    CHECK_THROWS_AS(eig_block(outside, BlockKind::X1Gamma), NumericalError);
}

TEST_CASE("eig_block reconstructs its input") {
    const auto spec = LatticeSpec::make(2, 4, 2);
    const auto P = build_projections(spec);
    const auto ind = realize_indicators(sample_orientations(spec, 3, 0));
    const auto block = reduced_block(ind, P, BlockKind::X1Gamma);
    const auto eig = eig_block(block, BlockKind::X1Gamma);
    const Eigen::MatrixXd rebuilt =
        eig.W1 * eig.lambdas.asDiagonal() * eig.W1.transpose();
    CHECK((rebuilt - block).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("measure atoms for the aligned single crystal") {
    const auto spec = LatticeSpec::make(2, 3, 3);
    const auto P = build_projections(spec);
    OrientationField aligned{spec, 0, 0, 1, {0.0}, {}};
    const auto ind = realize_indicators(aligned);
    const auto eig = eig_block(reduced_block(ind, P, BlockKind::X1Gamma), BlockKind::X1Gamma);

    const auto m11 = measure_atoms(eig, ind, 1, 1);
    CHECK(m11.mass() == doctest::Approx(1.0).epsilon(1e-12));

    const auto m22 = measure_atoms(eig, ind, 2, 2);
    for (const auto& a : m22.atoms) CHECK(std::abs(a.weight) < 1e-24);
}

TEST_CASE("sum rule: diagonal mass equals the volume-averaged X1 entry") {
    const auto spec = LatticeSpec::make(2, 4, 2);
    const auto P = build_projections(spec);
    const auto field = sample_orientations(spec, 45, 2);
    const auto ind = realize_indicators(field);
    const auto eig = eig_block(reduced_block(ind, P, BlockKind::X1Gamma), BlockKind::X1Gamma);
    const auto m = measure_atoms(eig, ind, 1, 1);

    // direct from the angles
    double expect = 0.0;
    for (long p = 0; p < spec.n1(); ++p) {
        const double th = field.angles[crystallite_of_site(spec, p)];
        expect += std::cos(th) * std::cos(th);
    }
    expect /= static_cast<double>(spec.n1());
    CHECK(m.mass() == doctest::Approx(expect).epsilon(1e-10));
    CHECK(m.mass() == doctest::Approx(ind.x1_mean(1, 1)).epsilon(1e-10));

    // diagonal weights are nonnegative
    for (const auto& a : m.atoms) CHECK(a.weight >= -1e-15);
}

TEST_CASE("cross measures are symmetric in (j,k)") {
    const auto spec = LatticeSpec::make(2, 3, 1);
    const auto P = build_projections(spec);
    const auto ind = realize_indicators(sample_orientations(spec, 5, 5));
    const auto eig = eig_block(reduced_block(ind, P, BlockKind::X1Gamma), BlockKind::X1Gamma);
    const auto m12 = measure_atoms(eig, ind, 1, 2);
    const auto m21 = measure_atoms(eig, ind, 2, 1);
    REQUIRE(m12.atoms.size() == m21.atoms.size());
    for (std::size_t i = 0; i < m12.atoms.size(); ++i) {
        CHECK(m12.atoms[i].lambda == m21.atoms[i].lambda);
        CHECK(m12.atoms[i].weight == doctest::Approx(m21.atoms[i].weight).epsilon(1e-12));
    }
    CHECK(m12.mass() == doctest::Approx(ind.x1_mean(1, 2)).epsilon(1e-10));
}

TEST_CASE("moments: mass, matrix-power oracle, monotonicity") {
    const auto spec = LatticeSpec::make(2, 4, 2);
    const auto P = build_projections(spec);
    const auto ind = realize_indicators(sample_orientations(spec, 9, 4));
    const auto block = reduced_block(ind, P, BlockKind::X1Gamma);
    const auto eig = eig_block(block, BlockKind::X1Gamma);
    const auto m = measure_atoms(eig, ind, 1, 1);
    const auto mu = moments(m, 6);

    CHECK(mu[0] == doctest::Approx(m.mass()).epsilon(1e-12));

    const Eigen::VectorXd e1r = rotated_basis_block(ind, 1, BlockKind::X1Gamma);
    for (int n = 0; n <= 6; ++n)
        CHECK(mu[n] == doctest::Approx(power_moment(block, e1r, e1r, n, spec.n1())).epsilon(1e-10));

    for (int n = 0; n < 6; ++n) CHECK(mu[n + 1] <= mu[n] + 1e-12);
}

TEST_CASE("projection method equals the full-matrix measure through moments") {
    struct Case { LatticeSpec spec; BlockKind which; };
    for (const auto& c : {Case{LatticeSpec::make(2, 5, 1), BlockKind::X1Gamma},
                          Case{LatticeSpec::make(2, 5, 1), BlockKind::X2Upsilon},
                          Case{LatticeSpec::make(3, 3, 1), BlockKind::X1Gamma},
                          Case{LatticeSpec::make(3, 3, 1), BlockKind::X1Upsilon}}) {
        const auto P = build_projections(c.spec);
        const auto ind = realize_indicators(sample_orientations(c.spec, 31, 0));
        const auto eig = eig_block(reduced_block(ind, P, c.which), c.which);
        const bool first = is_first_block(c.which);
        const bool gamma = (c.which == BlockKind::X1Gamma || c.which == BlockKind::X2Gamma);
        for (int j = 1; j <= c.spec.d; ++j)
            for (int k = j; k <= c.spec.d; ++k) {
                const auto mu_reduced = moments(measure_atoms(eig, ind, j, k), 10);
                const auto mu_full = full_matrix_moments(
                    ind, gamma ? P.gamma : P.upsilon, first, j, k, 10);
                for (int n = 0; n <= 10; ++n)
                    CHECK(std::abs(mu_reduced[n] - mu_full[n]) < 1e-10);
            }
    }
}

TEST_CASE("discarded block carries no mass") {
    const auto spec = LatticeSpec::make(2, 3, 1);
    const auto ind = realize_indicators(sample_orientations(spec, 6, 6));
    // vectors of the form R^T [0; z] are annihilated by X1
    Eigen::VectorXcd embedded = Eigen::VectorXcd::Zero(spec.n());
    CounterRng rng(1, 2, 3);
    for (long i = spec.n1(); i < spec.n(); ++i) embedded[i] = rng.next_unit();
    const Eigen::VectorXcd w = ind.apply_RT(embedded);
    CHECK(ind.apply_X1(w).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("binning conventions") {
    SpectralMeasure m;
    m.atoms = {{0.0, 0.25}, {0.499999, 0.25}, {0.5, 0.25}, {1.0, 0.25}};
    std::vector<double> bins(2, 0.0);
    bin_measure(m, 2, bins);
    CHECK(bins[0] == doctest::Approx(0.5));   // [0, 0.5)
    CHECK(bins[1] == doctest::Approx(0.5));   // [0.5, 1] — last bin closed
}

TEST_CASE("single realization, one bin swallows the whole mass") {
    const auto spec = LatticeSpec::make(2, 3, 1);
    const auto P = build_projections(spec);
    EnsembleParams params{spec, 1, 1, 12, BlockKind::X1Gamma, 1, 1, 1};
    const auto fn = ensemble_spectral_function(params, P);
    const auto ind = realize_indicators(sample_orientations(spec, 12, 0));
    CHECK(fn.total_mass() == doctest::Approx(ind.x1_mean(1, 1)).epsilon(1e-12));
}

TEST_CASE("ensemble spectral function is bitwise thread-invariant") {
    const auto spec = LatticeSpec::make(2, 4, 2);
    const auto P = build_projections(spec);
    EnsembleParams one{spec, 12, 10, 99, BlockKind::X1Gamma, 1, 1, 1};
    EnsembleParams three = one;
    three.threads = 3;
    const auto fn1 = ensemble_spectral_function(one, P);
    const auto fn3 = ensemble_spectral_function(three, P);
    REQUIRE(fn1.mass.size() == fn3.mass.size());
    for (std::size_t b = 0; b < fn1.mass.size(); ++b) CHECK(fn1.mass[b] == fn3.mass[b]);

    // bin masses sum to the ensemble-average measure mass
    double mean_mass = 0.0;
    for (int i = 0; i < 12; ++i)
        mean_mass += realize_indicators(sample_orientations(spec, 99, i)).x1_mean(1, 1);
    mean_mass /= 12.0;
    CHECK(fn1.total_mass() == doctest::Approx(mean_mass).epsilon(1e-10));
}
