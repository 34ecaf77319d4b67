#include "polyxtal/errors.hpp"
#include "polyxtal/transport.hpp"

#include <doctest.h>

#include <cmath>

using namespace polyxtal;

namespace {

const ContrastParams kReferenceContrast = ContrastParams::make({51.0741, 45.1602}, {3.07, 0.0019});

struct Realization {
    IndicatorMatrices ind;
    BlockEig gamma_eig;
    MeasureSet gamma_measures;
};

Realization make_realization(const LatticeSpec& spec, const ProjectionSet& P, std::uint64_t seed,
                             int sample) {
    auto ind = realize_indicators(sample_orientations(spec, seed, sample));
    auto eig = eig_block(reduced_block(ind, P, BlockKind::X1Gamma), BlockKind::X1Gamma);
    auto measures = MeasureSet::build(eig, ind);
    return {std::move(ind), std::move(eig), std::move(measures)};
}

} // namespace

TEST_CASE("stieltjes_eval on hand-built measures") {
    SpectralMeasure m;
    m.atoms = {{0.0, 1.0}};
    CHECK(stieltjes_eval(m, {2.0, 0.0}) == Complex(0.5, 0.0));

    SpectralMeasure empty;
    empty.atoms = {};
    CHECK(stieltjes_eval(empty, {3.0, 1.0}) == Complex(0.0, 0.0));

    SpectralMeasure zero_mass;
    zero_mass.atoms = {{0.3, 0.0}, {0.9, 0.0}};
    CHECK(std::abs(stieltjes_eval(zero_mass, {-1.0, 0.0})) == 0.0);

    CHECK_THROWS_AS(stieltjes_eval(m, {0.5, 0.0}), PoleProximityError);
    try {
        SpectralMeasure two;
        two.atoms = {{0.2, 0.5}, {0.8, 0.5}};
        stieltjes_eval(two, {0.7, 0.0});
    } catch (const PoleProximityError& e) {
        CHECK(e.nearest_lambda == doctest::Approx(0.8));
    }
}

TEST_CASE("F equals the dense resolvent solve") {
    const auto spec = LatticeSpec::make(2, 4, 2);
    const auto P = build_projections(spec);
    const auto r = make_realization(spec, P, 14, 0);
    const Complex s = kReferenceContrast.s();

    const Eigen::MatrixXd x1 = r.ind.dense_X1();
    const Eigen::MatrixXcd m = (x1 * P.gamma * x1).cast<Complex>();
    const Eigen::MatrixXcd lhs =
        s * Eigen::MatrixXcd::Identity(spec.n(), spec.n()) - m;
    for (int j = 1; j <= 2; ++j)
        for (int k = j; k <= 2; ++k) {
            Eigen::VectorXd ej = Eigen::VectorXd::Zero(spec.n());
            ej.segment((j - 1) * spec.n1(), spec.n1()).setOnes();
            Eigen::VectorXd ek = Eigen::VectorXd::Zero(spec.n());
            ek.segment((k - 1) * spec.n1(), spec.n1()).setOnes();
            const Eigen::VectorXcd solved = lhs.partialPivLu().solve((x1 * ej).cast<Complex>());
            // unconjugated bilinear form, volume averaged
            const Complex direct = (solved.array() * (x1 * ek).cast<Complex>().array()).sum() /
                                   static_cast<double>(spec.n1());
            const Complex via_measure = stieltjes_eval(r.gamma_measures.at(j, k), s);
            CHECK(std::abs(direct - via_measure) < 1e-10 * std::max(1.0, std::abs(direct)));
        }
}

TEST_CASE("homogeneous contrast bypasses s") {
    MeasureSet dummy(2);
    const auto cp = ContrastParams::make({3.0, -2.0}, {3.0, -2.0});
    const auto sigma = effective_conductivity(dummy, cp);
    CHECK(sigma.m(0, 0) == Complex(3.0, -2.0));
    CHECK(sigma.m(1, 1) == Complex(3.0, -2.0));
    CHECK(sigma.m(0, 1) == Complex(0.0, 0.0));
    const auto rho = effective_resistivity(dummy, cp, ResistivityPairing::X2UpsilonAtS);
    CHECK(std::abs(rho.m(0, 0) - Complex(1.0, 0.0) / Complex(3.0, -2.0)) < 1e-15);
}

TEST_CASE("aligned single crystal reproduces the component values") {
    const auto spec = LatticeSpec::make(2, 3, 3);
    const auto P = build_projections(spec);
    OrientationField aligned{spec, 0, 0, 1, {0.0}, {}};
    const auto ind = realize_indicators(aligned);

    const auto eig = eig_block(reduced_block(ind, P, BlockKind::X1Gamma), BlockKind::X1Gamma);
    const auto sigma = effective_conductivity(MeasureSet::build(eig, ind), kReferenceContrast);
    CHECK(std::abs(sigma.m(0, 0) - kReferenceContrast.sigma1) < 1e-10 * std::abs(kReferenceContrast.sigma1));
    CHECK(std::abs(sigma.m(1, 1) - kReferenceContrast.sigma2) < 1e-10 * std::abs(kReferenceContrast.sigma2));
    CHECK(std::abs(sigma.m(0, 1)) < 1e-12);

    // (1,1) measure is a single atom at lambda = 0 with full mass
    const auto m11 = measure_atoms(eig, ind, 1, 1);
    double mass_at_zero = 0.0;
    for (const auto& a : m11.atoms)
        if (a.lambda < 1e-12) mass_at_zero += a.weight;
    CHECK(mass_at_zero == doctest::Approx(1.0).epsilon(1e-10));

    const auto ups2 = eig_block(reduced_block(ind, P, BlockKind::X2Upsilon), BlockKind::X2Upsilon);
    const auto rho = effective_resistivity(MeasureSet::build(ups2, ind), kReferenceContrast,
                                           ResistivityPairing::X2UpsilonAtS);
    CHECK(std::abs(rho.m(0, 0) - 1.0 / kReferenceContrast.sigma1) <
          1e-10 * std::abs(1.0 / kReferenceContrast.sigma1));
    CHECK(std::abs(rho.m(1, 1) - 1.0 / kReferenceContrast.sigma2) <
          1e-10 * std::abs(1.0 / kReferenceContrast.sigma2));
}

TEST_CASE("resistivity inverts conductivity per realization, both pairings") {
    for (const auto& spec : {LatticeSpec::make(2, 4, 2), LatticeSpec::make(3, 2, 1)}) {
        const auto P = build_projections(spec);
        const auto ind = realize_indicators(sample_orientations(spec, 23, 1));
        const auto geig = eig_block(reduced_block(ind, P, BlockKind::X1Gamma), BlockKind::X1Gamma);
        const auto sigma = effective_conductivity(MeasureSet::build(geig, ind), kReferenceContrast);

        const auto u2 = eig_block(reduced_block(ind, P, BlockKind::X2Upsilon), BlockKind::X2Upsilon);
        const auto rho2 = effective_resistivity(MeasureSet::build(u2, ind), kReferenceContrast,
                                                ResistivityPairing::X2UpsilonAtS);
        const auto u1 = eig_block(reduced_block(ind, P, BlockKind::X1Upsilon), BlockKind::X1Upsilon);
        const auto rho1 = effective_resistivity(MeasureSet::build(u1, ind), kReferenceContrast,
                                                ResistivityPairing::X1UpsilonAtT);

        const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(spec.d, spec.d);
        CHECK((rho2.m * sigma.m - id).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((rho1.m * sigma.m - id).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((rho1.m - rho2.m).cwiseAbs().maxCoeff() < 1e-8 * rho2.m.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("effective tensor is symmetric and measures are reusable across s") {
    const auto spec = LatticeSpec::make(2, 4, 2);
    const auto P = build_projections(spec);
    const auto r = make_realization(spec, P, 60, 3);

    const auto sigma = effective_conductivity(r.gamma_measures, kReferenceContrast);
    CHECK(std::abs(sigma.m(0, 1) - sigma.m(1, 0)) < 1e-10 * sigma.m.cwiseAbs().maxCoeff());

    // same measures, different contrast: no re-eig needed by construction
    const auto cp2 = ContrastParams::make({10.0, 0.0}, {1.0, 0.0});
    const auto sigma2 = effective_conductivity(r.gamma_measures, cp2);
    CHECK(sigma2.m(0, 0) != sigma.m(0, 0));
    // real positive contrasts give a real positive diagonal
    CHECK(std::abs(sigma2.m(0, 0).imag()) < 1e-12);
    CHECK(sigma2.m(0, 0).real() > 1.0);
    CHECK(sigma2.m(0, 0).real() < 10.0);
}

TEST_CASE("Herglotz sign structure of diagonal measures") {
    const auto spec = LatticeSpec::make(2, 4, 2);
    const auto P = build_projections(spec);
    const auto r = make_realization(spec, P, 71, 2);
    const auto& m = r.gamma_measures.at(1, 1);
    REQUIRE(m.mass() > 0.0);
    // Im F(s) = -Im(s) * sum w/|s-l|^2, so the signs oppose for w >= 0
    for (const Complex s : {Complex(0.5, 0.3), Complex(-0.2, 1.0), Complex(1.3, -0.7),
                            Complex(0.1, -2.0)}) {
        const Complex f = stieltjes_eval(m, s);
        CHECK(std::signbit(f.imag()) != std::signbit(s.imag()));
    }
}
