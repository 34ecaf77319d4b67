#include "polyxtal/errors.hpp"
#include "polyxtal/lattice.hpp"
#include "polyxtal/rng.hpp"

#include <doctest.h>

#include <Eigen/Dense>

using namespace polyxtal;

namespace {

Eigen::MatrixXd dense(const Eigen::SparseMatrix<double>& m) { return Eigen::MatrixXd(m); }

// Kronecker product I_d (x) M
Eigen::MatrixXd kron_identity(int d, const Eigen::MatrixXd& m) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d * m.rows(), d * m.cols());
    for (int a = 0; a < d; ++a) out.block(a * m.rows(), a * m.cols(), m.rows(), m.cols()) = m;
    return out;
}

Eigen::VectorXd random_vector(long n, std::uint64_t key) {
    CounterRng rng(key, 0, 1);
    Eigen::VectorXd v(n);
    for (long i = 0; i < n; ++i) v[i] = 2.0 * rng.next_unit() - 1.0;
    return v;
}

} // namespace

TEST_CASE("LatticeSpec validation and bookkeeping") {
    auto spec = LatticeSpec::make(2, 6, 3);
    CHECK(spec.n1() == 36);
    CHECK(spec.n() == 72);
    CHECK(spec.n2() == 36);
    CHECK(spec.crystallite_count() == 4);
    CHECK(LatticeSpec::make(3, 4, 2).n2() == 2 * 64);
    CHECK_THROWS_AS(LatticeSpec::make(4, 4, 2), ArgumentError);
    CHECK_THROWS_AS(LatticeSpec::make(2, 5, 2), ArgumentError);
    CHECK_THROWS_AS(LatticeSpec::make(2, 0, 1), ArgumentError);
}

TEST_CASE("forward difference on two sites") {
    const auto spec = LatticeSpec::make(1, 2, 1);
    const auto c1 = build_partial(spec, 1);
    Eigen::MatrixXd expect(2, 2);
    expect << -1, 1, 1, -1;
    CHECK(dense(c1.mat) == expect);
    CHECK_THROWS_AS(build_partial(spec, 2), ArgumentError);
}

TEST_CASE("constants lie in the kernel of every partial") {
    const auto spec = LatticeSpec::make(2, 4, 2);
    for (int axis = 1; axis <= 2; ++axis) {
        const auto c = build_partial(spec, axis);
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(spec.n1());
        CHECK((c.mat * ones).cwiseAbs().maxCoeff() == 0.0);
        // periodic conservation: row and column sums vanish
        CHECK((c.mat.transpose() * ones).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("partials commute exactly") {
    const auto spec = LatticeSpec::make(2, 3, 1);
    const auto c1 = dense(build_partial(spec, 1).mat);
    const auto c2 = dense(build_partial(spec, 2).mat);
    CHECK((c1 * c2 - c2 * c1).cwiseAbs().maxCoeff() == 0.0);
    CHECK((c1.transpose() * c2 - c2 * c1.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gradient shape and kernel") {
    const auto spec = LatticeSpec::make(2, 2, 1);
    const auto grad = build_gradient(spec);
    CHECK(grad.rows() == 8);
    CHECK(grad.cols() == 4);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(4);
    CHECK((grad.mat * ones).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("periodic gradient rank is N1 - 1") {
    const auto spec = LatticeSpec::make(2, 3, 1);
    const auto grad = build_gradient(spec);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(grad.dense());
    long rank = 0;
    for (long i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > 1e-10 * svd.singularValues()[0]) ++rank;
    CHECK(rank == spec.n1() - 1);
}

TEST_CASE("curl identities, 2D") {
    const auto spec = LatticeSpec::make(2, 3, 1);
    const auto grad = dense(build_gradient(spec).mat);
    const auto curl = dense(build_curl(spec).mat);
    CHECK(curl.rows() == spec.n1());
    CHECK(curl.cols() == spec.n());
    CHECK((curl * grad).cwiseAbs().maxCoeff() == 0.0);
    CHECK((-grad.transpose() * curl.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("curl identities, 3D") {
    const auto spec = LatticeSpec::make(3, 2, 1);
    const auto grad = dense(build_gradient(spec).mat);
    const auto curl = dense(build_curl(spec).mat);
    CHECK(curl.rows() == spec.n());
    CHECK((curl * grad).cwiseAbs().maxCoeff() == 0.0);
    CHECK((-grad.transpose() * curl.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("curl requires d in {2,3}") {
    CHECK_THROWS_AS(build_curl(LatticeSpec::make(1, 4, 1)), ArgumentError);
}

TEST_CASE("the operator identity list holds in exact arithmetic") {
    for (const auto& spec : {LatticeSpec::make(2, 3, 1), LatticeSpec::make(3, 2, 1)}) {
        const auto grad = dense(build_gradient(spec).mat);
        const auto curl = dense(build_curl(spec).mat);
        const Eigen::MatrixXd scalar_lap = grad.transpose() * grad;  // -Delta
        const Eigen::MatrixXd vector_lap = kron_identity(spec.d, scalar_lap);

        // curl-curl complement: C^T C = -grad grad^T + I_d (x) (grad^T grad)
        CHECK((curl.transpose() * curl - (vector_lap - grad * grad.transpose()))
                  .cwiseAbs()
                  .maxCoeff() == 0.0);

        // scalar Laplacian is the standard 2d+1-point periodic stencil
        Eigen::VectorXd delta = Eigen::VectorXd::Zero(spec.n1());
        delta[0] = 1.0;
        const Eigen::VectorXd lap_delta = -(scalar_lap * delta);
        CHECK(lap_delta[0] == -2.0 * spec.d);
        CHECK(lap_delta.sum() == 0.0);
    }
}

TEST_CASE("component-major site indexing") {
    const auto spec2 = LatticeSpec::make(2, 2, 1);
    CHECK(site_index(spec2, {0, 0, 0}, 1) == 0);
    CHECK(site_index(spec2, {0, 0, 0}, 2) == 4);
    CHECK_THROWS_AS(site_index(spec2, {0, 0, 0}, 3), ArgumentError);
    CHECK_THROWS_AS(site_index(spec2, {2, 0, 0}, 1), ArgumentError);

    // bijectivity: every (coords, component) hits its own index in [0, N)
    const auto spec3 = LatticeSpec::make(3, 2, 1);
    std::vector<bool> seen(spec3.n(), false);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int z = 0; z < 2; ++z)
                for (int comp = 1; comp <= 3; ++comp) {
                    const long idx = site_index(spec3, {x, y, z}, comp);
                    REQUIRE(idx >= 0);
                    REQUIRE(idx < spec3.n());
                    CHECK(!seen[idx]);
                    seen[idx] = true;
                    // round trip through the site part
                    const auto c = site_coords(spec3, idx % spec3.n1());
                    CHECK(c[0] == x);
                    CHECK(c[1] == y);
                    CHECK(c[2] == z);
                }
}

TEST_CASE("gradient output has zero volume average per component block") {
    const auto spec = LatticeSpec::make(2, 4, 2);
    const auto grad = build_gradient(spec);
    const Eigen::VectorXd phi = random_vector(spec.n1(), 7);
    const Eigen::VectorXd g = grad.mat * phi;
    for (int a = 0; a < spec.d; ++a)
        CHECK(std::abs(g.segment(a * spec.n1(), spec.n1()).sum()) < 1e-12);
}

TEST_CASE("divergence_apply is -grad^T") {
    const auto spec = LatticeSpec::make(2, 3, 1);
    const auto grad = build_gradient(spec);
    const Eigen::VectorXd v = random_vector(spec.n(), 13);
    const Eigen::VectorXd expect = -(grad.dense().transpose() * v);
    CHECK((divergence_apply(grad, v) - expect).cwiseAbs().maxCoeff() < 1e-14);
}
