#include "polyxtal/lattice.hpp"

#include "polyxtal/errors.hpp"

#include <string>
#include <vector>

namespace polyxtal {

LatticeSpec LatticeSpec::make(int d, int L, int Lc) {
    if (d < 1 || d > 3)
        throw ArgumentError("LatticeSpec: d must be 1, 2 or 3, got " + std::to_string(d));
    if (L < 1)
        throw ArgumentError("LatticeSpec: L must be positive, got " + std::to_string(L));
    if (Lc < 1 || L % Lc != 0)
        throw ArgumentError("LatticeSpec: Lc must divide L, got L=" + std::to_string(L) +
                            " Lc=" + std::to_string(Lc));
    return LatticeSpec{d, L, Lc};
}

long flat_site(const LatticeSpec& spec, const std::array<int, 3>& coords) {
    long idx = 0;
    for (int a = 0; a < spec.d; ++a) {
        if (coords[a] < 0 || coords[a] >= spec.L)
            throw ArgumentError("flat_site: coordinate " + std::to_string(coords[a]) +
                                " out of [0," + std::to_string(spec.L) + ") on axis " +
                                std::to_string(a + 1));
        idx = idx * spec.L + coords[a];
    }
    return idx;
}

std::array<int, 3> site_coords(const LatticeSpec& spec, long flat) {
    if (flat < 0 || flat >= spec.n1())
        throw ArgumentError("site_coords: flat index out of range");
    std::array<int, 3> c{0, 0, 0};
    for (int a = spec.d - 1; a >= 0; --a) {
        c[a] = static_cast<int>(flat % spec.L);
        flat /= spec.L;
    }
    return c;
}

long site_index(const LatticeSpec& spec, const std::array<int, 3>& coords, int component) {
    if (component < 1 || component > spec.d)
        throw ArgumentError("site_index: component " + std::to_string(component) +
                            " out of [1," + std::to_string(spec.d) + "]");
    return (component - 1) * spec.n1() + flat_site(spec, coords);
}

long crystallite_of_site(const LatticeSpec& spec, long flat) {
    const auto c = site_coords(spec, flat);
    long idx = 0;
    for (int a = 0; a < spec.d; ++a) idx = idx * spec.crystallites_per_axis() + c[a] / spec.Lc;
    return idx;
}

namespace {

/// Flat index of the site one step along `axis0` (0-based), periodic.
long shifted_site(const LatticeSpec& spec, long flat, int axis0) {
    auto c = site_coords(spec, flat);
    c[axis0] = (c[axis0] + 1) % spec.L;
    return flat_site(spec, c);
}

} // namespace

DiscreteOperator build_partial(const LatticeSpec& spec, int axis) {
    if (axis < 1 || axis > spec.d)
        throw ArgumentError("build_partial: axis " + std::to_string(axis) + " out of [1," +
                            std::to_string(spec.d) + "]");
    const long n1 = spec.n1();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(2 * n1);
    for (long p = 0; p < n1; ++p) {
        trips.emplace_back(p, p, -1.0);
        trips.emplace_back(p, shifted_site(spec, p, axis - 1), 1.0);
    }
    DiscreteOperator op{OperatorKind::PartialDifference, axis, {}};
    op.mat.resize(n1, n1);
    op.mat.setFromTriplets(trips.begin(), trips.end());  // L=1 wraps to the diagonal and cancels
    return op;
}

namespace {

void copy_block(std::vector<Eigen::Triplet<double>>& trips, const Eigen::SparseMatrix<double>& m,
                long row0, long col0, double scale) {
    for (int k = 0; k < m.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
            if (it.value() != 0.0) trips.emplace_back(row0 + it.row(), col0 + it.col(), scale * it.value());
}

} // namespace

DiscreteOperator build_gradient(const LatticeSpec& spec) {
    const long n1 = spec.n1();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(2 * spec.n());
    for (int a = 1; a <= spec.d; ++a)
        copy_block(trips, build_partial(spec, a).mat, (a - 1) * n1, 0, 1.0);
    DiscreteOperator op{OperatorKind::Gradient, 0, {}};
    op.mat.resize(spec.n(), n1);
    op.mat.setFromTriplets(trips.begin(), trips.end());
    return op;
}

DiscreteOperator build_curl(const LatticeSpec& spec) {
    if (spec.d != 2 && spec.d != 3)
        throw ArgumentError("build_curl: curl is defined for d in {2,3}, got d=" +
                            std::to_string(spec.d));
    const long n1 = spec.n1();
    std::vector<Eigen::Triplet<double>> trips;
    DiscreteOperator op{OperatorKind::Curl, 0, {}};
    if (spec.d == 2) {
        // C = [-C2, C1], one block row
        copy_block(trips, build_partial(spec, 2).mat, 0, 0, -1.0);
        copy_block(trips, build_partial(spec, 1).mat, 0, n1, 1.0);
        op.mat.resize(n1, 2 * n1);
    } else {
        const auto c1 = build_partial(spec, 1).mat;
        const auto c2 = build_partial(spec, 2).mat;
        const auto c3 = build_partial(spec, 3).mat;
        copy_block(trips, c3, 0 * n1, 1 * n1, -1.0);
        copy_block(trips, c2, 0 * n1, 2 * n1, 1.0);
        copy_block(trips, c3, 1 * n1, 0 * n1, 1.0);
        copy_block(trips, c1, 1 * n1, 2 * n1, -1.0);
        copy_block(trips, c2, 2 * n1, 0 * n1, -1.0);
        copy_block(trips, c1, 2 * n1, 1 * n1, 1.0);
        op.mat.resize(3 * n1, 3 * n1);
    }
    op.mat.setFromTriplets(trips.begin(), trips.end());
    return op;
}

Eigen::VectorXd divergence_apply(const DiscreteOperator& gradient, const Eigen::VectorXd& v) {
    if (gradient.kind != OperatorKind::Gradient)
        throw ArgumentError("divergence_apply: operator is not a gradient");
    if (v.size() != gradient.rows())
        throw ArgumentError("divergence_apply: vector length mismatch");
    return -(gradient.mat.transpose() * v);
}

Eigen::VectorXcd divergence_apply(const DiscreteOperator& gradient, const Eigen::VectorXcd& v) {
    if (gradient.kind != OperatorKind::Gradient)
        throw ArgumentError("divergence_apply: operator is not a gradient");
    if (v.size() != gradient.rows())
        throw ArgumentError("divergence_apply: vector length mismatch");
    Eigen::VectorXcd out(gradient.cols());
    out.real() = -(gradient.mat.transpose() * v.real().eval());
    out.imag() = -(gradient.mat.transpose() * v.imag().eval());
    return out;
}

} // namespace polyxtal
