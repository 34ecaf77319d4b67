#include "polyxtal/oracle.hpp"

#include "polyxtal/errors.hpp"
#include "polyxtal/lattice.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <string>
#include <vector>

namespace polyxtal {

DirectSolution solve_direct(const IndicatorMatrices& ind, const ContrastParams& cp, int k,
                            Complex e0_mag) {
    const auto& spec = ind.spec();
    const int d = spec.d;
    const long n1 = spec.n1();
    if (k < 1 || k > d) throw ArgumentError("solve_direct: k out of [1,d]");
    if (cp.sigma1 == Complex(0.0, 0.0) || cp.sigma2 == Complex(0.0, 0.0))
        throw ArgumentError("solve_direct: component conductivities must be nonzero");

    const auto grad = build_gradient(spec);

    // sigma as a complex sparse N x N block-diagonal (per site d x d)
    using SpMatC = Eigen::SparseMatrix<Complex>;
    SpMatC sigma(spec.n(), spec.n());
    {
        std::vector<Eigen::Triplet<Complex>> trips;
        trips.reserve(n1 * d * d);
        for (long p = 0; p < n1; ++p)
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) {
                    const double x1 = ind.x1_entry(p, a, b);
                    const Complex v = cp.sigma1 * x1 + cp.sigma2 * ((a == b ? 1.0 : 0.0) - x1);
                    if (v != Complex(0.0, 0.0)) trips.emplace_back(a * n1 + p, b * n1 + p, v);
                }
        sigma.setFromTriplets(trips.begin(), trips.end());
    }

    const SpMatC gradc = grad.mat.cast<Complex>();
    const SpMatC A = gradc.transpose() * sigma * gradc;  // N1 x N1, kernel = constants

    const FieldGrid e0_field = constant_field(spec, FieldLabel::E0, k, e0_mag);
    const Eigen::VectorXcd rhs = -(gradc.transpose() * (sigma * e0_field.values));

    // deflate the constant null vector with a Lagrange multiplier row/column
    SpMatC aug(n1 + 1, n1 + 1);
    {
        std::vector<Eigen::Triplet<Complex>> trips;
        trips.reserve(A.nonZeros() + 2 * n1);
        for (int c = 0; c < A.outerSize(); ++c)
            for (SpMatC::InnerIterator it(A, c); it; ++it)
                trips.emplace_back(it.row(), it.col(), it.value());
        for (long p = 0; p < n1; ++p) {
            trips.emplace_back(n1, p, Complex(1.0, 0.0));
            trips.emplace_back(p, n1, Complex(1.0, 0.0));
        }
        aug.setFromTriplets(trips.begin(), trips.end());
    }
    Eigen::VectorXcd rhs_aug(n1 + 1);
    rhs_aug.head(n1) = rhs;
    rhs_aug[n1] = Complex(0.0, 0.0);

    Eigen::SparseLU<SpMatC> lu;
    lu.compute(aug);
    if (lu.info() != Eigen::Success)
        throw NumericalError(
            "solve_direct: factorization failed (singular beyond the constant kernel?) for d=" +
            std::to_string(d) + " L=" + std::to_string(spec.L));
    const Eigen::VectorXcd sol = lu.solve(rhs_aug);
    if (lu.info() != Eigen::Success) throw NumericalError("solve_direct: back-substitution failed");

    DirectSolution out;
    out.phi = sol.head(n1);
    out.E = FieldGrid{spec, FieldLabel::E, e0_field.values + gradc * out.phi};
    out.J = FieldGrid{spec, FieldLabel::J, sigma * out.E.values};
    out.sigma_star_col = out.J.volume_average() / e0_mag;

    const double denom = rhs.norm();
    out.residual = denom > 0.0 ? (gradc.transpose() * out.J.values).norm() / denom : 0.0;
    if (out.residual > 1e-10)
        throw NumericalError("solve_direct: residual " + std::to_string(out.residual) +
                             " exceeds 1e-10");
    return out;
}

} // namespace polyxtal
