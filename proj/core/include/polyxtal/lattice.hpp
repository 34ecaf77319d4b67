#ifndef POLYXTAL_LATTICE_HPP
#define POLYXTAL_LATTICE_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <complex>

namespace polyxtal {

/// Periodic d-dimensional lattice with L sites per axis, tiled by cubic
/// crystallites of edge Lc. Scalar fields have length N1 = L^d, vector
/// fields length N = d*N1 in component-major layout: the full component-1
/// block first, then component 2, etc.
struct LatticeSpec {
    int d = 2;
    int L = 1;
    int Lc = 1;

    long n1() const { long v = 1; for (int i = 0; i < d; ++i) v *= L; return v; }
    long n() const { return d * n1(); }
    long n2() const { return n() - n1(); }
    int crystallites_per_axis() const { return L / Lc; }
    long crystallite_count() const {
        long v = 1;
        for (int i = 0; i < d; ++i) v *= crystallites_per_axis();
        return v;
    }

    /// Validates d in {1,2,3}, L >= 1, Lc >= 1 and Lc | L.
    static LatticeSpec make(int d, int L, int Lc);

    bool operator==(const LatticeSpec&) const = default;
};

/// Row-major flattening of site coordinates (last axis fastest).
long flat_site(const LatticeSpec& spec, const std::array<int, 3>& coords);
std::array<int, 3> site_coords(const LatticeSpec& spec, long flat);

/// Component-major index of (site, component); component is 1-based.
long site_index(const LatticeSpec& spec, const std::array<int, 3>& coords, int component);

/// Crystallite owning a site (row-major over the crystallite grid).
long crystallite_of_site(const LatticeSpec& spec, long flat);

enum class OperatorKind { PartialDifference, Gradient, Divergence, Curl };

/// Sparse finite-difference operator on the periodic lattice. Entries are
/// exact +/-1; floating point only enters downstream at SVD/eig time.
struct DiscreteOperator {
    OperatorKind kind;
    int axis = 0;  // 1-based, PartialDifference only
    Eigen::SparseMatrix<double> mat;

    long rows() const { return mat.rows(); }
    long cols() const { return mat.cols(); }
    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(mat); }
};

/// Forward difference along `axis` (1-based) with periodic wrap; N1 x N1.
DiscreteOperator build_partial(const LatticeSpec& spec, int axis);

/// Vertical stack [C_1; ...; C_d]; N x N1. The divergence is -gradient^T
/// and is not stored separately.
DiscreteOperator build_gradient(const LatticeSpec& spec);

/// 2D: [-C_2, C_1] (N1 x N). 3D: the antisymmetric block matrix (N x N).
DiscreteOperator build_curl(const LatticeSpec& spec);

/// -grad^T v, the discrete divergence of a vector field.
Eigen::VectorXd divergence_apply(const DiscreteOperator& gradient, const Eigen::VectorXd& v);
Eigen::VectorXcd divergence_apply(const DiscreteOperator& gradient, const Eigen::VectorXcd& v);

} // namespace polyxtal

#endif
