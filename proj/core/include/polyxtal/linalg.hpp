#ifndef POLYXTAL_LINALG_HPP
#define POLYXTAL_LINALG_HPP

#include <Eigen/Dense>

namespace polyxtal {

struct SymEig {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // orthonormal columns
};

/// Full eigendecomposition of a real-symmetric matrix.
/// Backed by LAPACKE dsyevd when available, Eigen otherwise.
SymEig eig_sym(const Eigen::MatrixXd& A);

struct ThinSVD {
    Eigen::MatrixXd U;        // m x min(m,n)
    Eigen::VectorXd S;        // descending
    Eigen::MatrixXd V;        // n x min(m,n)
};

/// Thin SVD of a dense matrix (LAPACKE dgesdd / Eigen BDCSVD).
ThinSVD thin_svd(const Eigen::MatrixXd& A);

/// Power-iteration estimate of the spectral norm, good to a few percent.
double spectral_norm_estimate(const Eigen::MatrixXd& A, int iterations = 12);

} // namespace polyxtal

#endif
