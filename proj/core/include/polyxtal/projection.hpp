#ifndef POLYXTAL_PROJECTION_HPP
#define POLYXTAL_PROJECTION_HPP

#include "polyxtal/lattice.hpp"

#include <Eigen/Dense>

#include <string>

namespace polyxtal {

inline constexpr double kDefaultZeroTol = 1e-8;

/// Rank-revealing part of an SVD: A = U1 * diag(Sigma1) * V1^T with
/// singular values below zero_tolerance * max classified as zero and dropped.
struct SubspaceSVD {
    Eigen::MatrixXd U1;      // m x rank
    Eigen::VectorXd Sigma1;  // descending, strictly positive
    Eigen::MatrixXd V1;      // n x rank
    long rank = 0;
    double zero_tolerance = kDefaultZeroTol;
};

SubspaceSVD svd_split(const Eigen::MatrixXd& A, double zero_tolerance = kDefaultZeroTol);
SubspaceSVD svd_split(const DiscreteOperator& A, double zero_tolerance = kDefaultZeroTol);

/// The three mutually orthogonal projections on R^N: Gamma onto the range of
/// the gradient, Upsilon onto the range of curl^T, Gamma0 onto the joint
/// complement (the constant fields on the periodic lattice). The SVD factors
/// that built Gamma and Upsilon are kept for potential reconstruction.
struct ProjectionSet {
    LatticeSpec spec;
    Eigen::MatrixXd gamma;
    Eigen::MatrixXd upsilon;
    Eigen::MatrixXd gamma0;
    SubspaceSVD grad_svd;   // of the gradient
    SubspaceSVD curlT_svd;  // of curl^T

    /// Enforces symmetry/idempotency/orthogonality/resolution-of-identity;
    /// throws NumericalError naming the violated invariant.
    void verify(double tol = 1e-10) const;

    void save(const std::string& path) const;
    static ProjectionSet load(const std::string& path);
};

/// Gamma = U1 U1^T from the SVD of the gradient, Upsilon likewise from
/// curl^T, Gamma0 = I - Gamma - Upsilon; all symmetrized after assembly.
ProjectionSet build_projections(const LatticeSpec& spec, double zero_tolerance = kDefaultZeroTol);

/// A (A^T A)^-1 A^T. Cross-check path for full-column-rank matrices only;
/// throws RankDeficientError (with the null dimension) otherwise.
Eigen::MatrixXd full_rank_projector(const Eigen::MatrixXd& A, double zero_tolerance = kDefaultZeroTol);

} // namespace polyxtal

#endif
