#include "polyxtal/linalg.hpp"

#include "polyxtal/errors.hpp"

#ifdef POLYXTAL_USE_LAPACK
#include <lapacke.h>
#endif

#include <string>

namespace polyxtal {

SymEig eig_sym(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols())
        throw ArgumentError("eig_sym: matrix must be square");
    const auto n = static_cast<int>(A.rows());
    SymEig out;
#ifdef POLYXTAL_USE_LAPACK
    out.vectors = A;
    out.values.resize(n);
    const int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                    out.vectors.data(), n, out.values.data());
    if (info != 0)
        throw NumericalError("dsyevd failed to converge, info=" + std::to_string(info) +
                             ", n=" + std::to_string(n));
#else
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success)
        throw NumericalError("SelfAdjointEigenSolver failed, n=" + std::to_string(n));
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
#endif
    return out;
}

ThinSVD thin_svd(const Eigen::MatrixXd& A) {
    ThinSVD out;
#ifdef POLYXTAL_USE_LAPACK
    const auto m = static_cast<int>(A.rows());
    const auto n = static_cast<int>(A.cols());
    const int k = std::min(m, n);
    Eigen::MatrixXd work = A;
    out.U.resize(m, k);
    out.S.resize(k);
    Eigen::MatrixXd VT(k, n);
    const int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', m, n, work.data(), m,
                                    out.S.data(), out.U.data(), m, VT.data(), k);
    if (info != 0)
        throw NumericalError("dgesdd failed to converge, info=" + std::to_string(info) +
                             ", shape=" + std::to_string(m) + "x" + std::to_string(n));
    out.V = VT.transpose();
#else
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.U = svd.matrixU();
    out.S = svd.singularValues();
    out.V = svd.matrixV();
#endif
    return out;
}

double spectral_norm_estimate(const Eigen::MatrixXd& A, int iterations) {
    if (A.size() == 0) return 0.0;
    // power iteration on A^T A with a fixed deterministic start
    Eigen::VectorXd v = Eigen::VectorXd::Ones(A.cols());
    v.normalize();
    double norm = 0.0;
    for (int i = 0; i < iterations; ++i) {
        Eigen::VectorXd w = A.transpose() * (A * v);
        norm = std::sqrt(w.norm());
        if (w.norm() == 0.0) return 0.0;
        v = w / w.norm();
    }
    return norm;
}

} // namespace polyxtal
