#include "polyxtal/projection.hpp"

#include "polyxtal/errors.hpp"
#include "polyxtal/linalg.hpp"

#include <cstdint>
#include <fstream>
#include <string>

namespace polyxtal {

SubspaceSVD svd_split(const Eigen::MatrixXd& A, double zero_tolerance) {
    const ThinSVD svd = thin_svd(A);
    const double nu_max = svd.S.size() > 0 ? svd.S(0) : 0.0;
    const double cut = zero_tolerance * nu_max;
    long rank = 0;
    while (rank < svd.S.size() && svd.S(rank) > cut) ++rank;

    SubspaceSVD out;
    out.rank = rank;
    out.zero_tolerance = zero_tolerance;
    out.U1 = svd.U.leftCols(rank);
    out.Sigma1 = svd.S.head(rank);
    out.V1 = svd.V.leftCols(rank);

    // contract checks: orthonormal factors, faithful reconstruction
    const double ortho_u = (out.U1.transpose() * out.U1 -
                            Eigen::MatrixXd::Identity(rank, rank)).cwiseAbs().maxCoeff();
    const double ortho_v = (out.V1.transpose() * out.V1 -
                            Eigen::MatrixXd::Identity(rank, rank)).cwiseAbs().maxCoeff();
    if (rank > 0 && (ortho_u > 1e-12 || ortho_v > 1e-12))
        throw NumericalError("svd_split: factor columns not orthonormal (U:" +
                             std::to_string(ortho_u) + " V:" + std::to_string(ortho_v) + ")");
    const Eigen::MatrixXd resid = A - out.U1 * out.Sigma1.asDiagonal() * out.V1.transpose();
    const double err = spectral_norm_estimate(resid);
    if (err > 1e-10 * std::max(1.0, nu_max))
        throw NumericalError("svd_split: reconstruction error " + std::to_string(err) +
                             " exceeds tolerance");
    return out;
}

SubspaceSVD svd_split(const DiscreteOperator& A, double zero_tolerance) {
    return svd_split(A.dense(), zero_tolerance);
}

ProjectionSet build_projections(const LatticeSpec& spec, double zero_tolerance) {
    const auto grad = build_gradient(spec);
    const auto curl = build_curl(spec);

    ProjectionSet ps;
    ps.spec = spec;
    ps.grad_svd = svd_split(grad.dense(), zero_tolerance);
    ps.curlT_svd = svd_split(Eigen::MatrixXd(curl.dense().transpose()), zero_tolerance);

    const long n = spec.n();
    ps.gamma = ps.grad_svd.U1 * ps.grad_svd.U1.transpose();
    ps.upsilon = ps.curlT_svd.U1 * ps.curlT_svd.U1.transpose();
    ps.gamma0 = Eigen::MatrixXd::Identity(n, n) - ps.gamma - ps.upsilon;

    // kill roundoff asymmetry before anything downstream eigs these
    ps.gamma = ((ps.gamma + ps.gamma.transpose()) / 2.0).eval();
    ps.upsilon = ((ps.upsilon + ps.upsilon.transpose()) / 2.0).eval();
    ps.gamma0 = ((ps.gamma0 + ps.gamma0.transpose()) / 2.0).eval();

    ps.verify();
    return ps;
}

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

void check(bool ok, const std::string& what, double value) {
    if (!ok)
        throw NumericalError("ProjectionSet: " + what + " violated (max |err| = " +
                             std::to_string(value) + ")");
}

} // namespace

void ProjectionSet::verify(double tol) const {
    const long n = spec.n();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    for (const auto* p : {&gamma, &upsilon, &gamma0}) {
        double e = max_abs(*p - p->transpose());
        check(e < tol, "symmetry", e);
        e = max_abs(*p * *p - *p);
        check(e < tol, "idempotency", e);
    }
    double e = max_abs(gamma * upsilon);
    check(e < tol, "Gamma*Upsilon = 0", e);
    e = max_abs(gamma * gamma0);
    check(e < tol, "Gamma*Gamma0 = 0", e);
    e = max_abs(upsilon * gamma0);
    check(e < tol, "Upsilon*Gamma0 = 0", e);
    e = max_abs(gamma + gamma0 + upsilon - id);
    check(e < tol, "resolution of the identity", e);
}

Eigen::MatrixXd full_rank_projector(const Eigen::MatrixXd& A, double zero_tolerance) {
    const ThinSVD svd = thin_svd(A);
    const double nu_max = svd.S.size() > 0 ? svd.S(0) : 0.0;
    long rank = 0;
    while (rank < svd.S.size() && svd.S(rank) > zero_tolerance * nu_max) ++rank;
    if (rank < A.cols())
        throw RankDeficientError("full_rank_projector: matrix is rank deficient, null dimension " +
                                     std::to_string(A.cols() - rank),
                                 A.cols() - rank);
    const Eigen::MatrixXd gram = A.transpose() * A;
    return A * gram.ldlt().solve(A.transpose());
}

// ---- binary cache ------------------------------------------------------
//
// Layout: magic "PXPROJ", u32 version, u32 d, u32 L, then the three N x N
// projector blocks and both SVD factor sets as raw little-endian doubles.

namespace {

constexpr char kMagic[6] = {'P', 'X', 'P', 'R', 'O', 'J'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
    write_u32(os, static_cast<std::uint32_t>(m.rows()));
    write_u32(os, static_cast<std::uint32_t>(m.cols()));
    os.write(reinterpret_cast<const char*>(m.data()),
             static_cast<std::streamsize>(sizeof(double) * m.size()));
}

Eigen::MatrixXd read_matrix(std::istream& is) {
    const auto rows = read_u32(is);
    const auto cols = read_u32(is);
    Eigen::MatrixXd m(rows, cols);
    is.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
    return m;
}

void write_svd(std::ostream& os, const SubspaceSVD& s) {
    write_matrix(os, s.U1);
    write_matrix(os, s.Sigma1);
    write_matrix(os, s.V1);
    os.write(reinterpret_cast<const char*>(&s.zero_tolerance), sizeof(double));
}

SubspaceSVD read_svd(std::istream& is) {
    SubspaceSVD s;
    s.U1 = read_matrix(is);
    s.Sigma1 = read_matrix(is);
    s.V1 = read_matrix(is);
    is.read(reinterpret_cast<char*>(&s.zero_tolerance), sizeof(double));
    s.rank = s.Sigma1.size();
    return s;
}

} // namespace

void ProjectionSet::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw NumericalError("ProjectionSet::save: cannot open " + path);
    os.write(kMagic, sizeof(kMagic));
    write_u32(os, kVersion);
    write_u32(os, static_cast<std::uint32_t>(spec.d));
    write_u32(os, static_cast<std::uint32_t>(spec.L));
    write_u32(os, static_cast<std::uint32_t>(spec.Lc));
    write_matrix(os, gamma);
    write_matrix(os, upsilon);
    write_matrix(os, gamma0);
    write_svd(os, grad_svd);
    write_svd(os, curlT_svd);
    if (!os) throw NumericalError("ProjectionSet::save: write failed for " + path);
}

ProjectionSet ProjectionSet::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw NumericalError("ProjectionSet::load: cannot open " + path);
    char magic[6];
    is.read(magic, sizeof(magic));
    if (!is || std::string(magic, 6) != std::string(kMagic, 6))
        throw NumericalError("ProjectionSet::load: bad magic in " + path);
    const auto version = read_u32(is);
    if (version != kVersion)
        throw NumericalError("ProjectionSet::load: unsupported format version " +
                             std::to_string(version));
    ProjectionSet ps;
    const int d = static_cast<int>(read_u32(is));
    const int L = static_cast<int>(read_u32(is));
    const int Lc = static_cast<int>(read_u32(is));
    ps.spec = LatticeSpec::make(d, L, Lc);
    ps.gamma = read_matrix(is);
    ps.upsilon = read_matrix(is);
    ps.gamma0 = read_matrix(is);
    ps.grad_svd = read_svd(is);
    ps.curlT_svd = read_svd(is);
    if (!is) throw NumericalError("ProjectionSet::load: truncated file " + path);
    return ps;
}

} // namespace polyxtal
