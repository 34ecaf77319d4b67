#ifndef POLYXTAL_POLYCRYSTAL_HPP
#define POLYXTAL_POLYCRYSTAL_HPP

#include "polyxtal/lattice.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace polyxtal {

using Complex = std::complex<double>;

/// Component conductivities and the contrast variable s = 1/(1 - sigma1/sigma2).
/// Equal contrasts are representable (the homogeneous medium); s() and t()
/// are undefined there and throw.
struct ContrastParams {
    Complex sigma1{1.0, 0.0};
    Complex sigma2{1.0, 0.0};

    static ContrastParams make(Complex sigma1, Complex sigma2);

    bool homogeneous() const { return sigma1 == sigma2; }
    Complex s() const;
    Complex t() const { return Complex(1.0, 0.0) - s(); }  // s + t = 1 by construction
};

/// Per-crystallite rotation parameters: one angle in 2D, three axis angles
/// plus a composition-order permutation in 3D. Angles live in [-pi, pi).
struct OrientationField {
    LatticeSpec spec;
    std::uint64_t seed = 0;
    int sample_id = 0;
    int angles_per_crystallite = 1;
    std::vector<double> angles;                    // crystallite-major
    std::vector<std::array<int, 3>> axis_order;    // 3D only, values 0..2

    double angle(long crystallite, int which = 0) const {
        return angles[crystallite * angles_per_crystallite + which];
    }

    std::string to_json() const;
    static OrientationField from_json(const std::string& text);
};

/// Deterministic in (seed, sample_id): every crystallite gets its own
/// counter-based stream, so results are independent of thread scheduling.
OrientationField sample_orientations(const LatticeSpec& spec, std::uint64_t seed, int sample_id);

Eigen::Matrix2d rotation_matrix2(double theta);
Eigen::Matrix3d rotation_matrix3(double theta_x, double theta_y, double theta_z,
                                 const std::array<int, 3>& order);
Eigen::MatrixXd rotation_for(const OrientationField& field, long crystallite);

/// Per-site projections X1 = R^T C R and X2 = I - X1 (C = diag(e1)), stored
/// as the per-site rotation blocks. Exposes the action of X1, X2 and the
/// banded rotation R on component-major N-vectors.
class IndicatorMatrices {
public:
    IndicatorMatrices(LatticeSpec spec, std::vector<double> site_rotations);

    const LatticeSpec& spec() const { return spec_; }

    /// Entry (a,b) of the d x d rotation at a site; 0-based.
    double rot(long site, int a, int b) const { return rot_[(site * d_ + a) * d_ + b]; }
    /// Entry (a,b) of the per-site X1 block = r1[a]*r1[b] with r1 the first row of R.
    double x1_entry(long site, int a, int b) const { return rot(site, 0, a) * rot(site, 0, b); }

    Eigen::VectorXcd apply_R(const Eigen::VectorXcd& v) const;
    Eigen::VectorXcd apply_RT(const Eigen::VectorXcd& v) const;
    Eigen::VectorXd apply_R(const Eigen::VectorXd& v) const;
    Eigen::VectorXd apply_RT(const Eigen::VectorXd& v) const;
    Eigen::VectorXcd apply_X1(const Eigen::VectorXcd& v) const;
    Eigen::VectorXcd apply_X2(const Eigen::VectorXcd& v) const;
    Eigen::VectorXd apply_X1(const Eigen::VectorXd& v) const;

    /// Volume average (1/N1) * sum over sites of the X1 block entry (j,k); 1-based.
    double x1_mean(int j, int k) const;

    /// Dense N x N realizations; desk-scale test and oracle use only.
    Eigen::MatrixXd dense_X1() const;
    Eigen::MatrixXd dense_R() const;

private:
    LatticeSpec spec_;
    int d_;
    long n1_;
    std::vector<double> rot_;  // N1 * d * d, row-major per site
};

IndicatorMatrices realize_indicators(const OrientationField& field);

/// sigma1*X1*v + sigma2*X2*v, the local conductivity action.
Eigen::VectorXcd local_conductivity_apply(const IndicatorMatrices& ind, const ContrastParams& cp,
                                          const Eigen::VectorXcd& v);

} // namespace polyxtal

#endif
