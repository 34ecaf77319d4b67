#ifndef POLYXTAL_FIELDS_HPP
#define POLYXTAL_FIELDS_HPP

#include "polyxtal/polycrystal.hpp"
#include "polyxtal/projection.hpp"
#include "polyxtal/spectral.hpp"

#include <Eigen/Dense>

#include <string>

namespace polyxtal {

enum class FieldLabel { E, J, Ef, Jf, E0, J0, X1E, X2E, X1J, X2J };

std::string to_string(FieldLabel label);

/// Complex d-vector field on the lattice, component-major layout (length N).
struct FieldGrid {
    LatticeSpec spec;
    FieldLabel label = FieldLabel::E;
    Eigen::VectorXcd values;

    /// Per-component volume average (d-vector).
    Eigen::VectorXcd volume_average() const;

    std::string to_csv() const;                    // site coords, component, re, im
    std::string magnitude_csv() const;             // site coords, |v|, log10|v|
    void save_binary(const std::string& path) const;
    static FieldGrid load_binary(const std::string& path);
};

/// Constant field mag * e_k (component k 1-based).
FieldGrid constant_field(const LatticeSpec& spec, FieldLabel label, int k, Complex mag);
FieldGrid constant_field(const LatticeSpec& spec, FieldLabel label, const Eigen::VectorXcd& v0);

/// Volume-averaged unconjugated dot product (1/N1) sum_i u_i v_i.
Complex volume_dot(const FieldGrid& u, const FieldGrid& v);

/// X1 E from the eigenvector resolvent expansion of the X1Gamma block:
/// coefficients (w_i . e0^{r1})/(s - lambda_i), embedded back through R^T.
/// Equal contrasts short-circuit to X1 E0.
FieldGrid resolve_X1E(const BlockEig& eig, const IndicatorMatrices& ind, const ContrastParams& cp,
                      int k, Complex e0_mag);
FieldGrid resolve_X1E(const BlockEig& eig, const IndicatorMatrices& ind, const ContrastParams& cp,
                      const Eigen::VectorXcd& e0);

struct EJPair {
    FieldGrid E;
    FieldGrid J;
    FieldGrid Ef;
    FieldGrid X1E;
    FieldGrid X2E;
};

/// E_f = Gamma X1E / s, E = E0 + E_f, X2E = E - X1E, J = sigma1 X1E + sigma2 X2E.
EJPair assemble_E_J(const FieldGrid& x1e, const IndicatorMatrices& ind, const ProjectionSet& P,
                    const ContrastParams& cp, int k, Complex e0_mag);
EJPair assemble_E_J(const FieldGrid& x1e, const IndicatorMatrices& ind, const ProjectionSet& P,
                    const ContrastParams& cp, const Eigen::VectorXcd& e0);

struct CurrentResolve {
    FieldGrid X1J;
    FieldGrid X2J;
    FieldGrid J;
    FieldGrid E;  // sigma1^-1 X1J + sigma2^-1 X2J
};

/// Current density from the Upsilon resolvents:
/// X1J = t (tI - X1 Ups X1)^-1 X1 J0 and X2J = s (sI - X2 Ups X2)^-1 X2 J0.
CurrentResolve resolve_current(const BlockEig& x1_ups, const BlockEig& x2_ups,
                               const IndicatorMatrices& ind, const ContrastParams& cp,
                               const Eigen::VectorXcd& j0);
CurrentResolve resolve_current(const BlockEig& x1_ups, const BlockEig& x2_ups,
                               const IndicatorMatrices& ind, const ContrastParams& cp, int k,
                               Complex j0_mag);

struct HelmholtzParts {
    Eigen::VectorXcd grad_part;   // Gamma v
    Eigen::VectorXcd curl_part;   // Upsilon v
    Eigen::VectorXcd const_part;  // Gamma0 v
    Eigen::VectorXcd phi;         // potential with grad_part = gradient * phi
    Eigen::VectorXcd psi;         // potential with curl_part = curl^T * psi
};

/// Splits v along the three projections and reconstructs both potentials
/// from the stored SVD factors.
HelmholtzParts helmholtz_decompose(const Eigen::VectorXcd& v, const ProjectionSet& P);

} // namespace polyxtal

#endif
