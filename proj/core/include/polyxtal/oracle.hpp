#ifndef POLYXTAL_ORACLE_HPP
#define POLYXTAL_ORACLE_HPP

#include "polyxtal/fields.hpp"
#include "polyxtal/polycrystal.hpp"

#include <Eigen/Dense>

namespace polyxtal {

/// Direct solution of the discrete conduction system: potential phi with the
/// zero-mean gauge, the fields it induces, and column k of the effective
/// conductivity from the volume-averaged current.
struct DirectSolution {
    Eigen::VectorXcd phi;            // length N1
    FieldGrid E;                     // E0 + gradient * phi
    FieldGrid J;                     // sigma E
    Eigen::VectorXcd sigma_star_col; // <J> / E0
    double residual = 0.0;           // |grad^T sigma E| / |grad^T sigma E0|
};

/// Solves (grad^T sigma grad) phi = -grad^T sigma E0 by sparse LU on the
/// system deflated of its constant null vector (Lagrange-multiplier gauge).
DirectSolution solve_direct(const IndicatorMatrices& ind, const ContrastParams& cp, int k,
                            Complex e0_mag = Complex(1.0, 0.0));

} // namespace polyxtal

#endif
