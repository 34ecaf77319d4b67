#ifndef POLYXTAL_TRANSPORT_HPP
#define POLYXTAL_TRANSPORT_HPP

#include "polyxtal/polycrystal.hpp"
#include "polyxtal/spectral.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace polyxtal {

/// sum_i w_i / (z - lambda_i). z must keep a margin of 1e-12 from [0,1] on
/// the real axis; violations raise PoleProximityError naming the nearest atom.
Complex stieltjes_eval(const SpectralMeasure& measure, Complex z);

/// Symmetric table of the d x d spectral measures of one pairing.
class MeasureSet {
public:
    MeasureSet() = default;
    explicit MeasureSet(int d) : d_(d), store_(d * d) {}

    /// Builds all (j,k) measures from one eigendecomposition.
    static MeasureSet build(const BlockEig& eig, const IndicatorMatrices& ind);

    int dim() const { return d_; }
    const SpectralMeasure& at(int j, int k) const;
    SpectralMeasure& at(int j, int k);

private:
    int d_ = 0;
    std::vector<SpectralMeasure> store_;
};

enum class TensorKind { Conductivity, Resistivity };

struct EffectiveTensor {
    Eigen::MatrixXcd m;
    TensorKind kind = TensorKind::Conductivity;
    ContrastParams contrast;
    std::string provenance;

    std::string to_json() const;
};

/// sigma*_jk = sigma2 (delta_jk - F_jk(s)) from Gamma-pairing measures.
/// Equal contrasts bypass s and return the exact homogeneous tensor.
EffectiveTensor effective_conductivity(const MeasureSet& measures, const ContrastParams& cp);

/// Which resolvent pairing backs the resistivity representation.
enum class ResistivityPairing { X2UpsilonAtS, X1UpsilonAtT };

/// rho* from Upsilon-pairing measures: with X2Upsilon evaluated at s,
/// rho*_jk = sigma1^-1 (delta_jk - E_jk(s)); with X1Upsilon evaluated at t,
/// rho*_jk = (1 - H_jk(t)) / sigma2.
EffectiveTensor effective_resistivity(const MeasureSet& measures, const ContrastParams& cp,
                                      ResistivityPairing pairing);

} // namespace polyxtal

#endif
