#include "polyxtal/transport.hpp"

#include "polyxtal/errors.hpp"
#include "polyxtal/io.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>

namespace polyxtal {

Complex stieltjes_eval(const SpectralMeasure& measure, Complex z) {
    if (z.imag() == 0.0 && z.real() > -1e-12 && z.real() < 1.0 + 1e-12) {
        double nearest = 0.0;
        double dist = std::numeric_limits<double>::infinity();
        for (const auto& a : measure.atoms) {
            const double d = std::abs(z.real() - a.lambda);
            if (d < dist) {
                dist = d;
                nearest = a.lambda;
            }
        }
        throw PoleProximityError("stieltjes_eval: evaluation point " + format_complex(z) +
                                     " lies on the spectral interval; nearest atom at lambda=" +
                                     format_double(nearest),
                                 nearest);
    }
    Complex acc{0.0, 0.0};
    for (const auto& a : measure.atoms) acc += a.weight / (z - a.lambda);
    return acc;
}

MeasureSet MeasureSet::build(const BlockEig& eig, const IndicatorMatrices& ind) {
    const int d = ind.spec().d;
    MeasureSet set(d);
    for (int j = 1; j <= d; ++j)
        for (int k = j; k <= d; ++k) {
            auto m = measure_atoms(eig, ind, j, k);
            set.at(j, k) = m;
            if (j != k) {
                std::swap(m.j, m.k);
                set.at(k, j) = std::move(m);  // measures are (j,k)-symmetric
            }
        }
    return set;
}

const SpectralMeasure& MeasureSet::at(int j, int k) const {
    if (j < 1 || j > d_ || k < 1 || k > d_) throw ArgumentError("MeasureSet: index out of range");
    return store_[(j - 1) * d_ + (k - 1)];
}

SpectralMeasure& MeasureSet::at(int j, int k) {
    if (j < 1 || j > d_ || k < 1 || k > d_) throw ArgumentError("MeasureSet: index out of range");
    return store_[(j - 1) * d_ + (k - 1)];
}

EffectiveTensor effective_conductivity(const MeasureSet& measures, const ContrastParams& cp) {
    const int d = measures.dim();
    EffectiveTensor out;
    out.kind = TensorKind::Conductivity;
    out.contrast = cp;
    if (cp.homogeneous()) {
        out.m = cp.sigma1 * Eigen::MatrixXcd::Identity(d, d);
        return out;
    }
    const Complex s = cp.s();
    out.m.resize(d, d);
    for (int j = 1; j <= d; ++j)
        for (int k = 1; k <= d; ++k) {
            const Complex f = stieltjes_eval(measures.at(j, k), s);
            out.m(j - 1, k - 1) = cp.sigma2 * ((j == k ? 1.0 : 0.0) - f);
        }
    return out;
}

EffectiveTensor effective_resistivity(const MeasureSet& measures, const ContrastParams& cp,
                                      ResistivityPairing pairing) {
    const int d = measures.dim();
    EffectiveTensor out;
    out.kind = TensorKind::Resistivity;
    out.contrast = cp;
    if (cp.homogeneous()) {
        out.m = (Complex(1.0, 0.0) / cp.sigma1) * Eigen::MatrixXcd::Identity(d, d);
        return out;
    }
    out.m.resize(d, d);
    if (pairing == ResistivityPairing::X2UpsilonAtS) {
        const Complex s = cp.s();
        for (int j = 1; j <= d; ++j)
            for (int k = 1; k <= d; ++k) {
                if (measures.at(j, k).which != BlockKind::X2Upsilon)
                    throw ArgumentError("effective_resistivity: X2UpsilonAtS needs X2Upsilon measures");
                const Complex e = stieltjes_eval(measures.at(j, k), s);
                out.m(j - 1, k - 1) = ((j == k ? 1.0 : 0.0) - e) / cp.sigma1;
            }
    } else {
        const Complex t = cp.t();
        for (int j = 1; j <= d; ++j)
            for (int k = 1; k <= d; ++k) {
                if (measures.at(j, k).which != BlockKind::X1Upsilon)
                    throw ArgumentError("effective_resistivity: X1UpsilonAtT needs X1Upsilon measures");
                const Complex h = stieltjes_eval(measures.at(j, k), t);
                out.m(j - 1, k - 1) = ((j == k ? 1.0 : 0.0) - h) / cp.sigma2;
            }
    }
    return out;
}

std::string EffectiveTensor::to_json() const {
    nlohmann::json j;
    j["schema"] = 1;
    j["kind"] = kind == TensorKind::Conductivity ? "conductivity" : "resistivity";
    j["provenance"] = provenance;
    j["contrast"] = {{"sigma1_re", contrast.sigma1.real()},
                     {"sigma1_im", contrast.sigma1.imag()},
                     {"sigma2_re", contrast.sigma2.real()},
                     {"sigma2_im", contrast.sigma2.imag()}};
    if (!contrast.homogeneous()) {
        j["contrast"]["s_re"] = contrast.s().real();
        j["contrast"]["s_im"] = contrast.s().imag();
    }
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (long r = 0; r < m.rows(); ++r) {
        nlohmann::json rr = nlohmann::json::array(), ri = nlohmann::json::array();
        for (long c = 0; c < m.cols(); ++c) {
            rr.push_back(m(r, c).real());
            ri.push_back(m(r, c).imag());
        }
        re.push_back(rr);
        im.push_back(ri);
    }
    j["tensor_re"] = re;
    j["tensor_im"] = im;
    return j.dump(2);
}

} // namespace polyxtal
