#include "polyxtal/fields.hpp"

#include "polyxtal/errors.hpp"
#include "polyxtal/io.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

namespace polyxtal {

std::string to_string(FieldLabel label) {
    switch (label) {
        case FieldLabel::E: return "E";
        case FieldLabel::J: return "J";
        case FieldLabel::Ef: return "E_f";
        case FieldLabel::Jf: return "J_f";
        case FieldLabel::E0: return "E0";
        case FieldLabel::J0: return "J0";
        case FieldLabel::X1E: return "X1E";
        case FieldLabel::X2E: return "X2E";
        case FieldLabel::X1J: return "X1J";
        case FieldLabel::X2J: return "X2J";
    }
    return "?";
}

Eigen::VectorXcd FieldGrid::volume_average() const {
    const long n1 = spec.n1();
    Eigen::VectorXcd avg = Eigen::VectorXcd::Zero(spec.d);
    for (int a = 0; a < spec.d; ++a) avg[a] = values.segment(a * n1, n1).mean();
    return avg;
}

FieldGrid constant_field(const LatticeSpec& spec, FieldLabel label, int k, Complex mag) {
    if (k < 1 || k > spec.d) throw ArgumentError("constant_field: component out of [1,d]");
    Eigen::VectorXcd v0 = Eigen::VectorXcd::Zero(spec.d);
    v0[k - 1] = mag;
    return constant_field(spec, label, v0);
}

FieldGrid constant_field(const LatticeSpec& spec, FieldLabel label, const Eigen::VectorXcd& v0) {
    if (v0.size() != spec.d) throw ArgumentError("constant_field: direction must have d entries");
    FieldGrid f{spec, label, Eigen::VectorXcd(spec.n())};
    const long n1 = spec.n1();
    for (int a = 0; a < spec.d; ++a) f.values.segment(a * n1, n1).setConstant(v0[a]);
    return f;
}

Complex volume_dot(const FieldGrid& u, const FieldGrid& v) {
    if (u.values.size() != v.values.size()) throw ArgumentError("volume_dot: length mismatch");
    // unconjugated bilinear form, volume-averaged over sites
    const Complex total = (u.values.array() * v.values.array()).sum();
    return total / static_cast<double>(u.spec.n1());
}

namespace {

void require_admissible(Complex z, const BlockEig& eig, const char* who) {
    if (z.imag() == 0.0 && z.real() > -1e-12 && z.real() < 1.0 + 1e-12) {
        double nearest = 0.0, dist = 1e300;
        for (long i = 0; i < eig.lambdas.size(); ++i) {
            const double d = std::abs(z.real() - eig.lambdas[i]);
            if (d < dist) {
                dist = d;
                nearest = eig.lambdas[i];
            }
        }
        throw PoleProximityError(std::string(who) + ": evaluation point " + format_complex(z) +
                                     " on the spectral interval; nearest eigenvalue " +
                                     format_double(nearest),
                                 nearest);
    }
}

/// Real W1 times complex coefficient vector.
Eigen::VectorXcd real_times_complex(const Eigen::MatrixXd& m, const Eigen::VectorXcd& v) {
    Eigen::VectorXcd out(m.rows());
    out.real() = m * v.real().eval();
    out.imag() = m * v.imag().eval();
    return out;
}

/// Embeds a reduced-block vector into an N-vector ([y;0] or [0;y]) and
/// applies R^T.
Eigen::VectorXcd embed_and_rotate_back(const IndicatorMatrices& ind, const Eigen::VectorXcd& y,
                                       bool first_block) {
    Eigen::VectorXcd full = Eigen::VectorXcd::Zero(ind.spec().n());
    if (first_block)
        full.head(y.size()) = y;
    else
        full.tail(y.size()) = y;
    return ind.apply_RT(full);
}

/// Resolvent expansion z * (zI - block)^-1 (block-projected v0) in the
/// reduced coordinates; returns the N-vector through R^T.
Eigen::VectorXcd resolvent_field(const BlockEig& eig, const IndicatorMatrices& ind,
                                 const Eigen::VectorXcd& v0, Complex z, const char* who) {
    require_admissible(z, eig, who);
    const int d = ind.spec().d;
    // reduced image of the constant field v0: sum_k v0[k] * e_k^{r}
    Eigen::VectorXcd v0r = Eigen::VectorXcd::Zero(eig.block_size);
    for (int k = 1; k <= d; ++k) {
        if (v0[k - 1] == Complex(0.0, 0.0)) continue;
        const Eigen::VectorXd ek = rotated_basis_block(ind, k, eig.which);
        v0r += v0[k - 1] * ek;
    }
    Eigen::VectorXcd coeff(eig.block_size);
    {
        Eigen::VectorXcd proj(eig.block_size);
        proj.real() = eig.W1.transpose() * v0r.real().eval();
        proj.imag() = eig.W1.transpose() * v0r.imag().eval();
        for (long i = 0; i < eig.block_size; ++i) coeff[i] = z * proj[i] / (z - eig.lambdas[i]);
    }
    return embed_and_rotate_back(ind, real_times_complex(eig.W1, coeff), is_first_block(eig.which));
}

} // namespace

FieldGrid resolve_X1E(const BlockEig& eig, const IndicatorMatrices& ind, const ContrastParams& cp,
                      int k, Complex e0_mag) {
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(ind.spec().d);
    if (k < 1 || k > ind.spec().d) throw ArgumentError("resolve_X1E: k out of [1,d]");
    e0[k - 1] = e0_mag;
    return resolve_X1E(eig, ind, cp, e0);
}

FieldGrid resolve_X1E(const BlockEig& eig, const IndicatorMatrices& ind, const ContrastParams& cp,
                      const Eigen::VectorXcd& e0) {
    if (eig.which != BlockKind::X1Gamma)
        throw ArgumentError("resolve_X1E: needs the X1Gamma block eigendecomposition");
    FieldGrid out{ind.spec(), FieldLabel::X1E, {}};
    const FieldGrid e0_field = constant_field(ind.spec(), FieldLabel::E0, e0);
    if (cp.homogeneous()) {
        out.values = ind.apply_X1(e0_field.values);  // |s| -> infinity limit
        return out;
    }
    out.values = resolvent_field(eig, ind, e0, cp.s(), "resolve_X1E");
    return out;
}

EJPair assemble_E_J(const FieldGrid& x1e, const IndicatorMatrices& ind, const ProjectionSet& P,
                    const ContrastParams& cp, int k, Complex e0_mag) {
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(ind.spec().d);
    if (k < 1 || k > ind.spec().d) throw ArgumentError("assemble_E_J: k out of [1,d]");
    e0[k - 1] = e0_mag;
    return assemble_E_J(x1e, ind, P, cp, e0);
}

EJPair assemble_E_J(const FieldGrid& x1e, const IndicatorMatrices& ind, const ProjectionSet& P,
                    const ContrastParams& cp, const Eigen::VectorXcd& e0) {
    if (x1e.values.size() != ind.spec().n()) throw ArgumentError("assemble_E_J: field length mismatch");
    const auto& spec = ind.spec();
    EJPair out{{spec, FieldLabel::E, {}},
               {spec, FieldLabel::J, {}},
               {spec, FieldLabel::Ef, {}},
               x1e,
               {spec, FieldLabel::X2E, {}}};
    const FieldGrid e0_field = constant_field(spec, FieldLabel::E0, e0);
    if (cp.homogeneous()) {
        out.Ef.values = Eigen::VectorXcd::Zero(spec.n());
        out.E = e0_field;
        out.E.label = FieldLabel::E;
        out.X2E.values = ind.apply_X2(e0_field.values);
        out.J.values = cp.sigma1 * out.E.values;
        return out;
    }
    const Complex s = cp.s();
    Eigen::VectorXcd ef(spec.n());
    ef.real() = P.gamma * x1e.values.real().eval();
    ef.imag() = P.gamma * x1e.values.imag().eval();
    out.Ef.values = ef / s;
    out.E.values = e0_field.values + out.Ef.values;
    out.X2E.values = out.E.values - x1e.values;
    out.J.values = cp.sigma1 * x1e.values + cp.sigma2 * out.X2E.values;
    return out;
}

CurrentResolve resolve_current(const BlockEig& x1_ups, const BlockEig& x2_ups,
                               const IndicatorMatrices& ind, const ContrastParams& cp, int k,
                               Complex j0_mag) {
    Eigen::VectorXcd j0 = Eigen::VectorXcd::Zero(ind.spec().d);
    if (k < 1 || k > ind.spec().d) throw ArgumentError("resolve_current: k out of [1,d]");
    j0[k - 1] = j0_mag;
    return resolve_current(x1_ups, x2_ups, ind, cp, j0);
}

CurrentResolve resolve_current(const BlockEig& x1_ups, const BlockEig& x2_ups,
                               const IndicatorMatrices& ind, const ContrastParams& cp,
                               const Eigen::VectorXcd& j0) {
    if (x1_ups.which != BlockKind::X1Upsilon || x2_ups.which != BlockKind::X2Upsilon)
        throw ArgumentError("resolve_current: needs X1Upsilon and X2Upsilon blocks");
    if (cp.sigma1 == Complex(0.0, 0.0) || cp.sigma2 == Complex(0.0, 0.0))
        throw ArgumentError("resolve_current: component conductivities must be nonzero");
    const auto& spec = ind.spec();
    CurrentResolve out{{spec, FieldLabel::X1J, {}},
                       {spec, FieldLabel::X2J, {}},
                       {spec, FieldLabel::J, {}},
                       {spec, FieldLabel::E, {}}};
    const FieldGrid j0_field = constant_field(spec, FieldLabel::J0, j0);
    if (cp.homogeneous()) {
        out.X1J.values = ind.apply_X1(j0_field.values);
        out.X2J.values = ind.apply_X2(j0_field.values);
        out.J = j0_field;
        out.J.label = FieldLabel::J;
        out.E.values = out.J.values / cp.sigma1;
        return out;
    }
    out.X1J.values = resolvent_field(x1_ups, ind, j0, cp.t(), "resolve_current[X1J]");
    out.X2J.values = resolvent_field(x2_ups, ind, j0, cp.s(), "resolve_current[X2J]");
    out.J.values = out.X1J.values + out.X2J.values;
    out.E.values = out.X1J.values / cp.sigma1 + out.X2J.values / cp.sigma2;
    return out;
}

HelmholtzParts helmholtz_decompose(const Eigen::VectorXcd& v, const ProjectionSet& P) {
    if (v.size() != P.spec.n()) throw ArgumentError("helmholtz_decompose: length mismatch");
    HelmholtzParts parts;
    parts.grad_part = real_times_complex(P.gamma, v);
    parts.curl_part = real_times_complex(P.upsilon, v);
    parts.const_part = real_times_complex(P.gamma0, v);

    // phi = V1 Sigma1^-1 U1^T v, likewise psi from the curl^T factors
    const auto potential = [&v](const SubspaceSVD& svd) {
        Eigen::VectorXcd ut(svd.rank);
        ut.real() = svd.U1.transpose() * v.real().eval();
        ut.imag() = svd.U1.transpose() * v.imag().eval();
        for (long i = 0; i < svd.rank; ++i) ut[i] /= svd.Sigma1[i];
        return real_times_complex(svd.V1, ut);
    };
    parts.phi = potential(P.grad_svd);
    parts.psi = potential(P.curlT_svd);
    return parts;
}

// ---- serialization ------------------------------------------------------

std::string FieldGrid::to_csv() const {
    std::string out;
    out.reserve(values.size() * 48);
    out += spec.d == 3 ? "x,y,z,component,re,im\n" : "x,y,component,re,im\n";
    const long n1 = spec.n1();
    for (long p = 0; p < n1; ++p) {
        const auto c = site_coords(spec, p);
        std::string prefix;
        for (int a = 0; a < spec.d; ++a) prefix += std::to_string(c[a]) + ",";
        for (int a = 0; a < spec.d; ++a) {
            const Complex v = values[a * n1 + p];
            out += prefix + std::to_string(a + 1) + "," + format_double(v.real()) + "," +
                   format_double(v.imag()) + "\n";
        }
    }
    return out;
}

std::string FieldGrid::magnitude_csv() const {
    std::string out;
    out.reserve(values.size() * 24);
    out += spec.d == 3 ? "x,y,z,abs,log10_abs\n" : "x,y,abs,log10_abs\n";
    const long n1 = spec.n1();
    for (long p = 0; p < n1; ++p) {
        const auto c = site_coords(spec, p);
        double norm2 = 0.0;
        for (int a = 0; a < spec.d; ++a) norm2 += std::norm(values[a * n1 + p]);
        const double mag = std::sqrt(norm2);
        std::string line;
        for (int a = 0; a < spec.d; ++a) line += std::to_string(c[a]) + ",";
        line += format_double(mag) + "," + format_double(std::log10(mag)) + "\n";
        out += line;
    }
    return out;
}

namespace {
constexpr char kGridMagic[6] = {'P', 'X', 'G', 'R', 'I', 'D'};
constexpr std::uint32_t kGridVersion = 1;
} // namespace

void FieldGrid::save_binary(const std::string& path) const {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw NumericalError("FieldGrid::save_binary: cannot open " + path);
    os.write(kGridMagic, sizeof(kGridMagic));
    const std::uint32_t header[5] = {kGridVersion, static_cast<std::uint32_t>(spec.d),
                                     static_cast<std::uint32_t>(spec.L),
                                     static_cast<std::uint32_t>(spec.Lc),
                                     static_cast<std::uint32_t>(label)};
    os.write(reinterpret_cast<const char*>(header), sizeof(header));
    os.write(reinterpret_cast<const char*>(values.data()),
             static_cast<std::streamsize>(sizeof(Complex) * values.size()));
    if (!os) throw NumericalError("FieldGrid::save_binary: write failed for " + path);
}

FieldGrid FieldGrid::load_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw NumericalError("FieldGrid::load_binary: cannot open " + path);
    char magic[6];
    is.read(magic, sizeof(magic));
    if (!is || std::string(magic, 6) != std::string(kGridMagic, 6))
        throw NumericalError("FieldGrid::load_binary: bad magic in " + path);
    std::uint32_t header[5];
    is.read(reinterpret_cast<char*>(header), sizeof(header));
    if (header[0] != kGridVersion)
        throw NumericalError("FieldGrid::load_binary: unsupported version " +
                             std::to_string(header[0]));
    FieldGrid f;
    f.spec = LatticeSpec::make(static_cast<int>(header[1]), static_cast<int>(header[2]),
                               static_cast<int>(header[3]));
    f.label = static_cast<FieldLabel>(header[4]);
    f.values.resize(f.spec.n());
    is.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(sizeof(Complex) * f.values.size()));
    if (!is) throw NumericalError("FieldGrid::load_binary: truncated file " + path);
    return f;
}

} // namespace polyxtal
