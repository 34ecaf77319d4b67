#include "polyxtal/polycrystal.hpp"

#include "polyxtal/errors.hpp"
#include "polyxtal/rng.hpp"

#include <json.hpp>

#include <cmath>

namespace polyxtal {

using json = nlohmann::json;

ContrastParams ContrastParams::make(Complex sigma1, Complex sigma2) {
    if (sigma2 == Complex(0.0, 0.0))
        throw ArgumentError("ContrastParams: sigma2 must be nonzero");
    return ContrastParams{sigma1, sigma2};
}

Complex ContrastParams::s() const {
    if (homogeneous())
        throw ArgumentError("ContrastParams: s is undefined for sigma1 == sigma2");
    return Complex(1.0, 0.0) / (Complex(1.0, 0.0) - sigma1 / sigma2);
}

OrientationField sample_orientations(const LatticeSpec& spec, std::uint64_t seed, int sample_id) {
    OrientationField field;
    field.spec = spec;
    field.seed = seed;
    field.sample_id = sample_id;
    field.angles_per_crystallite = (spec.d == 3) ? 3 : 1;
    const long nc = spec.crystallite_count();
    field.angles.resize(nc * field.angles_per_crystallite);
    if (spec.d == 3) field.axis_order.resize(nc);

    static constexpr std::array<std::array<int, 3>, 6> kOrders{{
        {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

    for (long c = 0; c < nc; ++c) {
        CounterRng rng(seed, static_cast<std::uint64_t>(sample_id), static_cast<std::uint64_t>(c));
        for (int a = 0; a < field.angles_per_crystallite; ++a)
            field.angles[c * field.angles_per_crystallite + a] = rng.next_angle();
        if (spec.d == 3) field.axis_order[c] = kOrders[rng.next_below(6)];
    }
    return field;
}

Eigen::Matrix2d rotation_matrix2(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    Eigen::Matrix2d r;
    r << c, s, -s, c;
    return r;
}

namespace {

Eigen::Matrix3d axis_rotation(int axis, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
    switch (axis) {
        case 0: r << 1, 0, 0, 0, c, s, 0, -s, c; break;
        case 1: r << c, 0, -s, 0, 1, 0, s, 0, c; break;
        case 2: r << c, s, 0, -s, c, 0, 0, 0, 1; break;
        default: throw ArgumentError("axis_rotation: axis out of range");
    }
    return r;
}

} // namespace

Eigen::Matrix3d rotation_matrix3(double theta_x, double theta_y, double theta_z,
                                 const std::array<int, 3>& order) {
    const std::array<double, 3> angles{theta_x, theta_y, theta_z};
    Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
    for (int step = 0; step < 3; ++step)
        r = axis_rotation(order[step], angles[order[step]]) * r;
    return r;
}

Eigen::MatrixXd rotation_for(const OrientationField& field, long crystallite) {
    if (field.spec.d == 3)
        return rotation_matrix3(field.angle(crystallite, 0), field.angle(crystallite, 1),
                                field.angle(crystallite, 2), field.axis_order[crystallite]);
    if (field.spec.d == 2) return rotation_matrix2(field.angle(crystallite));
    return Eigen::MatrixXd::Identity(1, 1);
}

std::string OrientationField::to_json() const {
    json j;
    j["schema"] = 1;
    j["d"] = spec.d;
    j["L"] = spec.L;
    j["Lc"] = spec.Lc;
    j["seed"] = seed;
    j["sample_id"] = sample_id;
    j["angles_per_crystallite"] = angles_per_crystallite;
    j["angles"] = angles;
    if (spec.d == 3) {
        json orders = json::array();
        for (const auto& o : axis_order) orders.push_back({o[0], o[1], o[2]});
        j["axis_order"] = orders;
    }
    return j.dump(2);
}

OrientationField OrientationField::from_json(const std::string& text) {
    const json j = json::parse(text);
    OrientationField f;
    f.spec = LatticeSpec::make(j.at("d").get<int>(), j.at("L").get<int>(), j.at("Lc").get<int>());
    f.seed = j.at("seed").get<std::uint64_t>();
    f.sample_id = j.at("sample_id").get<int>();
    f.angles_per_crystallite = j.at("angles_per_crystallite").get<int>();
    f.angles = j.at("angles").get<std::vector<double>>();
    if (f.spec.d == 3)
        for (const auto& o : j.at("axis_order"))
            f.axis_order.push_back({o[0].get<int>(), o[1].get<int>(), o[2].get<int>()});
    if (f.angles.size() !=
        static_cast<std::size_t>(f.spec.crystallite_count() * f.angles_per_crystallite))
        throw ArgumentError("OrientationField::from_json: angle count mismatch");
    return f;
}

IndicatorMatrices::IndicatorMatrices(LatticeSpec spec, std::vector<double> site_rotations)
    : spec_(spec), d_(spec.d), n1_(spec.n1()), rot_(std::move(site_rotations)) {
    if (rot_.size() != static_cast<std::size_t>(n1_ * d_ * d_))
        throw ArgumentError("IndicatorMatrices: rotation buffer size mismatch");
}

IndicatorMatrices realize_indicators(const OrientationField& field) {
    const auto& spec = field.spec;
    const long n1 = spec.n1();
    const int d = spec.d;
    std::vector<double> rot(n1 * d * d);

    // cache the per-crystallite rotation, then stamp it on every member site
    const long nc = spec.crystallite_count();
    std::vector<Eigen::MatrixXd> crystal_rot(nc);
    for (long c = 0; c < nc; ++c) crystal_rot[c] = rotation_for(field, c);

    for (long p = 0; p < n1; ++p) {
        const Eigen::MatrixXd& r = crystal_rot[crystallite_of_site(spec, p)];
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) rot[(p * d + a) * d + b] = r(a, b);
    }
    return IndicatorMatrices(spec, std::move(rot));
}

namespace {

template <typename Scalar>
Eigen::Vector<Scalar, Eigen::Dynamic> apply_rotation(const IndicatorMatrices& ind, bool transpose,
                                                     const Eigen::Vector<Scalar, Eigen::Dynamic>& v) {
    const int d = ind.spec().d;
    const long n1 = ind.spec().n1();
    if (v.size() != ind.spec().n()) throw ArgumentError("rotation apply: vector length mismatch");
    Eigen::Vector<Scalar, Eigen::Dynamic> out(v.size());
    for (long p = 0; p < n1; ++p)
        for (int a = 0; a < d; ++a) {
            Scalar acc{};
            for (int b = 0; b < d; ++b) {
                const double r = transpose ? ind.rot(p, b, a) : ind.rot(p, a, b);
                acc += r * v[b * n1 + p];
            }
            out[a * n1 + p] = acc;
        }
    return out;
}

template <typename Scalar>
Eigen::Vector<Scalar, Eigen::Dynamic> apply_indicator(const IndicatorMatrices& ind, bool first,
                                                      const Eigen::Vector<Scalar, Eigen::Dynamic>& v) {
    const int d = ind.spec().d;
    const long n1 = ind.spec().n1();
    if (v.size() != ind.spec().n()) throw ArgumentError("indicator apply: vector length mismatch");
    Eigen::Vector<Scalar, Eigen::Dynamic> out(v.size());
    for (long p = 0; p < n1; ++p) {
        // X1 = r1 r1^T per site with r1 the first row of R
        Scalar proj{};
        for (int b = 0; b < d; ++b) proj += ind.rot(p, 0, b) * v[b * n1 + p];
        for (int a = 0; a < d; ++a) {
            const Scalar x1 = ind.rot(p, 0, a) * proj;
            out[a * n1 + p] = first ? x1 : v[a * n1 + p] - x1;
        }
    }
    return out;
}

} // namespace

Eigen::VectorXcd IndicatorMatrices::apply_R(const Eigen::VectorXcd& v) const {
    return apply_rotation<Complex>(*this, false, v);
}
Eigen::VectorXcd IndicatorMatrices::apply_RT(const Eigen::VectorXcd& v) const {
    return apply_rotation<Complex>(*this, true, v);
}
Eigen::VectorXd IndicatorMatrices::apply_R(const Eigen::VectorXd& v) const {
    return apply_rotation<double>(*this, false, v);
}
Eigen::VectorXd IndicatorMatrices::apply_RT(const Eigen::VectorXd& v) const {
    return apply_rotation<double>(*this, true, v);
}
Eigen::VectorXcd IndicatorMatrices::apply_X1(const Eigen::VectorXcd& v) const {
    return apply_indicator<Complex>(*this, true, v);
}
Eigen::VectorXcd IndicatorMatrices::apply_X2(const Eigen::VectorXcd& v) const {
    return apply_indicator<Complex>(*this, false, v);
}
Eigen::VectorXd IndicatorMatrices::apply_X1(const Eigen::VectorXd& v) const {
    return apply_indicator<double>(*this, true, v);
}

double IndicatorMatrices::x1_mean(int j, int k) const {
    if (j < 1 || j > d_ || k < 1 || k > d_)
        throw ArgumentError("x1_mean: component out of range");
    double acc = 0.0;
    for (long p = 0; p < n1_; ++p) acc += x1_entry(p, j - 1, k - 1);
    return acc / static_cast<double>(n1_);
}

Eigen::MatrixXd IndicatorMatrices::dense_X1() const {
    const long n = spec_.n();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (long p = 0; p < n1_; ++p)
        for (int a = 0; a < d_; ++a)
            for (int b = 0; b < d_; ++b) m(a * n1_ + p, b * n1_ + p) = x1_entry(p, a, b);
    return m;
}

Eigen::MatrixXd IndicatorMatrices::dense_R() const {
    const long n = spec_.n();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (long p = 0; p < n1_; ++p)
        for (int a = 0; a < d_; ++a)
            for (int b = 0; b < d_; ++b) m(a * n1_ + p, b * n1_ + p) = rot(p, a, b);
    return m;
}

Eigen::VectorXcd local_conductivity_apply(const IndicatorMatrices& ind, const ContrastParams& cp,
                                          const Eigen::VectorXcd& v) {
    return cp.sigma1 * ind.apply_X1(v) + cp.sigma2 * ind.apply_X2(v);
}

} // namespace polyxtal
