#include "polyxtal/spectral.hpp"

#include "polyxtal/errors.hpp"
#include "polyxtal/io.hpp"
#include "polyxtal/linalg.hpp"
#include "polyxtal/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace polyxtal {

std::string to_string(BlockKind which) {
    switch (which) {
        case BlockKind::X1Gamma: return "X1Gamma";
        case BlockKind::X2Gamma: return "X2Gamma";
        case BlockKind::X1Upsilon: return "X1Upsilon";
        case BlockKind::X2Upsilon: return "X2Upsilon";
    }
    return "?";
}

bool is_first_block(BlockKind which) {
    return which == BlockKind::X1Gamma || which == BlockKind::X1Upsilon;
}

namespace {

bool uses_gamma(BlockKind which) {
    return which == BlockKind::X1Gamma || which == BlockKind::X2Gamma;
}

} // namespace

Eigen::MatrixXd reduced_block(const IndicatorMatrices& ind, const ProjectionSet& P,
                              BlockKind which) {
    if (!(ind.spec() == P.spec))
        throw ArgumentError("reduced_block: indicator and projection lattice specs differ");
    const int d = ind.spec().d;
    const long n1 = ind.spec().n1();
    const Eigen::MatrixXd& proj = uses_gamma(which) ? P.gamma : P.upsilon;

    // component rows of R entering the block: {0} or {1..d-1}
    const int row_lo = is_first_block(which) ? 0 : 1;
    const int row_hi = is_first_block(which) ? 1 : d;
    const long bs = (row_hi - row_lo) * n1;

    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(bs, bs);
    Eigen::VectorXd ra(n1), rb(n1);
    for (int alpha = row_lo; alpha < row_hi; ++alpha)
        for (int beta = row_lo; beta < row_hi; ++beta) {
            auto dst = block.block((alpha - row_lo) * n1, (beta - row_lo) * n1, n1, n1);
            for (int a = 0; a < d; ++a) {
                for (long p = 0; p < n1; ++p) ra[p] = ind.rot(p, alpha, a);
                for (int b = 0; b < d; ++b) {
                    for (long q = 0; q < n1; ++q) rb[q] = ind.rot(q, beta, b);
                    dst.noalias() +=
                        proj.block(a * n1, b * n1, n1, n1).cwiseProduct(ra * rb.transpose());
                }
            }
        }
    return ((block + block.transpose()) / 2.0).eval();
}

BlockEig eig_block(const Eigen::MatrixXd& B, BlockKind which) {
    const double asym = (B - B.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10)
        throw ArgumentError("eig_block: matrix not symmetric, max asymmetry " +
                            std::to_string(asym));
    SymEig es = eig_sym(B);

    constexpr double eps = 1e-10;
    for (long i = 0; i < es.values.size(); ++i) {
        const double l = es.values[i];
        if (l < -eps || l > 1.0 + eps)
            throw NumericalError("eig_block: eigenvalue " + std::to_string(l) +
                                 " outside [0,1] beyond tolerance");
    }
    BlockEig out;
    out.which = which;
    out.lambdas = es.values.cwiseMax(0.0).cwiseMin(1.0);
    out.W1 = std::move(es.vectors);
    out.block_size = B.rows();
    return out;
}

Eigen::VectorXd rotated_basis_block(const IndicatorMatrices& ind, int j, BlockKind which) {
    const int d = ind.spec().d;
    if (j < 1 || j > d) throw ArgumentError("rotated_basis_block: j out of [1,d]");
    const long n1 = ind.spec().n1();
    // (R e_j) at component row a, site p is R_p[a, j-1]
    if (is_first_block(which)) {
        Eigen::VectorXd v(n1);
        for (long p = 0; p < n1; ++p) v[p] = ind.rot(p, 0, j - 1);
        return v;
    }
    Eigen::VectorXd v((d - 1) * n1);
    for (int a = 1; a < d; ++a)
        for (long p = 0; p < n1; ++p) v[(a - 1) * n1 + p] = ind.rot(p, a, j - 1);
    return v;
}

SpectralMeasure measure_atoms(const BlockEig& eig, const IndicatorMatrices& ind, int j, int k) {
    const int d = ind.spec().d;
    if (j < 1 || j > d || k < 1 || k > d)
        throw ArgumentError("measure_atoms: component indices out of [1,d]");
    const Eigen::VectorXd ej = rotated_basis_block(ind, j, eig.which);
    if (ej.size() != eig.block_size)
        throw ArgumentError("measure_atoms: eig block size does not match lattice");
    const Eigen::VectorXd pj = eig.W1.transpose() * ej;
    const Eigen::VectorXd pk =
        (j == k) ? pj : (eig.W1.transpose() * rotated_basis_block(ind, k, eig.which)).eval();

    const double inv_n1 = 1.0 / static_cast<double>(ind.spec().n1());
    SpectralMeasure m;
    m.j = j;
    m.k = k;
    m.which = eig.which;
    m.atoms.resize(eig.block_size);
    for (long i = 0; i < eig.block_size; ++i)
        m.atoms[i] = {eig.lambdas[i], pj[i] * pk[i] * inv_n1};
    return m;
}

double SpectralMeasure::mass() const {
    double acc = 0.0;
    for (const auto& a : atoms) acc += a.weight;
    return acc;
}

std::vector<double> moments(const SpectralMeasure& measure, int n_max) {
    if (n_max < 0) throw ArgumentError("moments: n_max must be >= 0");
    std::vector<double> mu(n_max + 1, 0.0);
    for (const auto& a : measure.atoms) {
        double pw = 1.0;
        for (int n = 0; n <= n_max; ++n) {
            mu[n] += pw * a.weight;
            pw *= a.lambda;
        }
    }
    return mu;
}

void bin_measure(const SpectralMeasure& measure, int bins, std::vector<double>& accum) {
    if (bins < 1) throw ArgumentError("bin_measure: bins must be >= 1");
    if (accum.size() != static_cast<std::size_t>(bins))
        throw ArgumentError("bin_measure: accumulator size mismatch");
    for (const auto& a : measure.atoms) {
        // [l, r) bins, last bin closed at 1
        int idx = static_cast<int>(std::floor(a.lambda * bins));
        if (idx >= bins) idx = bins - 1;
        if (idx < 0) idx = 0;
        accum[idx] += a.weight;
    }
}

double SpectralFunction::total_mass() const {
    double acc = 0.0;
    for (double v : mass) acc += v;
    return acc;
}

std::string SpectralFunction::to_csv() const {
    std::string out = "lambda_lo,lambda_hi,mass,density\n";
    const double width = 1.0 / bins;
    for (int b = 0; b < bins; ++b) {
        out += format_double(b * width) + "," + format_double((b + 1) * width) + "," +
               format_double(mass[b]) + "," + format_double(mass[b] / width) + "\n";
    }
    return out;
}

std::string SpectralMeasure::to_csv() const {
    std::string out = "lambda,weight\n";
    for (const auto& a : atoms) out += format_double(a.lambda) + "," + format_double(a.weight) + "\n";
    return out;
}

std::string SpectralMeasure::to_json(const LatticeSpec& spec, std::uint64_t seed, int samples,
                                     int bins) const {
    nlohmann::json meta;
    meta["schema"] = 1;
    meta["spec"] = {{"d", spec.d}, {"L", spec.L}, {"Lc", spec.Lc}};
    meta["seed"] = seed;
    meta["samples"] = samples;
    meta["K"] = bins;
    meta["which"] = to_string(which);
    meta["j"] = j;
    meta["k"] = k;
    meta["provenance"] = provenance;
    meta["mass"] = mass();
    return meta.dump(2);
}

SpectralFunction ensemble_spectral_function(const EnsembleParams& params, const ProjectionSet& P) {
    if (params.samples < 1) throw ArgumentError("ensemble_spectral_function: samples must be >= 1");
    if (params.bins < 1) throw ArgumentError("ensemble_spectral_function: bins must be >= 1");
    if (!(params.spec == P.spec))
        throw ArgumentError("ensemble_spectral_function: spec mismatch with projections");

    auto one_sample = [&](int sample_id) {
        const auto field = sample_orientations(params.spec, params.seed, sample_id);
        const auto ind = realize_indicators(field);
        const auto eig = eig_block(reduced_block(ind, P, params.which), params.which);
        auto measure = measure_atoms(eig, ind, params.j, params.k);
        std::vector<double> bins(params.bins, 0.0);
        bin_measure(measure, params.bins, bins);
        return bins;
    };
    const auto per_sample =
        map_indexed<std::vector<double>>(params.samples, params.threads, one_sample);

    SpectralFunction fn;
    fn.bins = params.bins;
    fn.sample_count = params.samples;
    fn.mass.assign(params.bins, 0.0);
    for (const auto& sample : per_sample)  // ordered fold by sample_id
        for (int b = 0; b < params.bins; ++b) fn.mass[b] += sample[b];
    for (int b = 0; b < params.bins; ++b) fn.mass[b] /= params.samples;
    return fn;
}

} // namespace polyxtal
