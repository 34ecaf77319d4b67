#include "polyxtal/runner.hpp"

#include "polyxtal/errors.hpp"
#include "polyxtal/fields.hpp"
#include "polyxtal/io.hpp"
#include "polyxtal/oracle.hpp"
#include "polyxtal/parallel.hpp"
#include "polyxtal/rng.hpp"
#include "polyxtal/spectral.hpp"
#include "polyxtal/transport.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>

namespace polyxtal {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::set<std::string> kKnownOutputs = {"spectral_function", "measure_atoms",
                                             "effective_tensor", "fields", "oracle_compare"};

Complex complex_from_json(const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("re") || !j.contains("im"))
        throw ConfigError(path + ": expected an object with \"re\" and \"im\"");
    return {j["re"].get<double>(), j["im"].get<double>()};
}

} // namespace

void ExperimentConfig::validate() const {
    if (d < 2 || d > 3) throw ConfigError("config.d: must be 2 or 3");
    if (L < 1) throw ConfigError("config.L: must be positive");
    if (Lc < 1 || L % Lc != 0) throw ConfigError("config.Lc: must divide L");
    if (samples < 1) throw ConfigError("config.samples: must be >= 1");
    if (bins < 1) throw ConfigError("config.bins: must be >= 1");
    if (e0_axis < 1 || e0_axis > d) throw ConfigError("config.e0_axis: must be in [1,d]");
    if (j < 1 || j > d) throw ConfigError("config.j: must be in [1,d]");
    if (k < 1 || k > d) throw ConfigError("config.k: must be in [1,d]");
    if (threads < 1) throw ConfigError("config.threads: must be >= 1");
    if (sigma2 == Complex(0.0, 0.0)) throw ConfigError("config.sigma2: must be nonzero");
    if (outputs.empty()) throw ConfigError("config.outputs: at least one output is required");
    for (const auto& o : outputs)
        if (!kKnownOutputs.count(o)) throw ConfigError("config.outputs: unknown output \"" + o + "\"");
    if (out_dir.empty()) throw ConfigError("config.out_dir: must not be empty");
}

std::string ExperimentConfig::to_json() const {
    json j;
    j["schema"] = 1;
    j["d"] = d;
    j["L"] = L;
    j["Lc"] = Lc;
    j["samples"] = samples;
    j["bins"] = bins;
    j["seed"] = seed;
    j["sigma1"] = {{"re", sigma1.real()}, {"im", sigma1.imag()}};
    j["sigma2"] = {{"re", sigma2.real()}, {"im", sigma2.imag()}};
    j["e0_axis"] = e0_axis;
    j["j"] = this->j;
    j["k"] = k;
    j["rho_star"] = rho_star;
    j["threads"] = threads;
    j["outputs"] = outputs;
    j["out_dir"] = out_dir;
    if (!proj_cache.empty()) j["proj_cache"] = proj_cache;
    return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    ExperimentConfig c;
    try {
        if (j.contains("schema") && j["schema"].get<int>() != 1)
            throw ConfigError("config.schema: unsupported version");
        if (j.contains("d")) c.d = j["d"].get<int>();
        if (j.contains("L")) c.L = j["L"].get<int>();
        if (j.contains("Lc")) c.Lc = j["Lc"].get<int>();
        if (j.contains("samples")) c.samples = j["samples"].get<int>();
        if (j.contains("bins")) c.bins = j["bins"].get<int>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("sigma1")) c.sigma1 = complex_from_json(j["sigma1"], "config.sigma1");
        if (j.contains("sigma2")) c.sigma2 = complex_from_json(j["sigma2"], "config.sigma2");
        if (j.contains("e0_axis")) c.e0_axis = j["e0_axis"].get<int>();
        if (j.contains("j")) c.j = j["j"].get<int>();
        if (j.contains("k")) c.k = j["k"].get<int>();
        if (j.contains("rho_star")) c.rho_star = j["rho_star"].get<bool>();
        if (j.contains("threads")) c.threads = j["threads"].get<int>();
        if (j.contains("outputs")) c.outputs = j["outputs"].get<std::set<std::string>>();
        if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
        if (j.contains("proj_cache")) c.proj_cache = j["proj_cache"].get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: type error: ") + e.what());
    }
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    return from_json(read_file(path));
}

ProjectionSet get_projections(const ExperimentConfig& config) {
    const LatticeSpec spec = config.lattice();
    if (config.proj_cache.empty()) return build_projections(spec);

    fs::create_directories(config.proj_cache);
    const std::string path =
        (fs::path(config.proj_cache) /
         ("proj_d" + std::to_string(spec.d) + "_L" + std::to_string(spec.L) + ".pxproj"))
            .string();
    if (fs::exists(path)) {
        ProjectionSet ps = ProjectionSet::load(path);
        if (ps.spec.d != spec.d || ps.spec.L != spec.L)
            throw NumericalError("projection cache " + path + " does not match requested lattice");
        ps.spec = spec;  // Gamma/Upsilon depend only on (d, L), not the crystallite tiling
        return ps;
    }
    ProjectionSet ps = build_projections(spec);
    ps.save(path);
    return ps;
}

// ---- run ----------------------------------------------------------------

namespace {

struct SampleOutput {
    bool ok = false;
    std::string error;
    std::vector<double> bins;          // mu_jk mass per bin
    std::vector<Complex> f_gamma;      // row-major d x d F_jk(s); empty if homogeneous
    std::vector<Complex> e_ups;        // row-major d x d E_jk(s) from X2Upsilon (rho_star only)
    double mass = 0.0;
};

// Config echo without execution details (threads, paths): what the artifact
// describes, not where or how it was produced, so identical experiments give
// byte-identical files.
json experiment_echo(const ExperimentConfig& config) {
    json cfg = json::parse(config.to_json());
    cfg.erase("threads");
    cfg.erase("out_dir");
    cfg.erase("proj_cache");
    return cfg;
}

std::string artifact_header(const ExperimentConfig& config, const std::string& kind) {
    // comment header so every CSV is regenerable from its own bytes
    json meta;
    meta["schema"] = 1;
    meta["kind"] = kind;
    meta["config"] = experiment_echo(config);
    std::string line = "# polyxtal " + meta.dump() + "\n";
    return line;
}

void write_artifact(std::vector<std::string>& artifacts, const std::string& dir,
                    const std::string& name, const std::string& body) {
    const std::string path = (fs::path(dir) / name).string();
    write_file(path, body);
    artifacts.push_back(path);
}

} // namespace

RunResult run(const ExperimentConfig& config) {
    config.validate();
    const LatticeSpec spec = config.lattice();
    const ContrastParams cp = config.contrast();
    const bool want_sf = config.outputs.count("spectral_function") > 0;
    const bool want_atoms = config.outputs.count("measure_atoms") > 0;
    const bool want_tensor = config.outputs.count("effective_tensor") > 0;
    const bool want_fields = config.outputs.count("fields") > 0;
    const bool want_oracle = config.outputs.count("oracle_compare") > 0;

    fs::create_directories(config.out_dir);
    RunResult result;

    const bool need_ensemble = want_sf || want_tensor;
    ProjectionSet P;
    if (need_ensemble || want_atoms || want_fields) P = get_projections(config);

    if (need_ensemble) {
        auto one_sample = [&](int sample_id) {
            SampleOutput out;
            try {
                const auto field = sample_orientations(spec, config.seed, sample_id);
                const auto ind = realize_indicators(field);
                const auto eig = eig_block(reduced_block(ind, P, BlockKind::X1Gamma),
                                           BlockKind::X1Gamma);
                const auto measure = measure_atoms(eig, ind, config.j, config.k);
                out.mass = measure.mass();
                out.bins.assign(config.bins, 0.0);
                bin_measure(measure, config.bins, out.bins);
                if (want_tensor && !cp.homogeneous()) {
                    const auto set = MeasureSet::build(eig, ind);
                    const Complex s = cp.s();
                    for (int jj = 1; jj <= spec.d; ++jj)
                        for (int kk = 1; kk <= spec.d; ++kk)
                            out.f_gamma.push_back(stieltjes_eval(set.at(jj, kk), s));
                    if (config.rho_star) {
                        const auto ups2 = eig_block(
                            reduced_block(ind, P, BlockKind::X2Upsilon), BlockKind::X2Upsilon);
                        const auto eset = MeasureSet::build(ups2, ind);
                        for (int jj = 1; jj <= spec.d; ++jj)
                            for (int kk = 1; kk <= spec.d; ++kk)
                                out.e_ups.push_back(stieltjes_eval(eset.at(jj, kk), s));
                    }
                }
                out.ok = true;
            } catch (const std::exception& e) {
                out.ok = false;
                out.error = e.what();
            }
            return out;
        };
        const auto per_sample =
            map_indexed<SampleOutput>(config.samples, config.threads, one_sample);

        long ok_count = 0;
        for (int i = 0; i < config.samples; ++i) {
            if (!per_sample[i].ok)
                result.quarantined.emplace_back(i, per_sample[i].error);
            else
                ++ok_count;
        }
        if (ok_count == 0) throw NumericalError("run: every sample failed; first error: " +
                                                result.quarantined.front().second);

        if (want_sf) {
            SpectralFunction fn;
            fn.bins = config.bins;
            fn.sample_count = ok_count;
            fn.mass.assign(config.bins, 0.0);
            double mean_mass = 0.0;
            for (const auto& sample : per_sample) {  // ordered fold
                if (!sample.ok) continue;
                for (int b = 0; b < config.bins; ++b) fn.mass[b] += sample.bins[b];
                mean_mass += sample.mass;
            }
            for (int b = 0; b < config.bins; ++b) fn.mass[b] /= static_cast<double>(ok_count);
            mean_mass /= static_cast<double>(ok_count);

            std::string body = artifact_header(config, "spectral_function") + fn.to_csv();
            write_artifact(result.artifacts, config.out_dir, "spectral_function.csv", body);

            json meta;
            meta["schema"] = 1;
            meta["kind"] = "spectral_function";
            meta["config"] = json::parse(config.to_json());
            meta["content_hash"] = content_hash(body);
            meta["samples_ok"] = ok_count;
            meta["mean_mass"] = mean_mass;
            write_artifact(result.artifacts, config.out_dir, "spectral_function.meta.json",
                           meta.dump(2) + "\n");
        }

        if (want_tensor) {
            EffectiveTensor sigma_star;
            sigma_star.kind = TensorKind::Conductivity;
            sigma_star.contrast = cp;
            sigma_star.provenance = "ensemble:" + std::to_string(ok_count);
            if (cp.homogeneous()) {
                sigma_star.m = cp.sigma1 * Eigen::MatrixXcd::Identity(spec.d, spec.d);
            } else {
                Eigen::MatrixXcd f_mean = Eigen::MatrixXcd::Zero(spec.d, spec.d);
                for (const auto& sample : per_sample) {
                    if (!sample.ok) continue;
                    for (int jj = 0; jj < spec.d; ++jj)
                        for (int kk = 0; kk < spec.d; ++kk)
                            f_mean(jj, kk) += sample.f_gamma[jj * spec.d + kk];
                }
                f_mean /= static_cast<double>(ok_count);
                sigma_star.m.resize(spec.d, spec.d);
                for (int jj = 0; jj < spec.d; ++jj)
                    for (int kk = 0; kk < spec.d; ++kk)
                        sigma_star.m(jj, kk) = cp.sigma2 * ((jj == kk ? 1.0 : 0.0) - f_mean(jj, kk));
            }
            json record = json::parse(sigma_star.to_json());
            record["config"] = experiment_echo(config);
            record["samples_ok"] = ok_count;
            record["per_sample_seeds"] = [&] {
                json arr = json::array();
                for (int i = 0; i < config.samples; ++i) {
                    char buf[20];
                    std::snprintf(buf, sizeof(buf), "%016llx",
                                  static_cast<unsigned long long>(
                                      CounterRng::stream_id(config.seed, i)));
                    arr.push_back(buf);
                }
                return arr;
            }();
            if (config.rho_star && !cp.homogeneous()) {
                Eigen::MatrixXcd e_mean = Eigen::MatrixXcd::Zero(spec.d, spec.d);
                for (const auto& sample : per_sample) {
                    if (!sample.ok) continue;
                    for (int jj = 0; jj < spec.d; ++jj)
                        for (int kk = 0; kk < spec.d; ++kk)
                            e_mean(jj, kk) += sample.e_ups[jj * spec.d + kk];
                }
                e_mean /= static_cast<double>(ok_count);
                json re = json::array(), im = json::array();
                for (int jj = 0; jj < spec.d; ++jj) {
                    json rr = json::array(), ri = json::array();
                    for (int kk = 0; kk < spec.d; ++kk) {
                        const Complex v = ((jj == kk ? 1.0 : 0.0) - e_mean(jj, kk)) / cp.sigma1;
                        rr.push_back(v.real());
                        ri.push_back(v.imag());
                    }
                    re.push_back(rr);
                    im.push_back(ri);
                }
                record["rho_star_re"] = re;
                record["rho_star_im"] = im;
            }
            const std::string body = record.dump(2) + "\n";
            write_artifact(result.artifacts, config.out_dir, "effective_tensor.json", body);
        }
    }

    if (want_atoms || want_fields) {
        // single-realization outputs use sample_id 0
        const auto field = sample_orientations(spec, config.seed, 0);
        const auto ind = realize_indicators(field);
        const auto eig = eig_block(reduced_block(ind, P, BlockKind::X1Gamma), BlockKind::X1Gamma);

        if (want_atoms) {
            auto measure = measure_atoms(eig, ind, config.j, config.k);
            measure.provenance = "sample:0";
            const std::string body = artifact_header(config, "measure_atoms") + measure.to_csv();
            write_artifact(result.artifacts, config.out_dir, "measure_atoms.csv", body);
            json meta = json::parse(measure.to_json(spec, config.seed, 1, config.bins));
            meta["config"] = json::parse(config.to_json());
            meta["content_hash"] = content_hash(body);
            write_artifact(result.artifacts, config.out_dir, "measure_atoms.meta.json",
                           meta.dump(2) + "\n");
            write_artifact(result.artifacts, config.out_dir, "orientations_s0.json",
                           field.to_json() + "\n");
        }

        if (want_fields) {
            const auto x1e = resolve_X1E(eig, ind, cp, config.e0_axis, Complex(1.0, 0.0));
            const auto ej = assemble_E_J(x1e, ind, P, cp, config.e0_axis, Complex(1.0, 0.0));
            const std::string mag_body =
                artifact_header(config, "fields_J_mag") + ej.J.magnitude_csv();
            write_artifact(result.artifacts, config.out_dir, "fields_J_mag.csv", mag_body);
            write_artifact(result.artifacts, config.out_dir, "fields_E.csv",
                           artifact_header(config, "fields_E") + ej.E.to_csv());
            write_artifact(result.artifacts, config.out_dir, "fields_J.csv",
                           artifact_header(config, "fields_J") + ej.J.to_csv());
            ej.E.save_binary((fs::path(config.out_dir) / "fields_E.bin").string());
            ej.J.save_binary((fs::path(config.out_dir) / "fields_J.bin").string());
            result.artifacts.push_back((fs::path(config.out_dir) / "fields_E.bin").string());
            result.artifacts.push_back((fs::path(config.out_dir) / "fields_J.bin").string());
        }
    }

    if (want_oracle) {
        const auto report = compare_against_oracle(config);
        write_artifact(result.artifacts, config.out_dir, "oracle_compare.json",
                       report.to_json(config));
    }

    // master metadata record
    {
        json meta;
        meta["schema"] = 1;
        meta["kind"] = "run";
        meta["config"] = json::parse(config.to_json());
        json q = json::array();
        for (const auto& [id, why] : result.quarantined) q.push_back({{"sample", id}, {"reason", why}});
        meta["quarantined"] = q;
        json arts = json::array();
        for (const auto& a : result.artifacts) {
            if (a.ends_with(".bin"))
                arts.push_back({{"path", fs::path(a).filename().string()}});
            else
                arts.push_back({{"path", fs::path(a).filename().string()},
                                {"content_hash", content_hash(read_file(a))}});
        }
        meta["artifacts"] = arts;
        const std::string path = (fs::path(config.out_dir) / "run.json").string();
        write_file(path, meta.dump(2) + "\n");
        result.artifacts.push_back(path);
    }

    result.exit_code = result.quarantined.empty() ? 0 : 4;
    return result;
}

// ---- oracle comparison ---------------------------------------------------

namespace {

double rel_inf_err(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    const double scale = b.cwiseAbs().maxCoeff();
    if (scale == 0.0) return a.cwiseAbs().maxCoeff();
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

} // namespace

OracleReport compare_against_oracle(const ExperimentConfig& config) {
    config.validate();
    const LatticeSpec spec = config.lattice();
    const ContrastParams cp = config.contrast();
    ProjectionSet P = get_projections(config);

    struct Cmp {
        OracleReport::Row row;
        std::string error;
        bool ok = false;
    };
    auto one_sample = [&](int sample_id) {
        Cmp out;
        try {
            const auto field = sample_orientations(spec, config.seed, sample_id);
            const auto ind = realize_indicators(field);

            // spectral path
            Eigen::MatrixXcd sigma_spec(spec.d, spec.d);
            FieldGrid e_spec{spec, FieldLabel::E, {}}, j_spec{spec, FieldLabel::J, {}};
            if (cp.homogeneous()) {
                sigma_spec = cp.sigma1 * Eigen::MatrixXcd::Identity(spec.d, spec.d);
                e_spec = constant_field(spec, FieldLabel::E, config.e0_axis, Complex(1.0, 0.0));
                j_spec = e_spec;
                j_spec.label = FieldLabel::J;
                j_spec.values *= cp.sigma1;
            } else {
                const auto eig =
                    eig_block(reduced_block(ind, P, BlockKind::X1Gamma), BlockKind::X1Gamma);
                sigma_spec = effective_conductivity(MeasureSet::build(eig, ind), cp).m;
                const auto x1e = resolve_X1E(eig, ind, cp, config.e0_axis, Complex(1.0, 0.0));
                auto ej = assemble_E_J(x1e, ind, P, cp, config.e0_axis, Complex(1.0, 0.0));
                e_spec = std::move(ej.E);
                j_spec = std::move(ej.J);
            }

            // direct path, one solve per column
            Eigen::MatrixXcd sigma_dir(spec.d, spec.d);
            FieldGrid e_dir{spec, FieldLabel::E, {}}, j_dir{spec, FieldLabel::J, {}};
            for (int k = 1; k <= spec.d; ++k) {
                auto sol = solve_direct(ind, cp, k);
                sigma_dir.col(k - 1) = sol.sigma_star_col;
                if (k == config.e0_axis) {
                    e_dir = std::move(sol.E);
                    j_dir = std::move(sol.J);
                }
            }

            out.row.sample_id = sample_id;
            out.row.sigma11_rel = std::abs(sigma_spec(0, 0) - sigma_dir(0, 0)) /
                                  std::abs(sigma_dir(0, 0));
            out.row.sigma_max_rel = (sigma_spec - sigma_dir).cwiseAbs().maxCoeff() /
                                    sigma_dir.cwiseAbs().maxCoeff();
            out.row.e_rel = rel_inf_err(e_spec.values, e_dir.values);
            out.row.j_rel = rel_inf_err(j_spec.values, j_dir.values);
            out.ok = true;
        } catch (const std::exception& e) {
            out.error = e.what();
        }
        return out;
    };
    const auto per_sample = map_indexed<Cmp>(config.samples, config.threads, one_sample);

    OracleReport report;
    for (const auto& c : per_sample) {
        if (!c.ok)
            throw NumericalError("compare_against_oracle: sample failed: " + c.error);
        report.rows.push_back(c.row);
        report.max_sigma11_rel = std::max(report.max_sigma11_rel, c.row.sigma11_rel);
        report.mean_sigma11_rel += c.row.sigma11_rel;
        report.max_sigma_rel = std::max(report.max_sigma_rel, c.row.sigma_max_rel);
        report.max_e_rel = std::max(report.max_e_rel, c.row.e_rel);
        report.max_j_rel = std::max(report.max_j_rel, c.row.j_rel);
    }
    report.mean_sigma11_rel /= static_cast<double>(report.rows.size());
    return report;
}

std::string OracleReport::to_json(const ExperimentConfig& config) const {
    json j;
    j["schema"] = 1;
    j["kind"] = "oracle_compare";
    j["config"] = json::parse(config.to_json());
    j["max_sigma11_rel"] = max_sigma11_rel;
    j["mean_sigma11_rel"] = mean_sigma11_rel;
    j["max_sigma_rel"] = max_sigma_rel;
    j["max_e_rel"] = max_e_rel;
    j["max_j_rel"] = max_j_rel;
    json rows_json = json::array();
    for (const auto& r : rows)
        rows_json.push_back({{"sample", r.sample_id},
                             {"sigma11_rel", r.sigma11_rel},
                             {"sigma_max_rel", r.sigma_max_rel},
                             {"e_rel", r.e_rel},
                             {"j_rel", r.j_rel}});
    j["rows"] = rows_json;
    return j.dump(2) + "\n";
}

std::string OracleReport::to_table() const {
    char buf[160];
    std::string out = "sample  sigma11_rel    sigma_max_rel  e_rel          j_rel\n";
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%-7d %-14.3e %-14.3e %-14.3e %-14.3e\n", r.sample_id,
                      r.sigma11_rel, r.sigma_max_rel, r.e_rel, r.j_rel);
        out += buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "max:    %-14.3e %-14.3e %-14.3e %-14.3e  (mean sigma11: %.3e)\n",
                  max_sigma11_rel, max_sigma_rel, max_e_rel, max_j_rel, mean_sigma11_rel);
    out += buf;
    return out;
}

} // namespace polyxtal
