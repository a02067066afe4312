#include "nhsl/run.hpp"
#include "nhsl/dense.hpp"
#include "nhsl/errors.hpp"
#include "nhsl/invariants.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <thread>

namespace nhsl::cli {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void parallel_for(int n_tasks, int threads, const std::function<void(int)>& task) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n_tasks));
    if (threads == 1) {
        for (int i = 0; i < n_tasks; ++i) task(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < n_tasks; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::filesystem::path resolve_output_dir(const RunConfig& cfg) {
    if (const char* env = std::getenv("NHSL_OUTPUT_DIR"); env && *env)
        return std::filesystem::path(env);
    return cfg.output_dir;
}

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw error("cannot write " + (dir / name).string());
    return os;
}

void echo_config(const RunConfig& cfg, const std::filesystem::path& dir) {
    auto os = open_output(dir, "config_echo.yaml");
    write_config_echo(cfg, os);
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Minimal PPM heat map, cosmetic output only.
void write_heatmap_ppm(const std::filesystem::path& file, const Grid& grid,
                       const std::vector<double>& values) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : values)
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (!(hi > lo)) hi = lo + 1.0;
    const int anchors[5][3] = {
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
    std::ofstream os(file, std::ios::binary);
    os << "P6\n" << grid.nx << ' ' << grid.ny << "\n255\n";
    for (int j = grid.ny - 1; j >= 0; --j)
        for (int i = 0; i < grid.nx; ++i) {
            const double v = values[static_cast<size_t>(j) * grid.nx + i];
            double u = std::isfinite(v) ? (v - lo) / (hi - lo) : 0.0;
            u = std::clamp(u, 0.0, 1.0) * 4.0;
            const int k = std::min(3, static_cast<int>(u));
            const double frac = u - k;
            for (int c = 0; c < 3; ++c) {
                const double col = anchors[k][c] + frac * (anchors[k + 1][c] - anchors[k][c]);
                os.put(static_cast<char>(std::lround(col)));
            }
        }
}

} // namespace

BuiltModel build_model(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.lattice == LatticeKind::Heterostructure) {
        LatticeGeometry geom = model::build_honeycomb(cfg.hetero);
        SparseComplexMatrix h = model::assemble_haldane(geom, cfg.hetero);
        return {std::move(geom), std::move(h), std::nullopt};
    }
    auto chain = model::build_chiral_chain(cfg.chain.n_cells, cfg.chain.intra, cfg.chain.inter,
                                           cfg.chain.disorder, cfg.chain.seed);
    return {std::move(chain.geometry), std::move(chain.hamiltonian),
            std::move(chain.chiral_operator)};
}

double flow_reference_offset(const RunConfig& cfg) {
    const double r = cfg.hetero.outer_radius;
    const double rho_eff = cfg.rho.value_or(r);
    return 2.0 * r + 2.0 * rho_eff;
}

signature::SignatureReport probe_signature(const RunConfig& cfg, const BuiltModel& model,
                                           const Eigen::Vector2d& probe) {
    const auto loc =
        localizer::assemble_even_localizer(model.hamiltonian, model.geometry, cfg.kappa, probe,
                                           cfg.rho);
    switch (cfg.method) {
    case SigMethod::EigenCount:
        return signature::sig_eigencount(loc);
    case SigMethod::RouthHurwitz: {
        auto rep = signature::sig_routh_hurwitz(loc);
        rep.line_gap = signature::localizer_line_gap(loc);
        return rep;
    }
    case SigMethod::SpectralFlow: {
        // path to the zero-signature reference: shift only the Dirac diagonal,
        // the window stays frozen at the probe's
        const double offset = flow_reference_offset(cfg);
        const auto path = [&](double t) {
            Matrix m = loc.matrix;
            const Eigen::Index half = loc.grading_size;
            const cd shift(t * offset, 0.0);
            for (Eigen::Index k = 0; k < half; ++k) {
                m(k, half + k) -= cfg.kappa * shift; // conj(D0 - t T) diagonal
                m(half + k, k) -= cfg.kappa * shift;
            }
            return m;
        };
        const int steps = std::max(21, static_cast<int>(offset * cfg.kappa * 10.0));
        const auto flow = signature::spectral_flow(path, steps);
        signature::SignatureReport rep;
        rep.method = signature::Method::SpectralFlow;
        rep.signature = -2 * flow.net_flow; // Sig(ref) = 0
        rep.line_gap = signature::localizer_line_gap(loc);
        rep.residual = flow.mismatch ? 1.0 : 0.0;
        return rep;
    }
    }
    throw config_error("unknown signature method");
}

MapResult evaluate_map(const RunConfig& cfg, const BuiltModel& model, bool with_signature) {
    if (cfg.lattice != LatticeKind::Heterostructure)
        throw config_error("probe maps require the heterostructure lattice");
    MapResult res;
    res.grid = cfg.grid;
    res.points.resize(static_cast<size_t>(cfg.grid.nx) * cfg.grid.ny);
    const auto t_total = Clock::now();
    parallel_for(static_cast<int>(res.points.size()), cfg.threads, [&](int idx) {
        const int i = idx % cfg.grid.nx;
        const int j = idx / cfg.grid.nx;
        const auto t0 = Clock::now();
        MapPoint pt;
        pt.x = cfg.grid.x_at(i);
        pt.y = cfg.grid.y_at(j);
        const Eigen::Vector2d probe(pt.x, pt.y);
        if (with_signature) {
            const auto rep = probe_signature(cfg, model, probe);
            pt.line_gap = rep.line_gap.value_or(0.0);
            if (!rep.gap_closed) pt.half_signature = rep.signature / 2;
        } else {
            const auto loc = localizer::assemble_even_localizer(model.hamiltonian, model.geometry,
                                                                cfg.kappa, probe, cfg.rho);
            pt.line_gap = signature::localizer_line_gap(loc);
        }
        pt.ms = ms_since(t0);
        res.points[static_cast<size_t>(idx)] = pt;
    });
    res.total_ms = ms_since(t_total);
    return res;
}

namespace {

void write_map_files(const RunConfig& cfg, const MapResult& res, const std::string& stem,
                     bool with_signature) {
    const auto dir = resolve_output_dir(cfg);
    echo_config(cfg, dir);
    // the map CSV is deterministic; per-point timings go to a sidecar file
    auto os = open_output(dir, stem + ".csv");
    os << (with_signature ? "x,y,half_sig,gap\n" : "x,y,gap\n");
    auto ts = open_output(dir, stem + "_timing.csv");
    ts << "x,y,ms\n";
    for (const auto& p : res.points) {
        os << fmt17(p.x) << ',' << fmt17(p.y);
        if (with_signature) {
            os << ',';
            if (p.half_signature) os << *p.half_signature;
            else os << "gap-closed";
        }
        os << ',' << fmt17(p.line_gap) << '\n';
        ts << fmt17(p.x) << ',' << fmt17(p.y) << ',' << fmt17(p.ms) << '\n';
    }

    nlohmann::ordered_json summary;
    summary["command"] = stem;
    summary["grid"] = {{"nx", res.grid.nx}, {"ny", res.grid.ny},
                       {"x_min", res.grid.x_min}, {"x_max", res.grid.x_max},
                       {"y_min", res.grid.y_min}, {"y_max", res.grid.y_max}};
    summary["kappa"] = cfg.kappa;
    summary["rho"] = cfg.rho ? nlohmann::ordered_json(*cfg.rho) : nlohmann::ordered_json("full");
    summary["method"] = cfg.method == SigMethod::EigenCount
                            ? "eig"
                            : cfg.method == SigMethod::RouthHurwitz ? "rh" : "flow";
    summary["points"] = res.points.size();
    summary["total_ms"] = res.total_ms;
    if (with_signature) {
        std::map<std::string, int> counts;
        for (const auto& p : res.points)
            ++counts[p.half_signature ? std::to_string(*p.half_signature) : "gap-closed"];
        summary["half_signature_counts"] = counts;
    }
    double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
    for (const auto& p : res.points) {
        gmin = std::min(gmin, p.line_gap);
        gmax = std::max(gmax, p.line_gap);
    }
    summary["gap_min"] = gmin;
    summary["gap_max"] = gmax;
    auto js = open_output(dir, stem + "_summary.json");
    js << summary.dump(2) << '\n';

    if (cfg.emit_plots) {
        std::vector<double> gaps, sigs;
        for (const auto& p : res.points) {
            gaps.push_back(p.line_gap);
            if (with_signature) sigs.push_back(p.half_signature ? *p.half_signature : 0.0);
        }
        write_heatmap_ppm(dir / (stem + "_gap.ppm"), res.grid, gaps);
        if (with_signature) write_heatmap_ppm(dir / (stem + "_index.ppm"), res.grid, sigs);
    }
}

} // namespace

MapResult cmd_index_map(const RunConfig& cfg) {
    const BuiltModel model = build_model(cfg);
    MapResult res = evaluate_map(cfg, model, true);
    write_map_files(cfg, res, "index_map", true);
    return res;
}

MapResult cmd_gap_map(const RunConfig& cfg) {
    const BuiltModel model = build_model(cfg);
    MapResult res = evaluate_map(cfg, model, false);
    write_map_files(cfg, res, "gap_map", false);
    return res;
}

std::vector<cd> cmd_spectrum(const RunConfig& cfg, SpectrumTarget target,
                             std::optional<Eigen::Vector2d> probe) {
    const BuiltModel model = build_model(cfg);
    std::vector<cd> ev;
    if (target == SpectrumTarget::Hamiltonian) {
        ev = dense::eigenvalues(model.hamiltonian.dense());
    } else {
        const Eigen::Vector2d p = probe.value_or(Eigen::Vector2d(
            0.5 * (cfg.grid.x_min + cfg.grid.x_max), 0.5 * (cfg.grid.y_min + cfg.grid.y_max)));
        const auto loc = localizer::assemble_even_localizer(model.hamiltonian, model.geometry,
                                                            cfg.kappa, p, cfg.rho);
        ev = dense::eigenvalues(loc.matrix);
    }
    std::sort(ev.begin(), ev.end(), [](const cd& a, const cd& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    const auto dir = resolve_output_dir(cfg);
    echo_config(cfg, dir);
    auto os = open_output(dir, target == SpectrumTarget::Hamiltonian ? "spectrum_hamiltonian.csv"
                                                                     : "spectrum_localizer.csv");
    os << "re,im\n";
    for (const cd& w : ev) os << fmt17(w.real()) << ',' << fmt17(w.imag()) << '\n';
    return ev;
}

std::vector<double> cmd_ldos(const RunConfig& cfg) {
    if (!cfg.ldos) throw config_error("ldos command needs the 'ldos' config section");
    const BuiltModel model = build_model(cfg);
    const double t_scale = cfg.lattice == LatticeKind::Heterostructure
                               ? cfg.hetero.core.t
                               : std::abs(cfg.chain.intra);
    const double eta = cfg.ldos->eta.value_or(0.05 * (t_scale > 0.0 ? t_scale : 1.0));
    const double energy = cfg.ldos->energy;

    Matrix m = -model.hamiltonian.dense();
    m.diagonal().array() += cd(energy, eta);
    dense::LuFactor lu(std::move(m));
    if (lu.rcond() < 1e-14)
        throw numerical_error("ldos: E + i eta is numerically an eigenvalue; perturb eta");
    const Matrix g = lu.solve(Matrix::Identity(model.geometry.dimension(),
                                               model.geometry.dimension()));

    const int oc = model.geometry.orbital_count();
    std::vector<double> ldos(static_cast<size_t>(model.geometry.site_count()));
    for (Eigen::Index i = 0; i < model.geometry.site_count(); ++i) {
        double v = 0.0;
        for (int o = 0; o < oc; ++o) v += g(i * oc + o, i * oc + o).imag();
        ldos[static_cast<size_t>(i)] = -v / std::numbers::pi;
    }
    const auto dir = resolve_output_dir(cfg);
    echo_config(cfg, dir);
    auto os = open_output(dir, "ldos.csv");
    os << "site,x,y,ldos\n";
    for (Eigen::Index i = 0; i < model.geometry.site_count(); ++i) {
        const auto& p = model.geometry.site(i).position;
        os << i << ',' << fmt17(p.x()) << ',' << fmt17(p.y()) << ','
           << fmt17(ldos[static_cast<size_t>(i)]) << '\n';
    }
    return ldos;
}

signature::FlowDiagram cmd_flow(const RunConfig& cfg, const FlowPathSpec& path) {
    if (cfg.lattice != LatticeKind::Heterostructure)
        throw config_error("flow command requires the heterostructure lattice");
    if (path.steps < 2) throw validation_error("flow needs at least 2 steps");
    const BuiltModel model = build_model(cfg);
    // fixed window anchored at the path start; only the Dirac diagonal moves
    const Eigen::Vector2d start(path.x_start, path.y);
    const auto base = localizer::assemble_even_localizer(model.hamiltonian, model.geometry,
                                                         cfg.kappa, start, cfg.rho);
    const double span = path.x_end - path.x_start;
    const auto matrix_at = [&](double t) {
        Matrix m = base.matrix;
        const Eigen::Index half = base.grading_size;
        const cd shift(t * span, 0.0);
        for (Eigen::Index k = 0; k < half; ++k) {
            m(k, half + k) -= cfg.kappa * shift;
            m(half + k, k) -= cfg.kappa * shift;
        }
        return m;
    };
    const auto flow = signature::spectral_flow(matrix_at, path.steps);
    const auto dir = resolve_output_dir(cfg);
    echo_config(cfg, dir);
    auto ts = open_output(dir, "flow_tracks.csv");
    flow.write_tracks_csv(ts);
    auto cs = open_output(dir, "flow_crossings.csv");
    flow.write_crossings_csv(cs);
    return flow;
}

localizer::HypothesisCertificate cmd_certify(const RunConfig& cfg) {
    const BuiltModel model = build_model(cfg);
    const double g = model::estimate_line_gap(model.hamiltonian);
    if (g < model::no_gap_threshold)
        throw domain_error("certify: no line-gap detected for this model");
    const Eigen::Vector2d probe(0.0, 0.0);
    const auto cert = localizer::certify_hypotheses(model.hamiltonian, model.geometry, cfg.kappa,
                                                    cfg.rho, probe, g);
    nlohmann::ordered_json j;
    j["g"] = cert.g;
    j["h_norm"] = cert.h_norm;
    j["im_h_norm"] = cert.im_h_norm;
    j["commutator_d"] = cert.commutator_d;
    j["commutator_abs_d"] = cert.commutator_abs_d;
    j["n_const"] = cert.n_const;
    j["kappa"] = cfg.kappa;
    j["kappa_max"] = std::isfinite(cert.kappa_max) ? nlohmann::ordered_json(cert.kappa_max)
                                                   : nlohmann::ordered_json("inf");
    j["rho"] = cfg.rho ? nlohmann::ordered_json(*cfg.rho) : nlohmann::ordered_json("full");
    j["rho_min"] = cert.rho_min;
    j["kappa_satisfied"] = cert.kappa_satisfied;
    j["rho_satisfied"] = cert.rho_satisfied;
    const auto dir = resolve_output_dir(cfg);
    echo_config(cfg, dir);
    auto os = open_output(dir, "certificate.json");
    os << j.dump(2) << '\n';
    return cert;
}

ChiralReport cmd_chiral(const RunConfig& cfg) {
    if (cfg.lattice != LatticeKind::Chain)
        throw config_error("chiral command requires the chain lattice");
    const BuiltModel model = build_model(cfg);
    ChiralReport rep;
    rep.line_gap = model::estimate_line_gap(model.hamiltonian);

    const double probe_x = 0.5 * (cfg.grid.x_min + cfg.grid.x_max);
    const auto loc = localizer::assemble_odd_localizer(model.hamiltonian, *model.chiral_operator,
                                                       model.geometry, cfg.kappa, probe_x, cfg.rho);
    const auto sig = signature::sig_eigencount(loc);
    rep.half_signature = sig.gap_closed ? 0 : sig.signature / 2;

    const Eigen::Index n = model.geometry.site_count();
    const Matrix hd = model.hamiltonian.dense();
    Matrix a(n, n), b(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) {
            a(r, c) = hd(2 * r + 1, 2 * c);
            b(r, c) = hd(2 * r, 2 * c + 1);
        }
    Eigen::VectorXd xs(n);
    for (Eigen::Index i = 0; i < n; ++i) xs[i] = model.geometry.site(i).position.x();
    const auto triple = invariants::chiral_winding(a, b, xs, cfg.kappa, probe_x, cfg.rho);
    rep.ind_a = triple.ind_a;
    rep.ind_b = triple.ind_b;
    rep.ind_v = triple.ind_v;

    nlohmann::ordered_json j;
    j["half_signature"] = rep.half_signature;
    j["ind_a"] = rep.ind_a;
    j["ind_b"] = rep.ind_b;
    j["ind_v"] = rep.ind_v;
    j["line_gap"] = rep.line_gap;
    const auto dir = resolve_output_dir(cfg);
    echo_config(cfg, dir);
    auto os = open_output(dir, "chiral.json");
    os << j.dump(2) << '\n';
    return rep;
}

} // namespace nhsl::cli
