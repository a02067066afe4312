#include "nhsl/cli.hpp"
#include "nhsl/errors.hpp"
#include "nhsl/run.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <string>

namespace nhsl::cli {

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<double> kappa;
    std::optional<std::string> rho;
    std::optional<std::string> method;
    std::optional<std::string> out;
    std::optional<int> threads;
    bool plots = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "configuration file (YAML)")->required();
    cmd->add_option("--kappa", o.kappa, "localizer tuning parameter");
    cmd->add_option("--rho", o.rho, "truncation radius or 'full'");
    cmd->add_option("--method", o.method, "signature method: eig, rh, flow");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--threads", o.threads, "worker threads (0 = logical cores)");
    cmd->add_flag("--plots", o.plots, "emit raster heat maps");
}

RunConfig make_config(const CommonOpts& o) {
    RunConfig cfg = load_config(o.config_path);
    if (o.kappa) cfg.kappa = *o.kappa;
    if (o.rho) {
        if (*o.rho == "full") cfg.rho.reset();
        else cfg.rho = std::stod(*o.rho);
    }
    if (o.method) {
        if (*o.method == "eig") cfg.method = SigMethod::EigenCount;
        else if (*o.method == "rh") cfg.method = SigMethod::RouthHurwitz;
        else if (*o.method == "flow") cfg.method = SigMethod::SpectralFlow;
        else throw config_error("method must be one of eig, rh, flow");
    }
    if (o.out) cfg.output_dir = *o.out;
    if (o.threads) cfg.threads = *o.threads;
    if (o.plots) cfg.emit_plots = true;
    cfg.validate();
    return cfg;
}

} // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"non-hermitian spectral localizer toolkit"};
    app.require_subcommand(1);

    CommonOpts optIndex, optGap, optSpec, optLdos, optFlow, optCert, optChiral;
    std::string spectrum_target = "hamiltonian";
    double probe_x = 0.0, probe_y = 0.0;
    bool probe_given = false;
    FlowPathSpec flow_path;

    CLI::App* cIndex = app.add_subcommand("index-map", "half-signature over the probe grid");
    add_common(cIndex, optIndex);
    CLI::App* cGap = app.add_subcommand("gap-map", "localizer line-gap over the probe grid");
    add_common(cGap, optGap);
    CLI::App* cSpec = app.add_subcommand("spectrum", "complex eigenvalues of H or a localizer");
    add_common(cSpec, optSpec);
    cSpec->add_option("--target", spectrum_target, "hamiltonian or localizer");
    auto* px = cSpec->add_option("--probe-x", probe_x, "localizer probe x");
    cSpec->add_option("--probe-y", probe_y, "localizer probe y");
    CLI::App* cLdos = app.add_subcommand("ldos", "local density of states");
    add_common(cLdos, optLdos);
    CLI::App* cFlow = app.add_subcommand("flow", "spectral flow along a horizontal probe path");
    add_common(cFlow, optFlow);
    cFlow->add_option("--x-start", flow_path.x_start, "path start")->required();
    cFlow->add_option("--x-end", flow_path.x_end, "path end")->required();
    cFlow->add_option("--y", flow_path.y, "path height");
    cFlow->add_option("--steps", flow_path.steps, "base samples along the path");
    CLI::App* cCert = app.add_subcommand("certify", "tuning-bound certificate for kappa, rho");
    add_common(cCert, optCert);
    CLI::App* cChiral = app.add_subcommand("chiral", "odd-dimensional chiral pipeline");
    add_common(cChiral, optChiral);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (cIndex->parsed()) {
            const auto res = cmd_index_map(make_config(optIndex));
            std::printf("index-map: %zu probes, %.1f ms total\n", res.points.size(),
                        res.total_ms);
        } else if (cGap->parsed()) {
            const auto res = cmd_gap_map(make_config(optGap));
            std::printf("gap-map: %zu probes, %.1f ms total\n", res.points.size(), res.total_ms);
        } else if (cSpec->parsed()) {
            SpectrumTarget target;
            if (spectrum_target == "hamiltonian") target = SpectrumTarget::Hamiltonian;
            else if (spectrum_target == "localizer") target = SpectrumTarget::Localizer;
            else throw config_error("spectrum target must be hamiltonian or localizer");
            probe_given = px->count() > 0;
            std::optional<Eigen::Vector2d> probe;
            if (probe_given) probe = Eigen::Vector2d(probe_x, probe_y);
            const auto ev = cmd_spectrum(make_config(optSpec), target, probe);
            std::printf("spectrum: %zu eigenvalues\n", ev.size());
        } else if (cLdos->parsed()) {
            const auto v = cmd_ldos(make_config(optLdos));
            std::printf("ldos: %zu sites\n", v.size());
        } else if (cFlow->parsed()) {
            const auto flow = cmd_flow(make_config(optFlow), flow_path);
            std::printf("flow: net %d over %zu crossings%s\n", flow.net_flow,
                        flow.crossings.size(), flow.mismatch ? " (endpoint mismatch)" : "");
        } else if (cCert->parsed()) {
            const auto cert = cmd_certify(make_config(optCert));
            std::printf("certify: g=%.6g |H|=%.6g |Im H|=%.6g N=%.6g kappa_max=%.6g "
                        "rho_min=%.6g kappa_ok=%d rho_ok=%d\n",
                        cert.g, cert.h_norm, cert.im_h_norm, cert.n_const, cert.kappa_max,
                        cert.rho_min, cert.kappa_satisfied ? 1 : 0, cert.rho_satisfied ? 1 : 0);
        } else if (cChiral->parsed()) {
            const auto rep = cmd_chiral(make_config(optChiral));
            std::printf("chiral: half_sig=%d ind(A)=%d ind(B)=%d ind(V)=%d line_gap=%.6g\n",
                        rep.half_signature, rep.ind_a, rep.ind_b, rep.ind_v, rep.line_gap);
        }
    } catch (const validation_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const config_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}

} // namespace nhsl::cli
