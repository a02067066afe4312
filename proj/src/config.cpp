#include "nhsl/config.hpp"
#include "nhsl/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace nhsl::cli {

void Grid::validate() const {
    if (nx < 1 || ny < 1) throw validation_error("grid nx, ny must be >= 1");
    if (x_max < x_min || y_max < y_min) throw validation_error("grid bounds must be ordered");
}

void RunConfig::validate() const {
    if (kappa <= 0.0) throw validation_error("kappa must be positive");
    if (rho && *rho <= 0.0) throw validation_error("rho must be positive or \"full\"");
    grid.validate();
    if (lattice == LatticeKind::Heterostructure) hetero.validate();
    if (lattice == LatticeKind::Chain && chain.n_cells < 2)
        throw validation_error("chain needs n_cells >= 2");
    if (ldos && ldos->eta && *ldos->eta <= 0.0)
        throw validation_error("ldos eta must be positive");
    if (threads < 0) throw validation_error("threads must be >= 0");
}

namespace {

void expect_keys(const YAML::Node& node, const std::string& where,
                 const std::set<std::string>& allowed) {
    if (!node.IsMap()) throw config_error(where + ": expected a key-value section");
    for (const auto& kv : node) {
        const std::string key = kv.first.as<std::string>();
        if (!allowed.count(key)) throw config_error(where + ": unknown key '" + key + "'");
    }
}

double num(const YAML::Node& n, const std::string& where) {
    if (!n || !n.IsScalar()) throw config_error(where + ": expected a number");
    try {
        return n.as<double>();
    } catch (const YAML::Exception&) {
        throw config_error(where + ": expected a number");
    }
}

model::RegionParams region(const YAML::Node& n, const std::string& where) {
    expect_keys(n, where, {"M", "t", "t_c", "phi", "mu"});
    model::RegionParams p;
    if (n["M"]) p.M = num(n["M"], where + ".M");
    if (n["t"]) p.t = num(n["t"], where + ".t");
    if (n["t_c"]) p.t_c = num(n["t_c"], where + ".t_c");
    if (n["phi"]) p.phi = num(n["phi"], where + ".phi");
    if (n["mu"]) p.mu = num(n["mu"], where + ".mu");
    return p;
}

cd complex_pair(const YAML::Node& n, const std::string& where) {
    if (n.IsSequence() && n.size() == 2)
        return cd(num(n[0], where), num(n[1], where));
    if (n.IsScalar()) return cd(num(n, where), 0.0);
    throw config_error(where + ": expected a number or [re, im]");
}

} // namespace

RunConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw config_error(std::string("config parse failure: ") + e.what());
    }
    expect_keys(root, "config",
                {"model", "localizer", "grid", "method", "ldos", "output_dir", "emit_plots",
                 "threads"});

    RunConfig cfg;
    const YAML::Node m = root["model"];
    if (!m) throw config_error("config: missing 'model' section");
    expect_keys(m, "model",
                {"lattice", "core_radius", "shell_radius", "outer_radius", "core", "shell",
                 "lossy_shell", "n_cells", "intra", "inter", "disorder", "seed"});
    const std::string lattice = m["lattice"] ? m["lattice"].as<std::string>() : "heterostructure";
    if (lattice == "heterostructure") {
        cfg.lattice = LatticeKind::Heterostructure;
        cfg.hetero.core_radius = num(m["core_radius"], "model.core_radius");
        cfg.hetero.shell_radius = num(m["shell_radius"], "model.shell_radius");
        cfg.hetero.outer_radius = num(m["outer_radius"], "model.outer_radius");
        if (!m["core"] || !m["shell"] || !m["lossy_shell"])
            throw config_error("model: heterostructure needs core, shell and lossy_shell");
        cfg.hetero.core = region(m["core"], "model.core");
        cfg.hetero.shell = region(m["shell"], "model.shell");
        cfg.hetero.lossy_shell = region(m["lossy_shell"], "model.lossy_shell");
    } else if (lattice == "chain") {
        cfg.lattice = LatticeKind::Chain;
        if (m["n_cells"]) cfg.chain.n_cells = static_cast<int>(num(m["n_cells"], "model.n_cells"));
        if (m["intra"]) cfg.chain.intra = complex_pair(m["intra"], "model.intra");
        if (m["inter"]) cfg.chain.inter = complex_pair(m["inter"], "model.inter");
        if (m["disorder"]) cfg.chain.disorder = num(m["disorder"], "model.disorder");
        if (m["seed"]) cfg.chain.seed = m["seed"].as<std::uint64_t>();
    } else {
        throw config_error("model.lattice must be 'heterostructure' or 'chain'");
    }

    if (const YAML::Node loc = root["localizer"]) {
        expect_keys(loc, "localizer", {"kappa", "rho"});
        if (loc["kappa"]) cfg.kappa = num(loc["kappa"], "localizer.kappa");
        if (loc["rho"]) {
            if (loc["rho"].IsScalar() && loc["rho"].as<std::string>() == "full")
                cfg.rho.reset();
            else
                cfg.rho = num(loc["rho"], "localizer.rho");
        }
    }

    if (const YAML::Node g = root["grid"]) {
        expect_keys(g, "grid", {"x_min", "x_max", "y_min", "y_max", "nx", "ny"});
        cfg.grid.x_min = num(g["x_min"], "grid.x_min");
        cfg.grid.x_max = num(g["x_max"], "grid.x_max");
        cfg.grid.y_min = num(g["y_min"], "grid.y_min");
        cfg.grid.y_max = num(g["y_max"], "grid.y_max");
        if (g["nx"]) cfg.grid.nx = static_cast<int>(num(g["nx"], "grid.nx"));
        if (g["ny"]) cfg.grid.ny = static_cast<int>(num(g["ny"], "grid.ny"));
    }

    if (const YAML::Node me = root["method"]) {
        const std::string v = me.as<std::string>();
        if (v == "eig") cfg.method = SigMethod::EigenCount;
        else if (v == "rh") cfg.method = SigMethod::RouthHurwitz;
        else if (v == "flow") cfg.method = SigMethod::SpectralFlow;
        else throw config_error("method must be one of eig, rh, flow");
    }

    if (const YAML::Node ld = root["ldos"]) {
        expect_keys(ld, "ldos", {"energy", "eta"});
        LdosSettings s;
        if (ld["energy"]) s.energy = num(ld["energy"], "ldos.energy");
        if (ld["eta"]) s.eta = num(ld["eta"], "ldos.eta");
        cfg.ldos = s;
    }

    if (root["output_dir"]) cfg.output_dir = root["output_dir"].as<std::string>();
    if (root["emit_plots"]) cfg.emit_plots = root["emit_plots"].as<bool>();
    if (root["threads"]) cfg.threads = root["threads"].as<int>();
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void write_config_echo(const RunConfig& cfg, std::ostream& os) {
    char buf[64];
    const auto f = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    os << "model:\n";
    if (cfg.lattice == LatticeKind::Heterostructure) {
        os << "  lattice: heterostructure\n";
        os << "  core_radius: " << f(cfg.hetero.core_radius) << "\n";
        os << "  shell_radius: " << f(cfg.hetero.shell_radius) << "\n";
        os << "  outer_radius: " << f(cfg.hetero.outer_radius) << "\n";
        const auto reg = [&](const char* name, const model::RegionParams& p) {
            os << "  " << name << ": {M: " << f(p.M) << ", t: " << f(p.t) << ", t_c: " << f(p.t_c)
               << ", phi: " << f(p.phi) << ", mu: " << f(p.mu) << "}\n";
        };
        reg("core", cfg.hetero.core);
        reg("shell", cfg.hetero.shell);
        reg("lossy_shell", cfg.hetero.lossy_shell);
    } else {
        os << "  lattice: chain\n";
        os << "  n_cells: " << cfg.chain.n_cells << "\n";
        os << "  intra: [" << f(cfg.chain.intra.real()) << ", " << f(cfg.chain.intra.imag())
           << "]\n";
        os << "  inter: [" << f(cfg.chain.inter.real()) << ", " << f(cfg.chain.inter.imag())
           << "]\n";
        os << "  disorder: " << f(cfg.chain.disorder) << "\n";
        os << "  seed: " << cfg.chain.seed << "\n";
    }
    os << "localizer:\n  kappa: " << f(cfg.kappa) << "\n  rho: "
       << (cfg.rho ? f(*cfg.rho) : std::string("full")) << "\n";
    os << "grid: {x_min: " << f(cfg.grid.x_min) << ", x_max: " << f(cfg.grid.x_max)
       << ", y_min: " << f(cfg.grid.y_min) << ", y_max: " << f(cfg.grid.y_max)
       << ", nx: " << cfg.grid.nx << ", ny: " << cfg.grid.ny << "}\n";
    os << "method: "
       << (cfg.method == SigMethod::EigenCount
               ? "eig"
               : cfg.method == SigMethod::RouthHurwitz ? "rh" : "flow")
       << "\n";
    if (cfg.ldos) {
        os << "ldos: {energy: " << f(cfg.ldos->energy);
        if (cfg.ldos->eta) os << ", eta: " << f(*cfg.ldos->eta);
        os << "}\n";
    }
    os << "output_dir: " << cfg.output_dir.string() << "\n";
    os << "emit_plots: " << (cfg.emit_plots ? "true" : "false") << "\n";
    os << "threads: " << cfg.threads << "\n";
}

} // namespace nhsl::cli
