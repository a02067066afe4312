#pragma once

#include "nhsl/model.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace nhsl::cli {

enum class LatticeKind { Heterostructure, Chain };
enum class SigMethod { EigenCount, RouthHurwitz, SpectralFlow };

struct ChainSpec {
    int n_cells = 2;
    cd intra{1.0, 0.0};
    cd inter{0.0, 0.0};
    double disorder = 0.0;
    std::uint64_t seed = 1;
};

struct Grid {
    double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
    int nx = 1, ny = 1;

    void validate() const;
    double x_at(int i) const { return nx == 1 ? x_min : x_min + (x_max - x_min) * i / (nx - 1); }
    double y_at(int j) const { return ny == 1 ? y_min : y_min + (y_max - y_min) * j / (ny - 1); }
};

struct LdosSettings {
    double energy = 0.0;
    std::optional<double> eta; // default 0.05 * core t
};

struct RunConfig {
    LatticeKind lattice = LatticeKind::Heterostructure;
    model::HeterostructureSpec hetero;
    ChainSpec chain;
    double kappa = 0.1;
    std::optional<double> rho; // no value = "full" (untruncated)
    Grid grid;
    SigMethod method = SigMethod::EigenCount;
    std::optional<LdosSettings> ldos;
    std::filesystem::path output_dir = "out";
    bool emit_plots = false;
    int threads = 0; // 0 = logical cores

    void validate() const;
};

/// Parse the YAML configuration document; unknown keys are rejected.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text);

/// Deterministic echo of the resolved configuration.
void write_config_echo(const RunConfig& cfg, std::ostream& os);

} // namespace nhsl::cli
