#pragma once

#include "nhsl/geometry.hpp"
#include "nhsl/sparse_matrix.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>

namespace nhsl::model {

/// Haldane parameters of one region. `phi` is the next-nearest-neighbor
/// phase picked up on a counter-clockwise hop; `mu` is the absorption
/// strength (every site of the region acquires -i*mu on the diagonal).
struct RegionParams {
    double M = 0.0;
    double t = 1.0;
    double t_c = 0.0;
    double phi = 0.0;
    double mu = 0.0;

    void validate() const;
};

/// Concentric-disk heterostructure: topological core, trivial shell,
/// lossy trivial outer ring. Radii in units of the NN bond length.
struct HeterostructureSpec {
    double core_radius = 0.0;
    double shell_radius = 0.0;
    double outer_radius = 0.0;
    RegionParams core;
    RegionParams shell;
    RegionParams lossy_shell;

    void validate() const;

    /// Region tag of a point: 0 core, 1 shell, 2 lossy ring.
    int region_of(const Eigen::Vector2d& p) const;
    const RegionParams& params_of(int region) const;
};

inline constexpr double nn_distance = 1.0;
inline constexpr double nnn_distance = 1.7320508075688772; // sqrt(3)
inline constexpr double bond_match_tolerance = 1e-6;

/// All honeycomb sites within outer_radius of the origin. The flake is
/// centered on a hexagonal plaquette, so the six nearest sites sit at
/// distance 1; NN bond length is the unit of length.
LatticeGeometry build_honeycomb(const HeterostructureSpec& spec);

/// Tight-binding Haldane Hamiltonian on `geom`. Diagonal is M - i*mu on
/// A sites and -M - i*mu on B sites, NN bonds -t, NNN bonds
/// -t_c * exp(+i*phi) for the counter-clockwise-oriented hop. Bonds take
/// their parameters from the region of the bond midpoint, classified by
/// `region_of`; on-site terms use the site's own region tag.
SparseComplexMatrix
assemble_haldane(const LatticeGeometry& geom,
                 const std::map<int, RegionParams>& params_by_region,
                 const std::function<int(const Eigen::Vector2d&)>& region_of);

SparseComplexMatrix assemble_haldane(const LatticeGeometry& geom,
                                     const HeterostructureSpec& spec);

/// Upper bound on the line-gap g = inf_s sigma_min(H + i s 1), by a grid
/// over s in [-s_range, s_range] plus golden-section refinement around the
/// best node. Values below no_gap_threshold mean "no line-gap detected".
double estimate_line_gap(const SparseComplexMatrix& h, double s_range, int grid_points);
double estimate_line_gap(const SparseComplexMatrix& h);

inline constexpr double no_gap_threshold = 1e-12;

/// Two-orbital chiral chain. Cell j sits at position (j - (n-1)/2, 0);
/// orbital 0 is the J=+1 sector, orbital 1 the J=-1 sector. intra couples
/// the two orbitals of one cell, inter couples orbital 1 of cell j to
/// orbital 0 of cell j+1. Per-bond complex disorder of the given amplitude
/// is drawn deterministically from the seed, independently for the forward
/// and backward hop of each bond, so disorder > 0 makes the chain
/// non-hermitian. J H J = -H holds exactly in all cases.
struct ChiralChain {
    SparseComplexMatrix hamiltonian;
    SparseComplexMatrix chiral_operator;
    LatticeGeometry geometry;
};

ChiralChain build_chiral_chain(int n_cells, cd intra, cd inter, double disorder_amplitude,
                               std::uint64_t seed);

} // namespace nhsl::model
