#include "nhsl/model.hpp"
#include "nhsl/dense.hpp"
#include "nhsl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace nhsl::model {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double sqrt3 = 1.7320508075688772;
}

void RegionParams::validate() const {
    if (t < 0.0) throw validation_error("region parameter t must be >= 0");
    if (t_c < 0.0) throw validation_error("region parameter t_c must be >= 0");
    if (mu < 0.0) throw validation_error("region parameter mu must be >= 0");
    if (!(phi > -pi && phi <= pi)) throw validation_error("region parameter phi must lie in (-pi, pi]");
}

void HeterostructureSpec::validate() const {
    if (!(core_radius > 0.0) || !(shell_radius > 0.0) || !(outer_radius > 0.0))
        throw validation_error("heterostructure radii must be positive");
    if (!(core_radius < shell_radius && shell_radius < outer_radius))
        throw validation_error("heterostructure radii must be strictly nested");
    core.validate();
    shell.validate();
    lossy_shell.validate();
}

int HeterostructureSpec::region_of(const Eigen::Vector2d& p) const {
    const double r = p.norm();
    if (r <= core_radius) return 0;
    if (r <= shell_radius) return 1;
    return 2;
}

const RegionParams& HeterostructureSpec::params_of(int region) const {
    switch (region) {
    case 0: return core;
    case 1: return shell;
    case 2: return lossy_shell;
    default: throw config_error("unknown region tag " + std::to_string(region));
    }
}

LatticeGeometry build_honeycomb(const HeterostructureSpec& spec) {
    spec.validate();
    // Bravais vectors for NN bond length 1; flake centered on a plaquette.
    const Eigen::Vector2d a1(sqrt3, 0.0);
    const Eigen::Vector2d a2(sqrt3 / 2.0, 1.5);
    const Eigen::Vector2d basis_b(0.0, 1.0);
    const Eigen::Vector2d plaquette_center(sqrt3 / 2.0, 0.5);

    const double r = spec.outer_radius;
    const int span = static_cast<int>(std::ceil(r / 1.5)) + 2;
    std::vector<Site> sites;
    for (int m = -2 * span; m <= 2 * span; ++m) {
        for (int n = -2 * span; n <= 2 * span; ++n) {
            const Eigen::Vector2d base = m * a1 + n * a2 - plaquette_center;
            for (int s = 0; s < 2; ++s) {
                const Eigen::Vector2d p = (s == 0) ? base : Eigen::Vector2d(base + basis_b);
                if (p.norm() <= r)
                    sites.push_back({p, s == 0 ? Sublattice::A : Sublattice::B,
                                     spec.region_of(p)});
            }
        }
    }
    LatticeGeometry geom(std::move(sites), 1);
    // bipartite sanity: every NN of an A site is a B site
    for (Eigen::Index i = 0; i < geom.site_count(); ++i)
        for (Eigen::Index j = i + 1; j < geom.site_count(); ++j) {
            const double d = (geom.site(i).position - geom.site(j).position).norm();
            if (std::abs(d - nn_distance) < bond_match_tolerance &&
                geom.site(i).sublattice == geom.site(j).sublattice)
                throw validation_error("honeycomb bipartite structure violated");
        }
    return geom;
}

SparseComplexMatrix
assemble_haldane(const LatticeGeometry& geom,
                 const std::map<int, RegionParams>& params_by_region,
                 const std::function<int(const Eigen::Vector2d&)>& region_of) {
    if (geom.orbital_count() != 1)
        throw validation_error("assemble_haldane expects one orbital per site");
    const auto params_for = [&](int region) -> const RegionParams& {
        auto it = params_by_region.find(region);
        if (it == params_by_region.end())
            throw config_error("no parameters for region " + std::to_string(region));
        return it->second;
    };

    const Eigen::Index n = geom.site_count();
    std::vector<SparseComplexMatrix::Triplet> ts;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Site& site = geom.site(i);
        const RegionParams& p = params_for(site.region);
        const double sign = site.sublattice == Sublattice::A ? 1.0 : -1.0;
        ts.emplace_back(i, i, cd(sign * p.M, -p.mu));
    }

    // bond lists by distance
    std::vector<std::vector<Eigen::Index>> nn_of(n);
    std::vector<std::pair<Eigen::Index, Eigen::Index>> nnn_pairs;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = (geom.site(i).position - geom.site(j).position).norm();
            if (std::abs(d - nn_distance) < bond_match_tolerance) {
                nn_of[i].push_back(j);
                nn_of[j].push_back(i);
                const Eigen::Vector2d mid = 0.5 * (geom.site(i).position + geom.site(j).position);
                const RegionParams& p = params_for(region_of(mid));
                if (p.t != 0.0) {
                    ts.emplace_back(i, j, cd(-p.t, 0.0));
                    ts.emplace_back(j, i, cd(-p.t, 0.0));
                }
            } else if (std::abs(d - nnn_distance) < bond_match_tolerance) {
                nnn_pairs.emplace_back(i, j);
            }
        }

    // NN bond vectors leaving an A site; B sites use the negatives. A NNN
    // hop decomposes as delta_a - delta_b, and the sign of the turn
    // i -> i+delta_a -> j orients the hop around its hexagon. This stays
    // well defined for rim pairs whose shared neighbor fell outside the flake.
    const Eigen::Vector2d deltas[3] = {{0.0, 1.0}, {-sqrt3 / 2.0, -0.5}, {sqrt3 / 2.0, -0.5}};
    const auto turn_sign = [&](Sublattice s, const Eigen::Vector2d& step) -> double {
        const double flip = s == Sublattice::A ? 1.0 : -1.0;
        for (const auto& da : deltas) {
            const Eigen::Vector2d first = flip * da;
            const Eigen::Vector2d second = step - first;
            for (const auto& db : deltas)
                if ((second + flip * db).norm() < bond_match_tolerance) {
                    const double cross = first.x() * second.y() - first.y() * second.x();
                    return cross > 0.0 ? 1.0 : -1.0;
                }
        }
        throw validation_error("next-nearest pair is not honeycomb-compatible");
    };

    for (auto [i, j] : nnn_pairs) {
        if (geom.site(i).sublattice != geom.site(j).sublattice)
            throw validation_error("next-nearest pair couples different sublattices");
        const Eigen::Vector2d mid = 0.5 * (geom.site(i).position + geom.site(j).position);
        const RegionParams& p = params_for(region_of(mid));
        if (p.t_c == 0.0) continue;
        const double nu =
            turn_sign(geom.site(i).sublattice, geom.site(j).position - geom.site(i).position);
        const cd amp = -p.t_c * std::exp(cd(0.0, p.phi * nu)); // hop i -> j
        ts.emplace_back(j, i, amp);
        ts.emplace_back(i, j, std::conj(amp));
    }
    return SparseComplexMatrix::from_triplets(n, ts);
}

SparseComplexMatrix assemble_haldane(const LatticeGeometry& geom,
                                     const HeterostructureSpec& spec) {
    spec.validate();
    std::map<int, RegionParams> params{{0, spec.core}, {1, spec.shell}, {2, spec.lossy_shell}};
    return assemble_haldane(geom, params,
                            [&spec](const Eigen::Vector2d& p) { return spec.region_of(p); });
}

double estimate_line_gap(const SparseComplexMatrix& h, double s_range, int grid_points) {
    if (grid_points < 3) throw validation_error("estimate_line_gap needs grid_points >= 3");
    if (s_range < 0.0) throw validation_error("estimate_line_gap needs s_range >= 0");
    const Eigen::Index n = h.dimension();
    if (n == 0) return 0.0;
    Matrix hd = h.dense();
    const auto value = [&](double s) {
        Matrix m = hd;
        m.diagonal().array() += cd(0.0, s);
        return dense::smallest_singular_value(m);
    };

    double best = std::numeric_limits<double>::infinity();
    int best_idx = 0;
    std::vector<double> nodes(grid_points);
    for (int k = 0; k < grid_points; ++k) {
        nodes[k] = -s_range + 2.0 * s_range * k / (grid_points - 1);
        const double v = value(nodes[k]);
        if (v < best) {
            best = v;
            best_idx = k;
        }
    }
    // golden-section refinement on the bracketing interval
    double a = nodes[std::max(0, best_idx - 1)];
    double b = nodes[std::min(grid_points - 1, best_idx + 1)];
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double f1 = value(x1), f2 = value(x2);
    for (int it = 0; it < 60 && (b - a) > 1e-10 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = value(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = value(x2);
        }
    }
    best = std::min({best, f1, f2});
    return best;
}

double estimate_line_gap(const SparseComplexMatrix& h) {
    // ||H||_1 bounds the spectral radius, so the minimizer lies inside
    double norm1 = 0.0;
    Matrix hd = h.dense();
    for (Eigen::Index c = 0; c < hd.cols(); ++c)
        norm1 = std::max(norm1, hd.col(c).cwiseAbs().sum());
    return estimate_line_gap(h, norm1, 129);
}

ChiralChain build_chiral_chain(int n_cells, cd intra, cd inter, double disorder_amplitude,
                               std::uint64_t seed) {
    if (n_cells < 2) throw validation_error("chiral chain needs n_cells >= 2");
    if (disorder_amplitude < 0.0) throw validation_error("disorder amplitude must be >= 0");

    std::vector<Site> sites;
    sites.reserve(static_cast<size_t>(n_cells));
    const double x0 = (n_cells - 1) / 2.0;
    for (int j = 0; j < n_cells; ++j)
        sites.push_back({Eigen::Vector2d(j - x0, 0.0), Sublattice::A, 0});
    LatticeGeometry geom(std::move(sites), 2);

    // Clean bonds pair hermitianly; disorder draws are independent for the
    // forward (A block) and backward (B block) directions, which is the
    // non-hermitian content of the model. J H J = -H is exact either way
    // because only +/- sector couplings are ever emitted.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto noisy = [&](cd base) {
        if (disorder_amplitude == 0.0) return base;
        const double re = u(rng), im = u(rng);
        return base + disorder_amplitude * cd(re, im);
    };

    const Eigen::Index dim = geom.dimension();
    std::vector<SparseComplexMatrix::Triplet> th, tj;
    for (int j = 0; j < n_cells; ++j) {
        const Eigen::Index plus = 2 * j, minus = 2 * j + 1;
        tj.emplace_back(plus, plus, cd(1.0, 0.0));
        tj.emplace_back(minus, minus, cd(-1.0, 0.0));
        const cd a_fwd = noisy(intra);
        const cd a_bwd = noisy(std::conj(intra));
        if (a_fwd != cd(0.0, 0.0)) th.emplace_back(minus, plus, a_fwd);
        if (a_bwd != cd(0.0, 0.0)) th.emplace_back(plus, minus, a_bwd);
        if (j + 1 < n_cells) {
            const cd b_fwd = noisy(inter);
            const cd b_bwd = noisy(std::conj(inter));
            if (b_fwd != cd(0.0, 0.0)) th.emplace_back(2 * (j + 1), minus, b_fwd);
            if (b_bwd != cd(0.0, 0.0)) th.emplace_back(minus, 2 * (j + 1), b_bwd);
        }
    }
    return {SparseComplexMatrix::from_triplets(dim, th),
            SparseComplexMatrix::from_triplets(dim, tj), std::move(geom)};
}

} // namespace nhsl::model
