#include <doctest.h>

#include "nhsl/errors.hpp"
#include "nhsl/localizer.hpp"
#include "nhsl/model.hpp"
#include "nhsl/signature.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

using namespace nhsl;
using model::HeterostructureSpec;
using model::RegionParams;

namespace {

HeterostructureSpec fig1_spec(double rc = 4.5, double rs = 7.2, double ro = 10.2) {
    HeterostructureSpec s;
    s.core_radius = rc;
    s.shell_radius = rs;
    s.outer_radius = ro;
    s.core = {0.0, 1.0, 0.5, std::numbers::pi / 2, 0.0};
    s.shell = {0.5 * std::sqrt(3.0), 1.0, 0.0, 0.0, 0.0};
    s.lossy_shell = {0.5 * std::sqrt(3.0), 1.0, 0.0, 0.0, 0.2};
    return s;
}

int trivial_region(const Eigen::Vector2d&) { return 0; }

} // namespace

TEST_CASE("honeycomb_single_hexagon") {
    auto geom = model::build_honeycomb(fig1_spec(0.3, 0.6, 1.2));
    CHECK(geom.site_count() == 6);
    int a = 0, b = 0;
    for (const auto& s : geom.sites()) (s.sublattice == Sublattice::A ? a : b)++;
    CHECK(a == 3);
    CHECK(b == 3);
    for (const auto& s : geom.sites()) CHECK(s.position.norm() == doctest::Approx(1.0));
}

TEST_CASE("honeycomb_rejects_degenerate_radii") {
    auto s = fig1_spec();
    s.shell_radius = s.core_radius;
    CHECK_THROWS_AS(model::build_honeycomb(s), validation_error);
    s = fig1_spec();
    s.core_radius = -1.0;
    CHECK_THROWS_AS(model::build_honeycomb(s), validation_error);
}

TEST_CASE("honeycomb_count_matches_disk_enumeration") {
    // radii avoid exact site distances, where inclusion would be a fp tie
    for (double r : {1.2, 4.1, 7.7, 10.2}) {
        auto geom = model::build_honeycomb(fig1_spec(r / 3.0, r / 2.0, r));
        CHECK(geom.site_count() == oracles::honeycomb_sites_in_disk(r));
    }
}

TEST_CASE("honeycomb_regions_follow_radius") {
    auto spec = fig1_spec();
    auto geom = model::build_honeycomb(spec);
    for (const auto& s : geom.sites()) CHECK(s.region == spec.region_of(s.position));
}

TEST_CASE("haldane_onsite_only_hexagon") {
    auto spec = fig1_spec(0.3, 0.6, 1.2);
    spec.lossy_shell = {1.0, 0.0, 0.0, 0.0, 0.0}; // hexagon sites all sit in region 2
    auto geom = model::build_honeycomb(spec);
    auto h = model::assemble_haldane(geom, spec);
    Matrix hd = h.dense();
    CHECK(h.nonzeros() == 6);
    for (Eigen::Index i = 0; i < 6; ++i) {
        const double want = geom.site(i).sublattice == Sublattice::A ? 1.0 : -1.0;
        CHECK(hd(i, i) == cd(want, 0.0));
    }
}

TEST_CASE("haldane_hermitian_without_loss") {
    auto spec = fig1_spec(2.0, 3.0, 5.0);
    spec.lossy_shell.mu = 0.0;
    auto geom = model::build_honeycomb(spec);
    Matrix hd = model::assemble_haldane(geom, spec).dense();
    CHECK((hd - hd.adjoint()).norm() < 1e-14 * hd.norm());
}

TEST_CASE("haldane_dimer_eigenvalues") {
    LatticeGeometry dimer({{{0.0, 0.0}, Sublattice::A, 0}, {{0.0, 1.0}, Sublattice::B, 0}});
    std::map<int, RegionParams> params{{0, {0.0, 1.0, 0.0, 0.0, 0.0}}};
    auto h = model::assemble_haldane(dimer, params, trivial_region);
    auto ev = oracles::eigenvalues(h.dense());
    std::sort(ev.begin(), ev.end(), [](cd a, cd b) { return a.real() < b.real(); });
    CHECK(ev[0].real() == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(ev[1].real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("haldane_missing_region_parameters") {
    LatticeGeometry dimer({{{0.0, 0.0}, Sublattice::A, 3}, {{0.0, 1.0}, Sublattice::B, 3}});
    std::map<int, RegionParams> params{{0, {}}};
    CHECK_THROWS_AS(
        model::assemble_haldane(dimer, params, [](const Eigen::Vector2d&) { return 3; }),
        config_error);
}

TEST_CASE("haldane_bipartite_spectral_symmetry") {
    // mu = 0, M = 0, t_c = 0: spectrum symmetric under E -> -E
    auto spec = fig1_spec(1.5, 2.5, 4.0);
    spec.core = spec.shell = spec.lossy_shell = {0.0, 1.0, 0.0, 0.0, 0.0};
    auto geom = model::build_honeycomb(spec);
    auto ev = oracles::eigenvalues(model::assemble_haldane(geom, spec).dense());
    std::vector<double> re;
    for (auto w : ev) re.push_back(w.real());
    std::sort(re.begin(), re.end());
    for (size_t i = 0; i < re.size(); ++i)
        CHECK(std::abs(re[i] + re[re.size() - 1 - i]) < 1e-10);
}

TEST_CASE("haldane_loss_direction") {
    auto spec = fig1_spec(1.5, 2.5, 4.0);
    spec.core = spec.shell = spec.lossy_shell = {0.3, 1.0, 0.5, 1.0, 0.25};
    auto geom = model::build_honeycomb(spec);
    auto ev = oracles::eigenvalues(model::assemble_haldane(geom, spec).dense());
    for (auto w : ev) {
        CHECK(w.imag() <= 0.25 + 1e-8);
        CHECK(w.imag() >= -0.25 - 1e-8);
    }
}

TEST_CASE("haldane_deterministic_assembly") {
    auto spec = fig1_spec(2.0, 3.5, 5.0);
    std::ostringstream s1, s2;
    model::assemble_haldane(model::build_honeycomb(spec), spec).write_triplets(s1);
    model::assemble_haldane(model::build_honeycomb(spec), spec).write_triplets(s2);
    CHECK(s1.str() == s2.str());
    CHECK(s1.str().size() > 0);
}

TEST_CASE("triplet_round_trip") {
    auto spec = fig1_spec(1.5, 2.5, 4.0);
    auto h = model::assemble_haldane(model::build_honeycomb(spec), spec);
    std::stringstream ss;
    h.write_triplets(ss);
    auto h2 = SparseComplexMatrix::read_triplets(ss);
    CHECK((h.dense() - h2.dense()).norm() == 0.0);
}

TEST_CASE("line_gap_normal_matrices") {
    auto h1 = SparseComplexMatrix::from_triplets(2, {{0, 0, cd(1.0, 0.0)}, {1, 1, cd(-1.0, 0.0)}});
    CHECK(model::estimate_line_gap(h1, 3.0, 129) == doctest::Approx(1.0).epsilon(1e-9));
    auto h2 = SparseComplexMatrix::from_triplets(2, {{0, 0, cd(1.0, 2.0)}, {1, 1, cd(-1.0, 0.0)}});
    CHECK(model::estimate_line_gap(h2, 4.0, 201) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("line_gap_non_normal_below_spectral_distance") {
    Matrix h(2, 2);
    h << 1.0, 5.0, 0.0, 1.0;
    auto hs = SparseComplexMatrix::from_triplets(
        2, {{0, 0, cd(1.0, 0.0)}, {0, 1, cd(5.0, 0.0)}, {1, 1, cd(1.0, 0.0)}});
    const double g = model::estimate_line_gap(hs, 8.0, 257);
    CHECK(g < 1.0);
    const double g_oracle = oracles::line_gap_scan(h, 2.0, 5e-4);
    CHECK(std::abs(g - g_oracle) < 1e-6);
}

TEST_CASE("line_gap_validation") {
    auto h = SparseComplexMatrix::identity(2);
    CHECK_THROWS_AS(model::estimate_line_gap(h, 1.0, 2), validation_error);
}

TEST_CASE("line_gap_bounded_by_spectral_distance") {
    auto spec = fig1_spec(1.5, 2.5, 4.0);
    for (double mu : {0.0, 0.2}) {
        spec.lossy_shell.mu = mu;
        auto geom = model::build_honeycomb(spec);
        auto h = model::assemble_haldane(geom, spec);
        auto ev = oracles::eigenvalues(h.dense());
        double dmin = 1e300;
        for (auto w : ev) dmin = std::min(dmin, std::abs(w.real()));
        CHECK(model::estimate_line_gap(h) <= dmin + 1e-9);
    }
}

TEST_CASE("chain_atomic_limit") {
    auto chain = model::build_chiral_chain(8, cd(1.0, 0.0), cd(0.0, 0.0), 0.0, 1);
    CHECK(model::estimate_line_gap(chain.hamiltonian, 2.0, 65) ==
          doctest::Approx(1.0).epsilon(1e-9));
    auto loc = localizer::assemble_odd_localizer(chain.hamiltonian, chain.chiral_operator,
                                                 chain.geometry, 0.5, 0.0);
    auto rep = signature::sig_eigencount(loc);
    CHECK(!rep.gap_closed);
    CHECK(rep.signature == 0);
}

TEST_CASE("chain_dimerized_nontrivial_winding") {
    auto chain = model::build_chiral_chain(16, cd(0.0, 0.0), cd(1.0, 0.0), 0.0, 1);
    auto loc = localizer::assemble_odd_localizer(chain.hamiltonian, chain.chiral_operator,
                                                 chain.geometry, 0.5, 0.0);
    auto rep = signature::sig_eigencount(loc);
    CHECK(!rep.gap_closed);
    const Eigen::Index n = chain.geometry.site_count();
    Matrix hd = chain.hamiltonian.dense();
    Matrix a(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) a(r, c) = hd(2 * r + 1, 2 * c);
    const int wind = oracles::band_symbol_winding(a);
    CHECK(std::abs(wind) == 1);
    CHECK(rep.signature / 2 == wind);
}

TEST_CASE("chain_chirality_exact") {
    for (auto [intra, inter, dis] :
         {std::tuple{cd(1.0, 0.2), cd(0.3, -0.4), 0.0},
          std::tuple{cd(0.2, 0.0), cd(1.0, 0.0), 0.3},
          std::tuple{cd(0.7, -0.1), cd(0.9, 0.3), 0.15}}) {
        auto chain = model::build_chiral_chain(10, intra, inter, dis, 42);
        Matrix h = chain.hamiltonian.dense();
        Matrix j = chain.chiral_operator.dense();
        CHECK((j * h * j + h).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("chain_disorder_deterministic_and_nonhermitian") {
    auto c1 = model::build_chiral_chain(12, cd(0.5, 0.0), cd(1.0, 0.0), 0.2, 7);
    auto c2 = model::build_chiral_chain(12, cd(0.5, 0.0), cd(1.0, 0.0), 0.2, 7);
    std::ostringstream s1, s2;
    c1.hamiltonian.write_triplets(s1);
    c2.hamiltonian.write_triplets(s2);
    CHECK(s1.str() == s2.str());
    Matrix h = c1.hamiltonian.dense();
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-3);
    CHECK_THROWS_AS(model::build_chiral_chain(1, cd(1, 0), cd(0, 0), 0.0, 1), validation_error);
}

TEST_CASE("geometry_rejects_coincident_sites") {
    CHECK_THROWS_AS(
        LatticeGeometry({{{0.0, 0.0}, Sublattice::A, 0}, {{0.0, 5e-10}, Sublattice::B, 0}}),
        validation_error);
}
