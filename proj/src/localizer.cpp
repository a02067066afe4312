#include "nhsl/localizer.hpp"
#include "nhsl/dense.hpp"
#include "nhsl/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace nhsl::localizer {

CliffordRep clifford(int d) {
    CliffordRep rep;
    rep.d = d;
    if (d == 1) {
        rep.gamma.push_back(Matrix::Identity(1, 1));
        return rep;
    }
    if (d == 2) {
        Matrix g1(2, 2), g2(2, 2), g3(2, 2);
        g1 << 0, 1, 1, 0;
        g2 << 0, cd(0, -1), cd(0, 1), 0;
        g3 << 1, 0, 0, -1;
        rep.gamma = {g1, g2};
        rep.grading = g3;
        return rep;
    }
    throw not_implemented_error("clifford representation only provided for d = 1, 2");
}

SparseComplexMatrix dirac_block(const LatticeGeometry& geom, const Eigen::Vector2d& probe) {
    const Eigen::Index dim = geom.dimension();
    std::vector<SparseComplexMatrix::Triplet> ts;
    ts.reserve(static_cast<size_t>(dim));
    for (Eigen::Index k = 0; k < dim; ++k) {
        const auto& p = geom.site(geom.site_of_index(k)).position;
        ts.emplace_back(k, k, cd(p.x() - probe.x(), p.y() - probe.y()));
    }
    return SparseComplexMatrix::from_triplets(dim, ts);
}

namespace {

/// Matrix indices of sites within the closed ball |pos - probe| <= rho,
/// in geometry order; no rho keeps everything.
std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>>
window_indices(const LatticeGeometry& geom, const Eigen::Vector2d& probe,
               std::optional<double> rho) {
    std::vector<Eigen::Index> sites, idx;
    for (Eigen::Index i = 0; i < geom.site_count(); ++i) {
        if (rho && (geom.site(i).position - probe).norm() > *rho) continue;
        sites.push_back(i);
        for (int o = 0; o < geom.orbital_count(); ++o) idx.push_back(i * geom.orbital_count() + o);
    }
    return {std::move(sites), std::move(idx)};
}

Matrix restrict_dense(const Matrix& a, const std::vector<Eigen::Index>& idx) {
    Matrix out(idx.size(), idx.size());
    for (size_t c = 0; c < idx.size(); ++c)
        for (size_t r = 0; r < idx.size(); ++r) out(r, c) = a(idx[r], idx[c]);
    return out;
}

} // namespace

LocalizerMatrix assemble_even_localizer(const SparseComplexMatrix& h, const LatticeGeometry& geom,
                                        double kappa, const Eigen::Vector2d& probe,
                                        std::optional<double> rho) {
    if (kappa <= 0.0) throw validation_error("kappa must be positive");
    if (h.dimension() != geom.dimension())
        throw validation_error("hamiltonian dimension does not match geometry");
    auto [sites, idx] = window_indices(geom, probe, rho);
    if (idx.empty()) throw domain_error("truncation window contains no sites");

    const Matrix hd = h.dense();
    const Matrix hw = restrict_dense(hd, idx);
    const Eigen::Index m = static_cast<Eigen::Index>(idx.size());

    Eigen::VectorXcd d0(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const auto& p = geom.site(geom.site_of_index(idx[static_cast<size_t>(k)])).position;
        d0[k] = cd(p.x() - probe.x(), p.y() - probe.y());
    }

    LocalizerMatrix out;
    out.kappa = kappa;
    out.probe = probe;
    out.rho = rho;
    out.grading_size = m;
    out.window_sites = std::move(sites);
    out.matrix = Matrix::Zero(2 * m, 2 * m);
    out.matrix.topLeftCorner(m, m) = -hw;
    out.matrix.bottomRightCorner(m, m) = hw.adjoint();
    out.matrix.topRightCorner(m, m).diagonal() = kappa * d0.conjugate();
    out.matrix.bottomLeftCorner(m, m).diagonal() = kappa * d0;
    return out;
}

LocalizerMatrix assemble_odd_localizer(const SparseComplexMatrix& h, const SparseComplexMatrix& j,
                                       const LatticeGeometry& geom, double kappa, double probe_x,
                                       std::optional<double> rho) {
    if (kappa <= 0.0) throw validation_error("kappa must be positive");
    if (geom.orbital_count() != 2)
        throw validation_error("odd localizer expects two orbitals per site");
    if (h.dimension() != geom.dimension() || j.dimension() != geom.dimension())
        throw validation_error("operator dimensions do not match geometry");

    const Matrix hd = h.dense();
    const Matrix jd = j.dense();
    for (Eigen::Index i = 0; i < geom.site_count(); ++i) {
        if (std::abs(jd(2 * i, 2 * i) - cd(1, 0)) > 1e-14 ||
            std::abs(jd(2 * i + 1, 2 * i + 1) - cd(-1, 0)) > 1e-14)
            throw symmetry_error("J must be diag(+1, -1) per site in the site-major convention");
    }
    const double hscale = hd.cwiseAbs().maxCoeff();
    if ((jd * hd * jd + hd).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, hscale))
        throw symmetry_error("hamiltonian violates J H J = -H");

    std::vector<Eigen::Index> sites;
    for (Eigen::Index i = 0; i < geom.site_count(); ++i)
        if (!rho || std::abs(geom.site(i).position.x() - probe_x) <= *rho) sites.push_back(i);
    if (sites.empty()) throw domain_error("truncation window contains no sites");
    const Eigen::Index m = static_cast<Eigen::Index>(sites.size());

    // chiral blocks in the eigenbasis of J: A maps + to -, B maps - to +
    Matrix a(m, m), b(m, m);
    Eigen::VectorXd d(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        d[r] = geom.site(sites[static_cast<size_t>(r)]).position.x() - probe_x;
        for (Eigen::Index c = 0; c < m; ++c) {
            a(r, c) = hd(2 * sites[static_cast<size_t>(r)] + 1, 2 * sites[static_cast<size_t>(c)]);
            b(r, c) = hd(2 * sites[static_cast<size_t>(r)], 2 * sites[static_cast<size_t>(c)] + 1);
        }
    }

    LocalizerMatrix out;
    out.kappa = kappa;
    out.probe = Eigen::Vector2d(probe_x, 0.0);
    out.rho = rho;
    out.grading_size = m;
    out.window_sites = std::move(sites);
    out.matrix = Matrix::Zero(2 * m, 2 * m);
    out.matrix.topLeftCorner(m, m).diagonal() = (kappa * d).cast<cd>();
    out.matrix.bottomRightCorner(m, m).diagonal() = (-kappa * d).cast<cd>();
    out.matrix.topRightCorner(m, m) = b;
    out.matrix.bottomLeftCorner(m, m) = a;
    return out;
}

HypothesisCertificate certify_hypotheses(const SparseComplexMatrix& h,
                                         const LatticeGeometry& geom, double kappa,
                                         std::optional<double> rho,
                                         const Eigen::Vector2d& probe, double g) {
    if (g <= 0.0) throw validation_error("certificate needs a positive line-gap g");
    if (h.dimension() != geom.dimension())
        throw validation_error("hamiltonian dimension does not match geometry");
    const Matrix hd = h.dense();
    const Eigen::Index n = hd.rows();

    Eigen::VectorXcd z(n);
    Eigen::VectorXd rdist(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto& p = geom.site(geom.site_of_index(k)).position;
        z[k] = cd(p.x() - probe.x(), p.y() - probe.y());
        rdist[k] = std::abs(z[k]);
    }
    // [D, H] has off-diagonal blocks [D0, H] and [D0*, H]; |D| is diagonal
    // with entries |pos - probe|, identical on both grading sectors.
    Matrix cd0 = z.asDiagonal() * hd - hd * z.asDiagonal();
    Matrix cd0s = z.conjugate().asDiagonal() * hd - hd * z.conjugate().asDiagonal();
    Matrix cabs = rdist.cast<cd>().asDiagonal() * hd - hd * rdist.cast<cd>().asDiagonal();

    HypothesisCertificate cert;
    cert.g = g;
    cert.h_norm = dense::operator_norm(hd);
    cert.im_h_norm = dense::operator_norm((hd - hd.adjoint()) / cd(0.0, 2.0));
    cert.commutator_d = std::max(dense::operator_norm(cd0), dense::operator_norm(cd0s));
    cert.commutator_abs_d = dense::operator_norm(cabs);
    cert.n_const = std::max(cert.commutator_d, cert.commutator_abs_d);

    if (cert.n_const == 0.0 || cert.h_norm == 0.0) {
        cert.kappa_max = std::numeric_limits<double>::infinity();
        cert.kappa_satisfied = true;
    } else {
        cert.kappa_max = g * g * g / (12.0 * cert.h_norm * cert.n_const);
        cert.kappa_satisfied = kappa <= cert.kappa_max;
    }
    cert.rho_min = 6.0 * (g / kappa) * (1.0 + cert.im_h_norm / g);
    cert.rho_satisfied = !rho || *rho >= cert.rho_min; // untruncated = whole space
    return cert;
}

} // namespace nhsl::localizer
