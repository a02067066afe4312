#include "nhsl/invariants.hpp"
#include "nhsl/dense.hpp"
#include "nhsl/errors.hpp"
#include "nhsl/localizer.hpp"
#include "nhsl/model.hpp"
#include "nhsl/signature.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <iostream>
#include <numbers>
#include <string>

namespace nhsl::invariants {

RieszProjection riesz_projection(const Matrix& h) {
    if (h.rows() != h.cols()) throw validation_error("riesz projection needs a square matrix");
    const Eigen::Index n = h.rows();
    RieszProjection out;
    if (n == 0) {
        out.p = Matrix(0, 0);
        return out;
    }

    const auto schur = dense::schur_ordered_negative_real(h);
    double gap = std::numeric_limits<double>::infinity();
    double scale = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        gap = std::min(gap, std::abs(schur.t(i, i).real()));
        scale = std::max(scale, std::abs(schur.t(i, i)));
    }
    if (gap <= 1e-8 * scale)
        throw domain_error("riesz projection: spectrum touches the imaginary axis");

    const int k = schur.neg_count;
    out.rank = k;
    out.min_real_part_distance = gap;
    if (k == 0) {
        out.p = Matrix::Zero(n, n);
        return out;
    }
    if (k == static_cast<int>(n)) {
        out.p = Matrix::Identity(n, n);
        return out;
    }

    // P = Z [[I, Y], [0, 0]] Z* with T11 Y - Y T22 = T12
    const Matrix t11 = schur.t.topLeftCorner(k, k);
    const Matrix t22 = schur.t.bottomRightCorner(n - k, n - k);
    const Matrix t12 = schur.t.topRightCorner(k, n - k);
    const Matrix y = dense::sylvester_triangular(t11, t22, t12);
    Matrix pt = Matrix::Zero(n, n);
    pt.topLeftCorner(k, k).setIdentity();
    pt.topRightCorner(k, n - k) = y;
    out.p = schur.z * pt * schur.z.adjoint();
    out.nonnormality = dense::operator_norm(out.p - out.p.adjoint());
    return out;
}

RangeProjection range_projection(const RieszProjection& proj) {
    const Matrix& p = proj.p;
    const Eigen::Index n = p.rows();
    RangeProjection out;
    if (n == 0) {
        out.q = Matrix(0, 0);
        return out;
    }
    Eigen::JacobiSVD<Matrix> svd(p, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    if (smax == 0.0) {
        out.q = Matrix::Zero(n, n);
        return out;
    }
    const double thr = rank_threshold * smax;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > thr) ++rank;
        if (sv(i) > 0.1 * thr && sv(i) <= 10.0 * thr)
            throw numerical_error("range projection: numerical rank is ambiguous near the "
                                  "threshold (sigma = " + std::to_string(sv(i)) + ")");
    }
    if (rank != proj.rank)
        throw numerical_error("range projection: rank " + std::to_string(rank) +
                              " does not match the Schur count " + std::to_string(proj.rank));
    const Matrix u = svd.matrixU().leftCols(rank);
    out.q = u * u.adjoint();
    out.q = 0.5 * (out.q + out.q.adjoint()).eval();
    out.rank = rank;
    return out;
}

Matrix dirac_phase(const SparseComplexMatrix& d0) {
    const Matrix d = d0.dense();
    const Eigen::Index n = d.rows();
    if (n == 0) return Matrix(0, 0);
    Eigen::JacobiSVD<Matrix> svd(d, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double thr = 1e-10 * (sv.size() > 0 ? sv(0) : 0.0);
    int rank = 0;
    while (rank < sv.size() && sv(rank) > thr) ++rank;
    const Matrix u = svd.matrixU().leftCols(rank);
    const Matrix v = svd.matrixV().leftCols(rank);
    const Matrix vker = svd.matrixV().rightCols(n - rank);
    return u * v.adjoint() + vker * vker.adjoint();
}

double chern_marker(const RangeProjection& proj, const LatticeGeometry& geom,
                    double bulk_window) {
    if (bulk_window <= 0.0) throw validation_error("bulk window must be positive");
    const Matrix& q = proj.q;
    if (q.rows() != geom.dimension())
        throw validation_error("projection dimension does not match geometry");
    if (q.rows() == 0) return 0.0;

    // area per site from the nearest-neighbor distance (honeycomb cell)
    double dmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < geom.site_count(); ++i)
        for (Eigen::Index j = i + 1; j < geom.site_count(); ++j)
            dmin = std::min(dmin, (geom.site(i).position - geom.site(j).position).norm());
    if (!std::isfinite(dmin)) return 0.0;
    const double site_area = 0.75 * std::sqrt(3.0) * dmin * dmin;

    const Eigen::VectorXcd x = geom.x_diagonal().cast<cd>();
    const Eigen::VectorXcd y = geom.y_diagonal().cast<cd>();
    const Matrix xq = x.asDiagonal() * q - q * x.asDiagonal();
    const Matrix yq = y.asDiagonal() * q - q * y.asDiagonal();
    const Matrix m = q * xq * yq;

    double acc = 0.0;
    long count = 0;
    for (Eigen::Index i = 0; i < geom.site_count(); ++i) {
        if (geom.site(i).position.norm() > bulk_window) continue;
        double site_sum = 0.0;
        for (int o = 0; o < geom.orbital_count(); ++o)
            site_sum += m(i * geom.orbital_count() + o, i * geom.orbital_count() + o).imag();
        acc += 4.0 * std::numbers::pi / site_area * site_sum;
        ++count;
    }
    return count > 0 ? acc / count : 0.0;
}

namespace {

int odd_index_surrogate(const Matrix& m, const Eigen::VectorXd& xs, double kappa, double probe_x,
                        std::optional<double> rho) {
    const Eigen::Index n = m.rows();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < n; ++i)
        if (!rho || std::abs(xs[i] - probe_x) <= *rho) keep.push_back(i);
    if (keep.empty()) throw domain_error("odd index window contains no sites");
    const Eigen::Index k = static_cast<Eigen::Index>(keep.size());
    Matrix loc = Matrix::Zero(2 * k, 2 * k);
    for (Eigen::Index r = 0; r < k; ++r) {
        loc(r, r) = kappa * (xs[keep[static_cast<size_t>(r)]] - probe_x);
        loc(k + r, k + r) = -loc(r, r);
        for (Eigen::Index c = 0; c < k; ++c) {
            loc(k + r, c) = m(keep[static_cast<size_t>(r)], keep[static_cast<size_t>(c)]);
            loc(r, k + c) = std::conj(m(keep[static_cast<size_t>(c)], keep[static_cast<size_t>(r)]));
        }
    }
    const auto rep = signature::sig_eigencount(loc);
    if (rep.gap_closed)
        throw domain_error("odd index surrogate: localizer line-gap closed");
    return rep.signature / 2;
}

} // namespace

WindingTriple chiral_winding(const Matrix& a, const Matrix& b, const Eigen::VectorXd& positions,
                             double kappa, double probe_x, std::optional<double> rho) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n || b.rows() != n || b.cols() != n || positions.size() != n)
        throw validation_error("chiral pair blocks and positions must share one dimension");
    const double sa = dense::smallest_singular_value(a);
    const double sb = dense::smallest_singular_value(b);
    const double scale = std::max(dense::operator_norm(a), dense::operator_norm(b));
    if (sa <= 1e-10 * scale || sb <= 1e-10 * scale)
        throw domain_error("chiral blocks must be invertible (line-gap of the chiral pair)");

    // full chiral hamiltonian in the sector grading, then V = 2 P_{-+}
    Matrix h = Matrix::Zero(2 * n, 2 * n);
    h.topRightCorner(n, n) = b;
    h.bottomLeftCorner(n, n) = a;
    const RieszProjection p = riesz_projection(h);
    Matrix jp = p.p;
    jp.topRightCorner(n, n) *= -1.0;
    jp.bottomLeftCorner(n, n) *= -1.0; // J P J
    const Matrix residual = jp + p.p - Matrix::Identity(2 * n, 2 * n);
    if (residual.cwiseAbs().maxCoeff() > 1e-10)
        throw symmetry_error("riesz projection violates J P J = 1 - P");
    const Matrix v = 2.0 * p.p.bottomLeftCorner(n, n);

    WindingTriple triple;
    const auto attempt = [&](std::optional<double> window) {
        triple.ind_a = odd_index_surrogate(a, positions, kappa, probe_x, window);
        triple.ind_b = odd_index_surrogate(b, positions, kappa, probe_x, window);
        triple.ind_v = odd_index_surrogate(v, positions, kappa, probe_x, window);
        return triple.ind_a == -triple.ind_b && triple.ind_a == triple.ind_v;
    };
    std::optional<double> window = rho;
    for (int escalation = 0; escalation < 3; ++escalation) {
        if (attempt(window)) return triple;
        if (!window) break; // already untruncated
        std::cerr << "chiral_winding: triple inconsistent at rho=" << *window
                  << ", escalating window\n";
        window = 2.0 * *window;
        if (escalation == 1) window.reset();
    }
    return triple;
}

Matrix flatten_path(const Matrix& h, double t) {
    if (t < 0.0 || t > 1.0) throw validation_error("flatten parameter must lie in [0, 1]");
    if (t == 0.0) return h;
    const RieszProjection proj = riesz_projection(h);
    const Eigen::Index n = h.rows();
    // linear interpolation of f_t on each invariant half: (1-t) H + t (1 - 2P)
    return (1.0 - t) * h + t * (Matrix::Identity(n, n) - 2.0 * proj.p);
}

} // namespace nhsl::invariants
