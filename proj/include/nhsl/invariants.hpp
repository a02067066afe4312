#pragma once

#include "nhsl/geometry.hpp"
#include "nhsl/sparse_matrix.hpp"

#include <optional>

namespace nhsl::invariants {

/// Spectral projection onto the invariant subspace of the eigenvalues with
/// negative real part. Idempotent but in general not hermitian.
struct RieszProjection {
    Matrix p;
    int rank = 0;
    double min_real_part_distance = 0.0;
    double nonnormality = 0.0; // |P - P*|, diagnostic only
};

/// Computed from an ordered Schur form plus one triangular Sylvester solve;
/// throws domain_error when the line-gap is closed and numerical_error when
/// the two spectral clusters are too close to separate.
RieszProjection riesz_projection(const Matrix& h);

/// Hermitian projection Q onto Ran(P): Q P = P, P Q = Q, rank Q = rank P.
struct RangeProjection {
    Matrix q;
    int rank = 0;
};
RangeProjection range_projection(const RieszProjection& p);

inline constexpr double rank_threshold = 1e-8; // relative, all rank decisions

/// Unitary polar factor F0 of D0, with singular values below
/// 1e-10 * |D0| treated as kernel, on whose right-singular subspace the
/// factor acts as the identity.
Matrix dirac_phase(const SparseComplexMatrix& d0);

/// Local Chern number estimate: per-site marker
///   (4 pi / A_site) Im (Q [X,Q] [Y,Q])_nn
/// averaged over the sites within bulk_window of the origin. A_site is the
/// area per site derived from the nearest-neighbor distance of `geom`.
double chern_marker(const RangeProjection& q, const LatticeGeometry& geom, double bulk_window);

/// Finite-size odd index surrogates for the entries of a chiral pair:
/// half-signature of the hermitian odd localizer [[kappa D, M*], [M, -kappa D]]
/// for M in {A, B, V}, where V is twice the lower-left block of the Riesz
/// projection of [[0, B], [A, 0]].
struct WindingTriple {
    int ind_a = 0;
    int ind_b = 0;
    int ind_v = 0;
};

WindingTriple chiral_winding(const Matrix& a, const Matrix& b, const Eigen::VectorXd& positions,
                             double kappa = 0.5, double probe_x = 0.0,
                             std::optional<double> rho = std::nullopt);

/// Interpolation H_t that moves each spectral half toward +/- 1:
/// f_t(z) = (1-t) z - t on the negative-real-part invariant subspace and
/// (1-t) z + t on the positive one, so H_0 = H and H_1 = 1 - 2P.
Matrix flatten_path(const Matrix& h, double t);

} // namespace nhsl::invariants
