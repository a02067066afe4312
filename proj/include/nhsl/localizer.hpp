#pragma once

#include "nhsl/geometry.hpp"
#include "nhsl/sparse_matrix.hpp"

#include <optional>
#include <vector>

namespace nhsl::localizer {

/// Irreducible hermitian Clifford generators for d spatial dimensions,
/// plus (for even d) the grading matrix that anticommutes with all of them.
struct CliffordRep {
    int d = 0;
    std::vector<Matrix> gamma;
    Matrix grading; // empty for odd d
};
CliffordRep clifford(int d);

/// Diagonal D0 = (X - x) + i (Y - y) in the site basis, orbital-expanded.
SparseComplexMatrix dirac_block(const LatticeGeometry& geom, const Eigen::Vector2d& probe);

/// Dense spectral localizer window with its assembly metadata.
/// For the even (2D) localizer the block layout is
///   [ -H        kappa D0* ]
///   [ kappa D0  H*        ]
/// restricted to sites within `rho` of the probe (closed ball; no rho means
/// untruncated). grading_size is the row count of the top block.
struct LocalizerMatrix {
    Matrix matrix;
    double kappa = 0.0;
    Eigen::Vector2d probe{0.0, 0.0};
    std::optional<double> rho;
    Eigen::Index grading_size = 0;
    std::vector<Eigen::Index> window_sites; // geometry indices retained, in order
};

LocalizerMatrix assemble_even_localizer(const SparseComplexMatrix& h, const LatticeGeometry& geom,
                                        double kappa, const Eigen::Vector2d& probe,
                                        std::optional<double> rho = std::nullopt);

/// Odd (1D, chiral) localizer
///   [ kappa D   B        ]
///   [ A         -kappa D ]
/// with A, B the chiral blocks of H in the eigenbasis of J and
/// D = X - x on each sector. Requires J = diag(+1, -1) per site in the
/// site-major index convention and J H J = -H to 1e-12.
LocalizerMatrix assemble_odd_localizer(const SparseComplexMatrix& h, const SparseComplexMatrix& j,
                                       const LatticeGeometry& geom, double kappa, double probe_x,
                                       std::optional<double> rho = std::nullopt);

/// Quantities entering the tuning bounds kappa <= g^3 / (12 |H| N) and
/// rho >= 6 (g/kappa)(1 + |Im H| / g), with
/// N = max(|[D,H]|, |[|D|,H]|) computed from the explicitly formed
/// commutators. Callers may proceed with unsatisfied certificates.
struct HypothesisCertificate {
    double g = 0.0;
    double h_norm = 0.0;
    double im_h_norm = 0.0;
    double commutator_d = 0.0;     // |[D, H]|
    double commutator_abs_d = 0.0; // |[|D|, H]|
    double n_const = 0.0;
    double kappa_max = 0.0; // +inf when N == 0
    double rho_min = 0.0;
    bool kappa_satisfied = false;
    bool rho_satisfied = false;
};

HypothesisCertificate certify_hypotheses(const SparseComplexMatrix& h,
                                         const LatticeGeometry& geom, double kappa,
                                         std::optional<double> rho,
                                         const Eigen::Vector2d& probe, double g);

} // namespace nhsl::localizer
