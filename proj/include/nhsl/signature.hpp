#pragma once

#include "nhsl/localizer.hpp"
#include "nhsl/sparse_matrix.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace nhsl::signature {

enum class Method { EigenCount, RouthHurwitz, SpectralFlow };

/// Signature of a line-gapped matrix: number of eigenvalues with positive
/// real part minus number with negative real part, algebraic multiplicities
/// included. `signature` is the full (even-dimension: even) integer;
/// half() is the topological index. When the gap is closed relative to
/// gap_tolerance the report carries gap_closed and no signature.
struct SignatureReport {
    int signature = 0;
    Method method = Method::EigenCount;
    bool gap_closed = false;
    bool odd_dimension = false; // non-localizer input, half() is half-integer
    std::optional<double> line_gap;
    double residual = 0.0;
    std::vector<cd> eigenvalues;

    double half() const { return signature / 2.0; }
};

inline constexpr double default_gap_tolerance = 1e-8;

/// All eigenvalues via a dense non-symmetric eigensolve; the line-gap is
/// min |Re lambda| and the gap is closed when it falls below
/// gap_tolerance * max |lambda|.
SignatureReport sig_eigencount(const Matrix& l, double gap_tolerance = default_gap_tolerance);
SignatureReport sig_eigencount(const localizer::LocalizerMatrix& l,
                               double gap_tolerance = default_gap_tolerance);

/// Half-signature as the winding integral
///   1/2 Sig(L) = int ds/(2 pi) 1/(1+s^2) Tr((1 + i s L)(L + i s)^{-1}),
/// evaluated with s = tan(theta) and adaptive Gauss-Legendre panels; each
/// node costs one LU solve. Solves with condition number beyond 1e12 mark
/// the gap closed; a residual above 0.1 throws numerical_error.
SignatureReport sig_routh_hurwitz(const Matrix& l, double quadrature_tolerance = 1e-6);
SignatureReport sig_routh_hurwitz(const localizer::LocalizerMatrix& l,
                                  double quadrature_tolerance = 1e-6);

inline constexpr double rh_condition_limit = 1e12;
inline constexpr double rh_residual_limit = 0.1;

struct Crossing {
    double t = 0.0;
    int direction = 0; // +1 left-to-right across Re = 0
};

/// Eigenvalue tracks along a matrix path, matched sample-to-sample by
/// nearest-neighbor assignment, with adaptive interval bisection where a
/// crossing-critical track's match is ambiguous.
struct FlowDiagram {
    std::vector<double> t_samples;
    std::vector<std::vector<cd>> tracks; // tracks[k][i], track k at sample i
    std::vector<Crossing> crossings;
    int net_flow = 0;
    int endpoint_half_sig_difference = 0; // 1/2 (Sig(L1) - Sig(L0)) by eigencount
    bool mismatch = false;

    void write_tracks_csv(std::ostream& os) const;
    void write_crossings_csv(std::ostream& os) const;
};

/// Path must keep a fixed matrix dimension; endpoints must have open
/// line-gaps. Refinement beyond max_levels throws numerical_error.
FlowDiagram spectral_flow(const std::function<Matrix(double)>& path, int steps,
                          int max_levels = 12, double gap_tolerance = default_gap_tolerance);

/// min |Re lambda| of the localizer spectrum.
double localizer_line_gap(const Matrix& l);
double localizer_line_gap(const localizer::LocalizerMatrix& l);

} // namespace nhsl::signature
