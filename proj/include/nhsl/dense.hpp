#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

// Thin wrappers around the LAPACK routines this project actually needs.
// Everything is dense, double precision, column major (Eigen's default).

namespace nhsl::dense {

using cd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// All eigenvalues of a general complex matrix (no eigenvectors).
std::vector<cd> eigenvalues(const Matrix& a);

/// Singular values, descending.
std::vector<double> singular_values(const Matrix& a);

double smallest_singular_value(const Matrix& a);

/// Spectral norm ||a||_2.
double operator_norm(const Matrix& a);

/// Schur decomposition a = z t z* with the eigenvalues satisfying
/// Re < 0 ordered into the leading block. neg_count is that block's size.
struct OrderedSchur {
    Matrix t;
    Matrix z;
    int neg_count = 0;
};
OrderedSchur schur_ordered_negative_real(const Matrix& a);

/// Solve t11 y - y t22 = c for y (t11, t22 upper triangular).
/// Throws numerical_error when the spectra of t11 and t22 are too close.
Matrix sylvester_triangular(const Matrix& t11, const Matrix& t22, const Matrix& c);

/// LU factorization with partial pivoting, kept for repeated solves.
class LuFactor {
public:
    explicit LuFactor(Matrix a);

    /// Reciprocal condition number estimate in the 1-norm.
    double rcond() const;

    /// X = A^{-1} B.
    Matrix solve(const Matrix& b) const;

private:
    Matrix lu_;
    std::vector<int> ipiv_;
    double anorm_ = 0.0;
    bool singular_ = false;
};

} // namespace nhsl::dense
