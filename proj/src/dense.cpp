#include "nhsl/dense.hpp"
#include "nhsl/errors.hpp"

#include <lapacke.h>

namespace nhsl::dense {

namespace {

lapack_complex_double* lp(cd* p) { return reinterpret_cast<lapack_complex_double*>(p); }
const lapack_complex_double* lp(const cd* p) {
    return reinterpret_cast<const lapack_complex_double*>(p);
}

lapack_logical select_negative_real(const lapack_complex_double* w) {
    return reinterpret_cast<const cd*>(w)->real() < 0.0;
}

} // namespace

std::vector<cd> eigenvalues(const Matrix& a) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    if (a.rows() != a.cols()) throw validation_error("eigenvalues: matrix must be square");
    if (n == 0) return {};
    Matrix work = a;
    std::vector<cd> w(n);
    lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, lp(work.data()), n,
                                    lp(w.data()), nullptr, 1, nullptr, 1);
    if (info != 0) throw numerical_error("zgeev failed, info=" + std::to_string(info));
    return w;
}

std::vector<double> singular_values(const Matrix& a) {
    const lapack_int m = static_cast<lapack_int>(a.rows());
    const lapack_int n = static_cast<lapack_int>(a.cols());
    if (m == 0 || n == 0) return {};
    Matrix work = a;
    std::vector<double> s(std::min(m, n));
    lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, lp(work.data()), m,
                                     s.data(), nullptr, 1, nullptr, 1);
    if (info != 0) throw numerical_error("zgesdd failed, info=" + std::to_string(info));
    return s;
}

double smallest_singular_value(const Matrix& a) {
    auto s = singular_values(a);
    return s.empty() ? 0.0 : s.back();
}

double operator_norm(const Matrix& a) {
    auto s = singular_values(a);
    return s.empty() ? 0.0 : s.front();
}

OrderedSchur schur_ordered_negative_real(const Matrix& a) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    if (a.rows() != a.cols()) throw validation_error("schur: matrix must be square");
    OrderedSchur out;
    out.t = a;
    out.z.resize(n, n);
    if (n == 0) return out;
    std::vector<cd> w(n);
    lapack_int sdim = 0;
    lapack_int info =
        LAPACKE_zgees(LAPACK_COL_MAJOR, 'V', 'S', select_negative_real, n, lp(out.t.data()), n,
                      &sdim, lp(w.data()), lp(out.z.data()), n);
    if (info != 0) throw numerical_error("zgees failed, info=" + std::to_string(info));
    out.neg_count = static_cast<int>(sdim);
    return out;
}

Matrix sylvester_triangular(const Matrix& t11, const Matrix& t22, const Matrix& c) {
    const lapack_int m = static_cast<lapack_int>(t11.rows());
    const lapack_int n = static_cast<lapack_int>(t22.rows());
    Matrix x = c;
    double scale = 1.0;
    lapack_int info = LAPACKE_ztrsyl(LAPACK_COL_MAJOR, 'N', 'N', -1, m, n,
                                     lp(t11.data()), m, lp(t22.data()), n,
                                     lp(x.data()), m, &scale);
    if (info < 0) throw numerical_error("ztrsyl failed, info=" + std::to_string(info));
    if (info == 1 || scale < 1e-3)
        throw numerical_error("sylvester solve near-singular: spectral clusters too close");
    x /= scale;
    return x;
}

LuFactor::LuFactor(Matrix a) : lu_(std::move(a)) {
    const lapack_int n = static_cast<lapack_int>(lu_.rows());
    if (lu_.rows() != lu_.cols()) throw validation_error("lu: matrix must be square");
    anorm_ = lu_.cwiseAbs().colwise().sum().maxCoeff();
    ipiv_.resize(n);
    std::vector<lapack_int> piv(n);
    lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, lp(lu_.data()), n, piv.data());
    if (info < 0) throw numerical_error("zgetrf failed, info=" + std::to_string(info));
    // info > 0 (exact singularity) surfaces as rcond() == 0
    for (lapack_int i = 0; i < n; ++i) ipiv_[i] = static_cast<int>(piv[i]);
    singular_ = info > 0;
}

double LuFactor::rcond() const {
    if (singular_) return 0.0;
    const lapack_int n = static_cast<lapack_int>(lu_.rows());
    double rc = 0.0;
    lapack_int info = LAPACKE_zgecon(LAPACK_COL_MAJOR, '1', n, lp(lu_.data()), n, anorm_, &rc);
    if (info != 0) throw numerical_error("zgecon failed, info=" + std::to_string(info));
    return rc;
}

Matrix LuFactor::solve(const Matrix& b) const {
    if (singular_) throw numerical_error("lu solve: matrix is exactly singular");
    const lapack_int n = static_cast<lapack_int>(lu_.rows());
    const lapack_int nrhs = static_cast<lapack_int>(b.cols());
    Matrix x = b;
    std::vector<lapack_int> piv(ipiv_.begin(), ipiv_.end());
    lapack_int info = LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n, nrhs, lp(lu_.data()), n,
                                     piv.data(), lp(x.data()), n);
    if (info != 0) throw numerical_error("zgetrs failed, info=" + std::to_string(info));
    return x;
}

} // namespace nhsl::dense
