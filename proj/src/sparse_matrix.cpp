#include "nhsl/sparse_matrix.hpp"
#include "nhsl/errors.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

namespace nhsl {

SparseComplexMatrix::SparseComplexMatrix(Storage m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw validation_error("sparse matrix must be square");
    m_.prune([](Eigen::Index, Eigen::Index, const cd& v) {
        return std::abs(v) > assembly_drop_tolerance;
    });
    m_.makeCompressed();
}

SparseComplexMatrix SparseComplexMatrix::from_triplets(Eigen::Index n,
                                                       const std::vector<Triplet>& ts) {
    if (n < 0) throw validation_error("sparse matrix dimension must be non-negative");
    for (const auto& t : ts)
        if (t.row() < 0 || t.row() >= n || t.col() < 0 || t.col() >= n)
            throw validation_error("triplet index out of range");
    Storage m(n, n);
    m.setFromTriplets(ts.begin(), ts.end());
    return SparseComplexMatrix(std::move(m));
}

SparseComplexMatrix SparseComplexMatrix::identity(Eigen::Index n) {
    Storage m(n, n);
    m.setIdentity();
    return SparseComplexMatrix(std::move(m));
}

void SparseComplexMatrix::write_triplets(std::ostream& os) const {
    os << m_.rows() << ' ' << m_.nonZeros() << '\n';
    char buf[128];
    for (Eigen::Index r = 0; r < m_.outerSize(); ++r) {
        for (Storage::InnerIterator it(m_, r); it; ++it) {
            std::snprintf(buf, sizeof buf, "%lld %lld %.17g %.17g\n",
                          static_cast<long long>(it.row()), static_cast<long long>(it.col()),
                          it.value().real(), it.value().imag());
            os << buf;
        }
    }
}

SparseComplexMatrix SparseComplexMatrix::read_triplets(std::istream& is) {
    long long n = 0, nnz = 0;
    if (!(is >> n >> nnz)) throw validation_error("triplet stream: bad header");
    std::vector<Triplet> ts;
    ts.reserve(static_cast<size_t>(nnz));
    for (long long k = 0; k < nnz; ++k) {
        long long r, c;
        double re, im;
        if (!(is >> r >> c >> re >> im)) throw validation_error("triplet stream: short read");
        ts.emplace_back(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c), cd(re, im));
    }
    return from_triplets(static_cast<Eigen::Index>(n), ts);
}

} // namespace nhsl
