#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <iosfwd>
#include <vector>

namespace nhsl {

using cd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Square sparse matrix of complex doubles in compressed-row form.
/// Entries with |v| <= 1e-15 are dropped at assembly; column indices within
/// each row are strictly increasing; assembly is deterministic, so identical
/// triplet streams produce bit-identical matrices.
class SparseComplexMatrix {
public:
    using Storage = Eigen::SparseMatrix<cd, Eigen::RowMajor>;
    using Triplet = Eigen::Triplet<cd>;

    SparseComplexMatrix() = default;
    explicit SparseComplexMatrix(Storage m);

    static SparseComplexMatrix from_triplets(Eigen::Index n, const std::vector<Triplet>& ts);
    static SparseComplexMatrix identity(Eigen::Index n);

    Eigen::Index dimension() const { return m_.rows(); }
    Eigen::Index nonzeros() const { return m_.nonZeros(); }
    const Storage& storage() const { return m_; }

    Matrix dense() const { return Matrix(m_); }

    /// Triplet text format: header "n nnz", then one "row col re im" line
    /// per entry, 17 significant digits, row-major order.
    void write_triplets(std::ostream& os) const;
    static SparseComplexMatrix read_triplets(std::istream& is);

    static constexpr double assembly_drop_tolerance = 1e-15;

private:
    Storage m_;
};

} // namespace nhsl
