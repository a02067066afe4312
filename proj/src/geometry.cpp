#include "nhsl/geometry.hpp"
#include "nhsl/errors.hpp"

#include <algorithm>
#include <string>

namespace nhsl {

LatticeGeometry::LatticeGeometry(std::vector<Site> sites, int orbital_count)
    : sites_(std::move(sites)), orbital_count_(orbital_count) {
    if (orbital_count_ < 1) throw validation_error("orbital_count must be positive");
    std::stable_sort(sites_.begin(), sites_.end(), [](const Site& a, const Site& b) {
        if (a.position.x() != b.position.x()) return a.position.x() < b.position.x();
        if (a.position.y() != b.position.y()) return a.position.y() < b.position.y();
        return a.sublattice < b.sublattice;
    });
    const double min_sep2 = min_site_separation * min_site_separation;
    for (size_t i = 0; i < sites_.size(); ++i)
        for (size_t j = i + 1; j < sites_.size(); ++j)
            if ((sites_[i].position - sites_[j].position).squaredNorm() <= min_sep2)
                throw validation_error("sites " + std::to_string(i) + " and " +
                                       std::to_string(j) + " coincide");
}

Eigen::VectorXd LatticeGeometry::x_diagonal() const {
    Eigen::VectorXd d(dimension());
    for (Eigen::Index i = 0; i < site_count(); ++i)
        for (int o = 0; o < orbital_count_; ++o) d[i * orbital_count_ + o] = sites_[i].position.x();
    return d;
}

Eigen::VectorXd LatticeGeometry::y_diagonal() const {
    Eigen::VectorXd d(dimension());
    for (Eigen::Index i = 0; i < site_count(); ++i)
        for (int o = 0; o < orbital_count_; ++o) d[i * orbital_count_ + o] = sites_[i].position.y();
    return d;
}

} // namespace nhsl
