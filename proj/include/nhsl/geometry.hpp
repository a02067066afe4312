#pragma once

#include <Eigen/Dense>
#include <vector>

namespace nhsl {

enum class Sublattice : unsigned char { A, B };

struct Site {
    Eigen::Vector2d position;
    Sublattice sublattice = Sublattice::A;
    int region = 0;
};

/// Finite list of lattice sites with positions, sublattice and region tags.
/// Site order is part of the value: builders emit a stable sort by
/// (x, y, sublattice), so identical build parameters give identical layouts.
/// `orbital_count` internal degrees of freedom per site; matrix index
/// convention is site-major, index = site * orbital_count + orbital.
class LatticeGeometry {
public:
    LatticeGeometry(std::vector<Site> sites, int orbital_count = 1);

    Eigen::Index site_count() const { return static_cast<Eigen::Index>(sites_.size()); }
    int orbital_count() const { return orbital_count_; }
    Eigen::Index dimension() const { return site_count() * orbital_count_; }

    const Site& site(Eigen::Index i) const { return sites_[static_cast<size_t>(i)]; }
    const std::vector<Site>& sites() const { return sites_; }

    /// Position diagonals expanded to the full matrix dimension.
    Eigen::VectorXd x_diagonal() const;
    Eigen::VectorXd y_diagonal() const;

    /// Site owning a matrix index.
    Eigen::Index site_of_index(Eigen::Index k) const { return k / orbital_count_; }

    static constexpr double min_site_separation = 1e-9;

private:
    std::vector<Site> sites_;
    int orbital_count_;
};

} // namespace nhsl
