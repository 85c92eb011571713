#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <stdexcept>

#include "majorant/hyperbolic.hpp"

namespace majorant {

/// Hyperbolic-polar lattice on the disk: rings at hyperbolic radius i*drho
/// (Euclidean radius tanh(i*drho)), i = 0..n_rho, with n_theta equally spaced
/// angles. Ring 0 is the center repeated across all angle columns.
struct DiskGrid {
    double drho = 0.1;
    int n_rho = 80;
    int n_theta = 256;

    double rho(int i) const { return i * drho; }
    double radius(int i) const { return std::tanh(rho(i)); }
    double theta_step() const { return kTwoPi / n_theta; }
    double theta(int m) const { return m * theta_step(); }
    Complex point(int i, int m) const { return std::polar(radius(i), theta(m)); }
    double r_max() const { return n_rho * drho; }
    long size() const { return static_cast<long>(n_rho + 1) * n_theta; }

    /// Largest hyperbolic distance between neighboring grid points (the
    /// angular step on the outermost ring dominates for realistic shapes).
    double mesh_diameter() const;

    /// Largest radius where the angular cells are hyperbolically no coarser
    /// than `c_res` radial steps. Quadrature against sampled data is only
    /// trustworthy for discs inside this region; beyond it the lattice cannot
    /// represent boundary-concentrated features.
    double resolved_rho(double c_res = 0.75) const {
        return 0.5 * std::asinh(c_res * drho * n_theta / kPi);
    }

    /// Nearest grid node in (rho, theta) index space.
    std::pair<int, int> nearest(Complex z) const;

    bool operator==(const DiskGrid& o) const {
        return drho == o.drho && n_rho == o.n_rho && n_theta == o.n_theta;
    }
};

/// Nonnegative function sampled on a DiskGrid, +infinity allowed as a flagged
/// singular value. Evaluation off the lattice is nearest-neighbor.
struct GridFunction {
    DiskGrid grid;
    Eigen::ArrayXXd values;  // (n_rho+1) x n_theta

    GridFunction() = default;
    explicit GridFunction(const DiskGrid& g) : grid(g), values(Eigen::ArrayXXd::Zero(g.n_rho + 1, g.n_theta)) {}

    double eval(Complex z) const {
        auto [i, m] = grid.nearest(z);
        return values(i, m);
    }
    double at_center() const { return values(0, 0); }
    bool has_infinite() const { return values.isInf().any(); }
};

GridFunction sample_on_grid(const DiskGrid& grid, const std::function<double(Complex)>& f);

// CSV exchange format: one header line "# drho=<..> n_rho=<..> n_theta=<..>",
// then "x,y,value" rows in ring-major order. Infinities are written as the
// literal token "inf" and reload as the sentinel.
void save_grid_csv(std::ostream& os, const GridFunction& gf);
GridFunction load_grid_csv(std::istream& is);

}  // namespace majorant
