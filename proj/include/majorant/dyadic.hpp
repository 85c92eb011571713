#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "majorant/boundary.hpp"
#include "majorant/hyperbolic.hpp"

namespace majorant {

/// Node of the dyadic tree over the circle: arc I_{n,k} of length 2pi 2^{-n}.
struct DyadicIndex {
    int level = 0;
    std::int64_t pos = 0;
};

inline double arc_length(int level) { return kTwoPi * std::ldexp(1.0, -level); }
inline double arc_theta_lo(DyadicIndex i) { return kTwoPi * std::ldexp(static_cast<double>(i.pos), -i.level); }
inline double arc_theta_hi(DyadicIndex i) { return kTwoPi * std::ldexp(static_cast<double>(i.pos + 1), -i.level); }

/// Whitney square above I_{n,k}: {r e^{i theta}: theta in I_{n,k},
/// 1-2^{-n} <= r < 1-2^{-n-1}}. The squares tile the disk; the level of an
/// interior point is floor(-log2(1-|z|)).
struct WhitneySquare {
    DyadicIndex index;
    double r_lo() const { return 1.0 - std::ldexp(1.0, -index.level); }
    double r_hi() const { return 1.0 - std::ldexp(1.0, -index.level - 1); }
    bool contains(Complex z) const;
};

int whitney_level(Complex z);
DyadicIndex whitney_index(Complex z);

/// Values attached to every node of the tree up to `depth`, one vector per
/// level (level n holds 2^n entries).
template <class Scalar>
struct DyadicTree {
    int depth = 0;
    std::vector<std::vector<Scalar>> level_values;

    static DyadicTree zeros(int depth) {
        DyadicTree t;
        t.depth = depth;
        t.level_values.resize(depth + 1);
        for (int n = 0; n <= depth; ++n)
            t.level_values[n].assign(static_cast<size_t>(1) << n, Scalar(0));
        return t;
    }
    Scalar& at(int n, std::int64_t k) { return level_values[n][static_cast<size_t>(k)]; }
    Scalar at(int n, std::int64_t k) const { return level_values[n][static_cast<size_t>(k)]; }
};

/// Demands p_{n,k} >= 0 on the dyadic tree.
using DyadicData = DyadicTree<double>;

void validate(const DyadicData& data);

/// Bottom-up packing recursion. `lengths[n]` is the arc length used for level
/// n, so the same core serves absolute units (2pi 2^{-n}) and exact scaled
/// integer arithmetic (2^{depth-n}).
template <class Scalar>
DyadicTree<Scalar> packing_dp_core(const DyadicTree<Scalar>& data, const std::vector<Scalar>& lengths) {
    DyadicTree<Scalar> best = DyadicTree<Scalar>::zeros(data.depth);
    int N = data.depth;
    for (std::int64_t k = 0; k < (std::int64_t(1) << N); ++k)
        best.at(N, k) = data.at(N, k) * lengths[N];
    for (int n = N - 1; n >= 0; --n) {
        for (std::int64_t k = 0; k < (std::int64_t(1) << n); ++k) {
            Scalar own = data.at(n, k) * lengths[n];
            Scalar split = best.at(n + 1, 2 * k) + best.at(n + 1, 2 * k + 1);
            best.at(n, k) = own > split ? own : split;
        }
    }
    return best;
}

/// DP arrays of Theorem 5's modified data: S_{n,k} (best disjoint-subfamily
/// total below the node, absolute mass units) and p~_{n,k} = S_{n,k}/|I_{n,k}|.
struct DyadicDP {
    DyadicTree<double> best;      // S_{n,k}
    DyadicTree<double> modified;  // p~_{n,k}
    double root() const { return best.at(0, 0); }
};

DyadicDP packing_dp(const DyadicData& data);

/// Least admissible S in the packing condition sum p|I| <= S; equals S_{0,0}.
double packing_condition(const DyadicData& data);

/// Piecewise-uniform positive measure on the circle given by leaf masses at a
/// fixed dyadic depth.
class CircleMeasure {
  public:
    CircleMeasure() = default;
    CircleMeasure(int depth, Eigen::ArrayXd leaf_masses, bool uniform = false);
    static CircleMeasure uniform(int depth, double total_mass);

    int depth() const { return depth_; }
    bool is_uniform() const { return uniform_; }
    const Eigen::ArrayXd& leaf_masses() const { return leaf_mass_; }
    double total() const { return total_; }

    /// Mass of the dyadic arc I_{n,k}, n <= depth.
    double node_mass(DyadicIndex idx) const;
    /// Mass of an arbitrary arc [theta0, theta1), theta1 - theta0 in [0, 2pi].
    double arc_mass(double theta0, double theta1) const;

  private:
    int depth_ = 0;
    Eigen::ArrayXd leaf_mass_;
    Eigen::ArrayXd cumulative_;  // cumulative_[k] = sum of leaves < k
    double total_ = 0.0;
    bool uniform_ = false;
};

/// Theorem 5 construction: top-down mass splitting. The result has total mass
/// S_{0,0} and mu(I_{n,k}) >= |I_{n,k}| p~_{n,k} at every node.
CircleMeasure build_dominating_measure(const DyadicData& data);

/// Direct construction: f(e^{i theta}) = sum over arcs containing the point
/// of p_{n,k}; a step function constant on depth-N leaves.
BoundaryDensity direct_density(const DyadicData& data);

/// Square-kernel value mu(I_z)/|I_z| where I_z = {e^{i theta}: z in
/// Gamma_alpha(e^{i theta})}. Empty I_z (z too central for the aperture)
/// yields nullopt.
std::optional<double> square_kernel_value(const CircleMeasure& mu, Complex z, double alpha);

/// Boundary arc I_z as (theta_center, half_width); half_width == pi means the
/// full circle, nullopt means empty.
std::optional<std::pair<double, double>> square_kernel_arc(Complex z, double alpha);

// Serialization. DyadicData as text ("depth" line, then "n k p" lines);
// CircleMeasure as CSV "k,mass" at leaf depth.
void save_dyadic_data(std::ostream& os, const DyadicData& data);
DyadicData load_dyadic_data(std::istream& is);
void save_circle_measure(std::ostream& os, const CircleMeasure& mu);
CircleMeasure load_circle_measure(std::istream& is);

}  // namespace majorant
