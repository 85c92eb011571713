#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "majorant/boundary.hpp"
#include "majorant/dyadic.hpp"
#include "majorant/grid.hpp"
#include "majorant/hyperbolic.hpp"

namespace majorant {

/// Interior point with a positive Riesz mass.
struct WeightedZero {
    Complex position;
    double mass = 1.0;
};

struct ZeroSet {
    Domain domain = Domain::disk;
    std::vector<WeightedZero> zeros;
    double total_mass() const {
        double s = 0;
        for (auto& z : zeros) s += z.mass;
        return s;
    }
};

/// Disk Poisson kernel P_z(e^{i theta}) = (1/2pi)(1-|z|^2)/|z-e^{i theta}|^2.
double poisson_kernel(Complex z, double theta);
/// Half-plane Poisson kernel P_y(t) = (1/pi) y/(y^2+t^2).
double poisson_kernel_halfplane(double y, double t);

/// Exact integral of P_z over the arc [theta0, theta1] (theta1-theta0 <= 2pi).
double poisson_arc_integral(Complex z, double theta0, double theta1);

double poisson_integral(const CircleMeasure& mu, Complex z);
double poisson_integral(const BoundaryDensity& mu, Complex z);
double poisson_integral(std::span<const PointMass> atoms, Complex z, Domain domain);

/// Log potential of the zero set: sum of mass * log(1/d(z, z_k)). Returns
/// +infinity exactly when z coincides with a zero; never overflows otherwise,
/// so the infinity sentinel is unambiguous.
double blaschke_log(const ZeroSet& zeros, Complex z);

/// Positive harmonic function represented by boundary data plus closed-form
/// extra terms; evaluable anywhere in the domain.
struct HarmonicFunctionDescriptor {
    Domain domain = Domain::disk;
    BoundaryDensity density;                    // absolutely continuous part
    std::vector<PointMass> atoms;               // atomic part
    double farfield_constant = 0.0;             // coefficient C_delta of the h2 term
    ZeroSet farfield_zeros;                     // Riesz masses feeding h2
    double linear_coeff = 0.0;                  // half-plane c*y term
    double prefactor = 1.0;                     // overall multiplier (Harnack slack)

    double evaluate(Complex z) const;
};

void save_descriptor(std::ostream& os, const HarmonicFunctionDescriptor& h);

/// Constants measured while building the harmonic majorant of
/// u = blaschke_log(nu, .) + poisson_integral(h0, .).
struct MajorantBuildReport {
    double c_delta = 0.0;       // far-field comparison constant
    double c_alpha = 0.0;       // Whitney kernel comparison constant
    double lemma1_constant = 0.0;
    double c1 = 0.0;            // measured (1+rho) log-regularity of u
    double r2 = 0.0;            // covering radius of the Whitney net
    double slack = 1.0;         // exp[c1(1+r2)] e^{2 r2}
    double t_area_fraction = 0.0;
    int whitney_depth = 0;
};

/// Constructive harmonic majorant of u = log-potential + harmonic part,
/// following the near/far split at pseudohyperbolic distance delta. The
/// domination h >= u is guaranteed at net points by construction and checked
/// a posteriori on the grid by the caller (outside hyperbolic delta/8
/// neighborhoods of the zeros).
HarmonicFunctionDescriptor build_harmonic_majorant(const ZeroSet& nu, const BoundaryDensity& h0, double delta,
                                                   const DiskGrid& grid, MajorantBuildReport* report = nullptr);

/// Numeric estimate of the far-field constant: sup over sampled pairs with
/// d(z,w) > delta of log(1/d) |1-z conj(w)|^2 / ((1-|zw|^2)(1-|w|^2)),
/// times a 1.05 safety factor.
double estimate_far_field_constant(double delta, int samples = 200000, unsigned seed = 2026);

/// Empirical Whitney comparison constant: min over levels and samples of
/// P_z(e^{i theta}) |I_{n,k}| for z in Q_{n,k}, theta in I_{n,k}.
double estimate_whitney_constant(int max_level = 10);

struct AngleSampling {
    int n_levels = 160;      // heights, log-spaced
    int n_across = 9;        // samples across the angle per height
    double height_min = 1e-7;
    double height_max = 2.0; // overridden by the angle's truncation
};

/// Nontangential maximal value: supremum of f over a deterministic sample of
/// the (truncated) Stolz angle. The sample includes the angle's edges and the
/// |x|+y minimizer so that M phi_sigma(xi) = sigma(|xi|) is attained exactly.
double nontangential_max(const std::function<double(Complex)>& f, const StolzAngle& angle,
                         const AngleSampling& sampling = {});

struct WeakL1Profile {
    std::vector<double> thresholds;
    std::vector<double> measures;  // |{g > lambda}| per threshold
    double least_c = 0.0;          // smallest C with measure <= C/lambda on the thresholds
};

/// Empirical distribution profile of boundary samples g with cell weights w.
WeakL1Profile weak_l1_profile(std::span<const double> samples, std::span<const double> weights,
                              std::span<const double> thresholds);

}  // namespace majorant
