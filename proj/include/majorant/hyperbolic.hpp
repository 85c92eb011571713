#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace majorant {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// The two domains the library works on. Points never convert silently
/// between them; mixing domains in a distance call is an error.
enum class Domain { disk, half_plane };

struct Point {
    Complex z;
    Domain domain;
};

inline bool interior(Complex z, Domain d) {
    return d == Domain::disk ? std::norm(z) < 1.0 : z.imag() > 0.0;
}

inline Point disk_point(double re, double im) {
    if (re * re + im * im >= 1.0) throw std::domain_error("disk_point: |z| >= 1");
    return {Complex(re, im), Domain::disk};
}

inline Point half_plane_point(double x, double y) {
    if (!(y > 0.0)) throw std::domain_error("half_plane_point: y <= 0");
    return {Complex(x, y), Domain::half_plane};
}

/// Pseudohyperbolic (Gleason) distance. |(z-w)/(1-conj(z)w)| on the disk,
/// |(z-w)/(z-conj(w))| on the upper half-plane.
inline double pseudo_distance(Complex z, Complex w, Domain d) {
    if (d == Domain::disk) return std::abs((z - w) / (1.0 - std::conj(z) * w));
    return std::abs((z - w) / (z - std::conj(w)));
}

inline void require_interior(Complex z, Domain d, const char* who) {
    if (!interior(z, d)) throw std::domain_error(std::string(who) + ": point not interior to domain");
}

inline double pseudo_distance(Point z, Point w) {
    if (z.domain != w.domain) throw std::invalid_argument("pseudo_distance: mixed domains");
    require_interior(z.z, z.domain, "pseudo_distance");
    require_interior(w.z, w.domain, "pseudo_distance");
    return pseudo_distance(z.z, w.z, z.domain);
}

/// rho = (1/2) log((1+d)/(1-d)) = atanh(d).
inline double rho_from_pseudo(double d) { return std::atanh(d); }

inline double hyperbolic_distance(Complex z, Complex w, Domain d) {
    return rho_from_pseudo(pseudo_distance(z, w, d));
}

inline double hyperbolic_distance(Point z, Point w) {
    return rho_from_pseudo(pseudo_distance(z, w));
}

/// Involutive Möbius automorphism of the disk exchanging `base` and 0.
inline Complex mobius_involution(Complex base, Complex z) {
    return (base - z) / (1.0 - std::conj(base) * z);
}

struct EuclideanDisc {
    Complex center;
    double radius;
};

/// Euclidean realization of the hyperbolic disc D_H(c, r) in the unit disk.
/// For c = 0 this is D(0, tanh r).
inline EuclideanDisc hyperbolic_disc_euclidean(Complex c, double r) {
    if (!(r >= 0.0)) throw std::domain_error("hyperbolic_disc_euclidean: r < 0");
    require_interior(c, Domain::disk, "hyperbolic_disc_euclidean");
    double t = std::tanh(r);
    double t2 = t * t, a2 = std::norm(c);
    double den = 1.0 - t2 * a2;
    return {c * ((1.0 - t2) / den), t * (1.0 - a2) / den};
}

/// Half-plane version: D_H(x0 + i y0, r) is the Euclidean disc with center
/// x0 + i y0 cosh(2r) and radius y0 sinh(2r).
inline EuclideanDisc halfplane_disc_euclidean(Complex c, double r) {
    if (!(r >= 0.0)) throw std::domain_error("halfplane_disc_euclidean: r < 0");
    require_interior(c, Domain::half_plane, "halfplane_disc_euclidean");
    double y0 = c.imag();
    return {Complex(c.real(), y0 * std::cosh(2.0 * r)), y0 * std::sinh(2.0 * r)};
}

/// Harnack factors at pseudohyperbolic radius r: ((1-r)/(1+r), (1+r)/(1-r)).
inline std::pair<double, double> harnack_bounds(double r) {
    if (!(r >= 0.0 && r < 1.0)) throw std::domain_error("harnack_bounds: r outside [0,1)");
    return {(1.0 - r) / (1.0 + r), (1.0 + r) / (1.0 - r)};
}

/// Stolz angle with vertex on the boundary. `truncation` caps the height
/// 1-|z|^2 (disk) resp. y (half-plane).
struct StolzAngle {
    Domain domain = Domain::half_plane;
    Complex vertex;  // unit modulus for the disk, real t for the half-plane
    double aperture = 1.0;
    std::optional<double> truncation;
};

inline StolzAngle disk_stolz(Complex vertex, double aperture,
                             std::optional<double> truncation = std::nullopt) {
    if (std::abs(std::abs(vertex) - 1.0) > 1e-12)
        throw std::domain_error("disk_stolz: vertex must have unit modulus");
    if (!(aperture > 0.0)) throw std::domain_error("disk_stolz: aperture <= 0");
    if (truncation && !(*truncation > 0.0)) throw std::domain_error("disk_stolz: truncation <= 0");
    return {Domain::disk, vertex, aperture, truncation};
}

inline StolzAngle halfplane_stolz(double vertex, double aperture,
                                  std::optional<double> truncation = std::nullopt) {
    if (!(aperture > 0.0)) throw std::domain_error("halfplane_stolz: aperture <= 0");
    if (truncation && !(*truncation > 0.0)) throw std::domain_error("halfplane_stolz: truncation <= 0");
    return {Domain::half_plane, Complex(vertex, 0.0), aperture, truncation};
}

inline bool stolz_contains(const StolzAngle& angle, Complex z) {
    if (!interior(z, angle.domain)) return false;
    if (angle.domain == Domain::disk) {
        double height = 1.0 - std::norm(z);
        if (angle.truncation && height > *angle.truncation) return false;
        return std::abs(z - angle.vertex) <= angle.aperture * height;
    }
    double y = z.imag();
    if (angle.truncation && y > *angle.truncation) return false;
    return std::abs(z.real() - angle.vertex.real()) <= angle.aperture * y;
}

/// beta(D_H(z, r)) = pi sinh^2 r, the invariant area of a hyperbolic disc
/// (independent of the center by Möbius invariance of beta).
inline double beta_disc_mass(double r) {
    double s = std::sinh(r);
    return kPi * s * s;
}

}  // namespace majorant
