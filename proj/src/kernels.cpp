#include "majorant/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <set>

#include "majorant/parallel.hpp"

namespace majorant {

double poisson_kernel(Complex z, double theta) {
    require_interior(z, Domain::disk, "poisson_kernel");
    Complex zeta = std::polar(1.0, theta);
    return (1.0 - std::norm(z)) / (kTwoPi * std::norm(z - zeta));
}

double poisson_kernel_halfplane(double y, double t) {
    if (!(y > 0.0)) throw std::domain_error("poisson_kernel_halfplane: y <= 0");
    return y / (kPi * (y * y + t * t));
}

namespace {

// Antiderivative of the Poisson kernel in the angle offset psi = theta - arg z:
// monotone on all of R, gains 1 per full turn.
double poisson_cdf(double r, double psi) {
    double n = std::floor((psi + kPi) / kTwoPi);
    double p = psi - kTwoPi * n;  // in [-pi, pi)
    double k = (1.0 + r) / (1.0 - r);
    return n + std::atan2(k * std::sin(0.5 * p), std::cos(0.5 * p)) / kPi;
}

}  // namespace

double poisson_arc_integral(Complex z, double theta0, double theta1) {
    require_interior(z, Domain::disk, "poisson_arc_integral");
    if (theta1 <= theta0) return 0.0;
    if (theta1 - theta0 >= kTwoPi) return 1.0;
    double r = std::abs(z);
    if (r == 0.0) return (theta1 - theta0) / kTwoPi;
    double phi = std::arg(z);
    return poisson_cdf(r, theta1 - phi) - poisson_cdf(r, theta0 - phi);
}

double poisson_integral(const CircleMeasure& mu, Complex z) {
    require_interior(z, Domain::disk, "poisson_integral");
    if (mu.is_uniform()) return mu.total() / kTwoPi;
    double len = arc_length(mu.depth());
    double acc = 0.0;
    const auto& leaves = mu.leaf_masses();
    for (Eigen::Index k = 0; k < leaves.size(); ++k) {
        if (leaves[k] == 0.0) continue;
        double lo = static_cast<double>(k) * len;
        acc += leaves[k] * poisson_arc_integral(z, lo, lo + len) / len;
    }
    return acc * kTwoPi / kTwoPi;  // arc integral is normalized; masses carry the scale
}

double poisson_integral(const BoundaryDensity& mu, Complex z) {
    if (mu.empty()) return 0.0;
    if (mu.domain == Domain::disk) {
        require_interior(z, Domain::disk, "poisson_integral");
        double acc = 0.0;
        size_t n = mu.breakpoints.size();
        for (size_t i = 0; i < n; ++i) {
            if (mu.values[static_cast<Eigen::Index>(i)] == 0.0) continue;
            double lo = mu.breakpoints[i];
            double hi = (i + 1 < n) ? mu.breakpoints[i + 1] : mu.breakpoints[0] + kTwoPi;
            acc += mu.values[static_cast<Eigen::Index>(i)] * poisson_arc_integral(z, lo, hi);
        }
        return acc;
    }
    require_interior(z, Domain::half_plane, "poisson_integral");
    double x = z.real(), y = z.imag();
    double acc = 0.0;
    for (size_t i = 0; i + 1 < mu.breakpoints.size(); ++i) {
        double v = mu.values[static_cast<Eigen::Index>(i)];
        if (v == 0.0) continue;
        double a = mu.breakpoints[i], b = mu.breakpoints[i + 1];
        acc += v * (std::atan((x - a) / y) - std::atan((x - b) / y)) / kPi;
    }
    return acc;
}

double poisson_integral(std::span<const PointMass> atoms, Complex z, Domain domain) {
    require_interior(z, domain, "poisson_integral");
    double acc = 0.0;
    if (domain == Domain::disk) {
        for (const auto& a : atoms) acc += a.mass * poisson_kernel(z, a.position);
    } else {
        for (const auto& a : atoms) acc += a.mass * poisson_kernel_halfplane(z.imag(), z.real() - a.position);
    }
    return acc;
}

double blaschke_log(const ZeroSet& zeros, Complex z) {
    require_interior(z, zeros.domain, "blaschke_log");
    double acc = 0.0;
    for (const auto& zk : zeros.zeros) {
        double d = pseudo_distance(z, zk.position, zeros.domain);
        if (d == 0.0) return std::numeric_limits<double>::infinity();
        acc += zk.mass * std::log(1.0 / d);
    }
    return acc;
}

double HarmonicFunctionDescriptor::evaluate(Complex z) const {
    require_interior(z, domain, "HarmonicFunctionDescriptor::evaluate");
    double acc = 0.0;
    if (!density.empty()) acc += poisson_integral(density, z);
    if (!atoms.empty()) acc += poisson_integral(std::span<const PointMass>(atoms), z, domain);
    if (domain == Domain::half_plane) acc += linear_coeff * z.imag();
    if (farfield_constant > 0.0) {
        double h2 = 0.0;
        for (const auto& zk : farfield_zeros.zeros) {
            Complex w = zk.position;
            double num = (1.0 - std::norm(z) * std::norm(w)) * (1.0 - std::norm(w));
            h2 += zk.mass * num / std::norm(1.0 - z * std::conj(w));
        }
        acc += farfield_constant * h2;
    }
    return prefactor * acc;
}

void save_descriptor(std::ostream& os, const HarmonicFunctionDescriptor& h) {
    os.precision(17);
    os << "domain " << (h.domain == Domain::disk ? "disk" : "half_plane") << "\n";
    os << "prefactor " << h.prefactor << "\n";
    os << "linear_coeff " << h.linear_coeff << "\n";
    os << "farfield_constant " << h.farfield_constant << "\n";
    os << "farfield_zeros " << h.farfield_zeros.zeros.size() << "\n";
    for (const auto& zk : h.farfield_zeros.zeros)
        os << zk.position.real() << " " << zk.position.imag() << " " << zk.mass << "\n";
    os << "atoms " << h.atoms.size() << "\n";
    for (const auto& a : h.atoms) os << a.position << " " << a.mass << "\n";
    os << "density_pieces " << h.density.breakpoints.size() << "\n";
    for (size_t i = 0; i < h.density.breakpoints.size(); ++i)
        os << h.density.breakpoints[i] << " " << h.density.values[static_cast<Eigen::Index>(i)] << "\n";
}

double estimate_far_field_constant(double delta, int samples, unsigned seed) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("estimate_far_field_constant: delta outside (0,1)");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto boundary_biased = [&]() {
        double u = 0.15 + 5.85 * unif(rng);
        double r = 1.0 - std::pow(10.0, -u);
        return std::polar(r, kTwoPi * unif(rng));
    };
    auto ratio = [&](Complex z, Complex w) {
        double d = pseudo_distance(z, w, Domain::disk);
        if (d <= delta || d >= 1.0) return 0.0;
        double num = std::log(1.0 / d) * std::norm(1.0 - z * std::conj(w));
        double den = (1.0 - std::norm(z) * std::norm(w)) * (1.0 - std::norm(w));
        return num / den;
    };
    double best = std::log(1.0 / delta);  // attained in the limit w -> 0, |z| = delta
    for (int s = 0; s < samples; ++s) {
        Complex w = boundary_biased();
        Complex z;
        if (s % 2 == 0) {
            z = boundary_biased();
        } else {
            // pair at pseudohyperbolic distance just above delta from w
            double v = unif(rng);
            double d = delta + (1.0 - delta) * v * v * v;
            Complex zeta = std::polar(d, kTwoPi * unif(rng));
            z = mobius_involution(w, zeta);
        }
        best = std::max(best, ratio(z, w));
        best = std::max(best, ratio(w, z));
    }
    return 1.05 * best;
}

double estimate_whitney_constant(int max_level) {
    double worst = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= max_level; ++n) {
        WhitneySquare q{{n, 0}};
        double len = arc_length(n);
        for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b) {
                double r = q.r_lo() + (q.r_hi() - q.r_lo()) * (a + 0.5) / 8.0;
                double th = len * (b + 0.5) / 8.0;
                Complex z = std::polar(r, th);
                for (int c = 0; c < 16; ++c) {
                    double thp = len * (c + 0.5) / 16.0;
                    worst = std::min(worst, poisson_kernel(z, thp) * len);
                }
            }
    }
    return 0.9 * worst;
}

namespace {

// Merge two circle step functions into one by summing values.
BoundaryDensity merge_add(const BoundaryDensity& a, const BoundaryDensity& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    std::set<double> cuts(a.breakpoints.begin(), a.breakpoints.end());
    cuts.insert(b.breakpoints.begin(), b.breakpoints.end());
    BoundaryDensity out;
    out.domain = Domain::disk;
    out.breakpoints.assign(cuts.begin(), cuts.end());
    out.values.resize(static_cast<Eigen::Index>(out.breakpoints.size()));
    for (size_t i = 0; i < out.breakpoints.size(); ++i) {
        double lo = out.breakpoints[i];
        double hi = (i + 1 < out.breakpoints.size()) ? out.breakpoints[i + 1] : out.breakpoints[0] + kTwoPi;
        double mid = 0.5 * (lo + hi);
        out.values[static_cast<Eigen::Index>(i)] = a.value_at(mid) + b.value_at(mid);
    }
    return out;
}

// rho-distance from z to the boundary of its Whitney square exceeds delta:
// the Euclidean realization of D_H(z, delta) must fit inside the sector.
bool in_shrunken_square(Complex z, const WhitneySquare& q, double delta) {
    if (!q.contains(z)) return false;
    EuclideanDisc disc = hyperbolic_disc_euclidean(z, delta);
    double cr = std::abs(disc.center);
    if (cr + disc.radius >= q.r_hi()) return false;
    if (q.index.level > 0) {
        if (cr - disc.radius <= q.r_lo()) return false;
        double lo = arc_theta_lo(q.index), hi = arc_theta_hi(q.index);
        double th = std::arg(disc.center);
        if (th < 0) th += kTwoPi;
        if (th <= lo || th >= hi) return false;
        if (cr * std::sin(th - lo) <= disc.radius) return false;
        if (cr * std::sin(hi - th) <= disc.radius) return false;
    }
    return true;
}

struct Lemma1Estimate {
    double constant = 0.0;
    double area_fraction = 1.0;
};

// sup over w in Q of the T-average of log(1/d(., w)), and the area fraction
// m(T)/m(Q), maximized resp. minimized over levels.
Lemma1Estimate estimate_lemma1_constant(double delta, int max_level) {
    Lemma1Estimate est;
    est.area_fraction = 1.0;
    const int g = 28;
    for (int n = 0; n <= max_level; ++n) {
        WhitneySquare q{{n, 0}};
        double len = arc_length(n);
        std::vector<Complex> t_pts;
        std::vector<double> t_areas;
        double q_area = 0.0, t_area = 0.0;
        for (int a = 0; a < g; ++a)
            for (int b = 0; b < g; ++b) {
                double r0 = q.r_lo() + (q.r_hi() - q.r_lo()) * a / g;
                double r1 = q.r_lo() + (q.r_hi() - q.r_lo()) * (a + 1) / g;
                double th = len * (b + 0.5) / g;
                double area = 0.5 * (r1 * r1 - r0 * r0) * (len / g);
                Complex c = std::polar(0.5 * (r0 + r1), th);
                q_area += area;
                if (in_shrunken_square(c, q, delta)) {
                    t_pts.push_back(c);
                    t_areas.push_back(area);
                    t_area += area;
                }
            }
        if (t_pts.empty()) continue;
        est.area_fraction = std::min(est.area_fraction, t_area / q_area);
        for (int a = 0; a < 7; ++a)
            for (int b = 0; b < 7; ++b) {
                double r = q.r_lo() + (q.r_hi() - q.r_lo()) * (a + 0.5) / 7.0;
                Complex w = std::polar(r, len * (b + 0.5) / 7.0);
                double integral = 0.0;
                for (size_t i = 0; i < t_pts.size(); ++i) {
                    double d = pseudo_distance(t_pts[i], w, Domain::disk);
                    d = std::max(d, 1e-14);
                    integral += t_areas[i] * std::log(1.0 / d);
                }
                est.constant = std::max(est.constant, integral / t_area);
            }
    }
    est.constant *= 1.15;
    return est;
}

}  // namespace

HarmonicFunctionDescriptor build_harmonic_majorant(const ZeroSet& nu, const BoundaryDensity& h0, double delta,
                                                   const DiskGrid& grid, MajorantBuildReport* report) {
    if (nu.domain != Domain::disk) throw std::invalid_argument("build_harmonic_majorant: disk zeros expected");
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("build_harmonic_majorant: delta outside (0,1)");
    for (const auto& zk : nu.zeros) {
        require_interior(zk.position, Domain::disk, "build_harmonic_majorant");
        if (std::abs(zk.position) == 0.0)
            throw std::domain_error("build_harmonic_majorant: zero at the origin makes u(0) infinite");
        if (!(zk.mass > 0.0)) throw std::invalid_argument("build_harmonic_majorant: masses must be positive");
    }

    HarmonicFunctionDescriptor h;
    h.domain = Domain::disk;
    if (nu.zeros.empty()) {
        h.density = h0;
        if (report) *report = MajorantBuildReport{};
        return h;
    }

    int depth = 3;
    for (const auto& zk : nu.zeros) depth = std::max(depth, whitney_level(zk.position) + 2);
    depth = std::min(depth, 26);

    // Whitney demands: each zero lies in exactly one square.
    std::map<std::pair<int, std::int64_t>, double> demands;
    for (const auto& zk : nu.zeros) {
        DyadicIndex idx = whitney_index(zk.position);
        demands[{idx.level, idx.pos}] += zk.mass * (1.0 - std::abs(zk.position)) / arc_length(idx.level);
    }

    // direct density of the sparse demand set
    BoundaryDensity f;
    f.domain = Domain::disk;
    {
        std::set<double> cuts;
        for (const auto& [key, p] : demands) {
            DyadicIndex idx{key.first, key.second};
            cuts.insert(std::fmod(arc_theta_lo(idx), kTwoPi));
            cuts.insert(std::fmod(arc_theta_hi(idx), kTwoPi));
        }
        f.breakpoints.assign(cuts.begin(), cuts.end());
        f.values = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(f.breakpoints.size()));
        for (size_t i = 0; i < f.breakpoints.size(); ++i) {
            double lo = f.breakpoints[i];
            double hi = (i + 1 < f.breakpoints.size()) ? f.breakpoints[i + 1] : f.breakpoints[0] + kTwoPi;
            double mid = std::fmod(0.5 * (lo + hi), kTwoPi);
            double val = 0.0;
            for (const auto& [key, p] : demands) {
                DyadicIndex idx{key.first, key.second};
                if (mid >= arc_theta_lo(idx) && mid < arc_theta_hi(idx)) val += p;
            }
            f.values[static_cast<Eigen::Index>(i)] = val;
        }
    }

    double c_alpha = estimate_whitney_constant(std::max(depth, 10));
    Lemma1Estimate lem1 = estimate_lemma1_constant(delta, std::min(depth, 8));
    double scale = 4.0 * kPi * lem1.constant / c_alpha;
    BoundaryDensity f_scaled = f;
    f_scaled.values *= scale;

    double c_delta = estimate_far_field_constant(delta);

    // covering radius of the Whitney net and measured (1 + rho) regularity of u
    auto u_eval = [&](Complex z) { return blaschke_log(nu, z) + (h0.empty() ? 0.0 : poisson_integral(h0, z)); };
    double r2 = 0.0;
    double c1 = 0.0;
    {
        std::mt19937_64 rng(911);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        // the net must cover the whole grid region, but Whitney squares are
        // hyperbolically congruent past the first few levels
        int grid_level = whitney_level(Complex(std::tanh(grid.r_max()), 0.0));
        int top = std::min(std::max(depth + 2, grid_level), 12);
        for (int n = 0; n <= top; ++n) {
            WhitneySquare q{{n, 0}};
            double len = arc_length(n);
            // representative: sub-average minimizer of u1 over a T sample; u1
            // and u differ by smooth terms, minimizing u over T is equivalent
            // for the covering-radius bookkeeping.
            Complex rep = std::polar(0.5 * (q.r_lo() + q.r_hi()), 0.5 * len);
            double best_u = std::numeric_limits<double>::infinity();
            for (int a = 0; a < 6; ++a)
                for (int b = 0; b < 6; ++b) {
                    double r = q.r_lo() + (q.r_hi() - q.r_lo()) * (a + 0.5) / 6.0;
                    Complex cand = std::polar(r, len * (b + 0.5) / 6.0);
                    if (!in_shrunken_square(cand, q, delta)) continue;
                    double val = u_eval(cand);
                    if (val < best_u) {
                        best_u = val;
                        rep = cand;
                    }
                }
            for (int s = 0; s < 160; ++s) {
                double r = q.r_lo() + (q.r_hi() - q.r_lo()) * unif(rng);
                Complex z = std::polar(r, len * unif(rng));
                r2 = std::max(r2, hyperbolic_distance(z, rep, Domain::disk));
            }
            // same-square pair regularity, away from the zeros
            auto clear_of_zeros = [&](Complex z) {
                for (const auto& zk : nu.zeros)
                    if (hyperbolic_distance(z, zk.position, Domain::disk) < delta / 8.0) return false;
                return true;
            };
            for (int s = 0; s < 200; ++s) {
                auto draw = [&]() {
                    double r = q.r_lo() + (q.r_hi() - q.r_lo()) * unif(rng);
                    return std::polar(r, len * unif(rng));
                };
                Complex z = draw(), w = draw();
                if (!clear_of_zeros(z) || !clear_of_zeros(w)) continue;
                double uz = u_eval(z), uw = u_eval(w);
                if (!(uz > 0.0) || !(uw > 0.0)) continue;
                double rho = hyperbolic_distance(z, w, Domain::disk);
                c1 = std::max(c1, std::abs(std::log(uz) - std::log(uw)) / (1.0 + rho));
            }
        }
    }
    double slack = std::exp(c1 * (1.0 + r2)) * std::exp(2.0 * r2);

    h.density = merge_add(h0, f_scaled);
    h.farfield_constant = c_delta;
    h.farfield_zeros = nu;
    h.prefactor = slack;

    if (report) {
        report->c_delta = c_delta;
        report->c_alpha = c_alpha;
        report->lemma1_constant = lem1.constant;
        report->c1 = c1;
        report->r2 = r2;
        report->slack = slack;
        report->t_area_fraction = lem1.area_fraction;
        report->whitney_depth = depth;
    }
    return h;
}

double nontangential_max(const std::function<double(Complex)>& f, const StolzAngle& angle,
                         const AngleSampling& sampling) {
    double hmax = sampling.height_max;
    if (angle.truncation) hmax = std::min(hmax, *angle.truncation);
    if (!(hmax > sampling.height_min)) throw std::invalid_argument("nontangential_max: empty truncated angle");
    double best = -std::numeric_limits<double>::infinity();
    int L = sampling.n_levels;
    for (int j = 0; j < L; ++j) {
        double y = (j + 1 == L) ? hmax
                                : sampling.height_min * std::pow(hmax / sampling.height_min,
                                                                 static_cast<double>(j) / (L - 1));
        if (angle.domain == Domain::half_plane) {
            double t = angle.vertex.real();
            double half = angle.aperture * y;
            for (int a = 0; a < sampling.n_across; ++a) {
                double s = -1.0 + 2.0 * a / (sampling.n_across - 1);
                best = std::max(best, f(Complex(t + s * half, y)));
            }
            double x0 = std::clamp(0.0, t - half, t + half);
            best = std::max(best, f(Complex(x0, y)));
        } else {
            // heights measured as 1-|z|; the membership test prunes overshoot
            double u = y;
            if (u >= 1.0) continue;
            double rr = 1.0 - u;
            double cosb = (rr * rr + 1.0 - std::pow(angle.aperture * u * (2.0 - u), 2)) / (2.0 * rr);
            if (cosb > 1.0) continue;
            double dmax = (cosb < -1.0) ? kPi : std::acos(cosb);
            double base = std::arg(angle.vertex);
            for (int a = 0; a < sampling.n_across; ++a) {
                double s = -1.0 + 2.0 * a / (sampling.n_across - 1);
                Complex z = std::polar(rr, base + s * dmax);
                if (stolz_contains(angle, z)) best = std::max(best, f(z));
            }
        }
    }
    return best;
}

WeakL1Profile weak_l1_profile(std::span<const double> samples, std::span<const double> weights,
                              std::span<const double> thresholds) {
    if (samples.size() != weights.size()) throw std::invalid_argument("weak_l1_profile: size mismatch");
    WeakL1Profile out;
    out.thresholds.assign(thresholds.begin(), thresholds.end());
    out.measures.resize(thresholds.size());
    for (size_t i = 0; i < thresholds.size(); ++i) {
        double m = 0.0;
        for (size_t j = 0; j < samples.size(); ++j)
            if (samples[j] > thresholds[i]) m += weights[j];
        out.measures[i] = m;
        out.least_c = std::max(out.least_c, thresholds[i] * m);
    }
    return out;
}

}  // namespace majorant
