#include "majorant/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "majorant/parallel.hpp"

namespace majorant {

void validate_curve_spec(const CurveSpec& spec) {
    if (!(spec.exponent > 0.0) || !(spec.coeff > 0.0) || !(spec.c0 > 1.0))
        throw std::invalid_argument("CurveSpec: exponent, coeff positive and c0 > 1 required");
    double ratio0 = spec.f(1.0) / 1.0;
    double prev_ratio = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= 40; ++j) {
        double t = std::ldexp(1.0, -j);
        double ft = spec.f(t);
        if (ft > t * (1.0 + 1e-12)) throw std::invalid_argument("CurveSpec: f(t) <= t violated");
        double ratio = ft / t;
        if (ratio > prev_ratio * (1.0 + 1e-12)) throw std::invalid_argument("CurveSpec: f(t)/t not decreasing");
        prev_ratio = ratio;
        if (spec.f(0.5 * t) < ft / spec.c0 * (1.0 - 1e-12))
            throw std::invalid_argument("CurveSpec: f(t/2) >= f(t)/c0 violated");
        if (1.5 * t <= 1.0 && spec.f(1.5 * t) > spec.c0 * ft * (1.0 + 1e-12))
            throw std::invalid_argument("CurveSpec: f(3t/2) <= c0 f(t) violated");
    }
    if (!(spec.f(std::ldexp(1.0, -40)) / std::ldexp(1.0, -40) < 1e-3 * std::max(ratio0, 1e-300)))
        throw std::invalid_argument("CurveSpec: f(t)/t -> 0 violated");
}

std::vector<Complex> curve_sequence(const CurveSpec& spec, double delta, double x_start, double x_min) {
    validate_curve_spec(spec);
    if (!(delta > 0.0 && delta < 0.5)) throw std::domain_error("curve_sequence: delta outside (0, 1/2)");
    if (!(x_min > 0.0 && x_min < x_start && x_start <= 1.0))
        throw std::invalid_argument("curve_sequence: need 0 < x_min < x_start <= 1");
    std::vector<Complex> pts;
    double x = x_start;
    pts.emplace_back(x, spec.f(x));
    while (true) {
        Complex a = pts.back();
        auto rho_at = [&](double t) {
            return hyperbolic_distance(a, Complex(t, spec.f(t)), Domain::half_plane);
        };
        double lo = x * 1e-9, hi = x;
        if (rho_at(lo) < 2.0 * delta) break;
        for (int it = 0; it < 64; ++it) {
            double mid = 0.5 * (lo + hi);
            if (rho_at(mid) >= 2.0 * delta)
                lo = mid;
            else
                hi = mid;
        }
        x = 0.5 * (lo + hi);
        if (x < x_min) break;
        pts.emplace_back(x, spec.f(x));
        if (pts.size() > 30000000) throw std::runtime_error("curve_sequence: point budget exceeded");
    }
    return pts;
}

HalfPlaneLogPotential::HalfPlaneLogPotential(std::vector<Complex> points_descending_x) {
    xs_.reserve(points_descending_x.size());
    ys_.reserve(points_descending_x.size());
    for (auto it = points_descending_x.rbegin(); it != points_descending_x.rend(); ++it) {
        if (!(it->imag() > 0.0)) throw std::invalid_argument("HalfPlaneLogPotential: points must be interior");
        xs_.push_back(it->real());
        ys_.push_back(it->imag());
    }
    for (size_t j = 1; j < xs_.size(); ++j)
        if (!(xs_[j] > xs_[j - 1])) throw std::invalid_argument("HalfPlaneLogPotential: x not strictly monotone");
}

double HalfPlaneLogPotential::term(long j, Complex z) const {
    double dx = z.real() - xs_[j];
    double dy = z.imag() - ys_[j];
    double a1 = dx * dx + dy * dy;
    if (a1 == 0.0) return std::numeric_limits<double>::infinity();
    return 0.5 * std::log1p(4.0 * z.imag() * ys_[j] / a1);
}

double HalfPlaneLogPotential::eval_exact(Complex z) const {
    double acc = 0.0;
    const double x = z.real(), y = z.imag();
    for (size_t j = 0; j < xs_.size(); ++j) {
        double dx = x - xs_[j];
        double dy = y - ys_[j];
        double a1 = dx * dx + dy * dy;
        if (a1 == 0.0) return std::numeric_limits<double>::infinity();
        acc += 0.5 * std::log1p(4.0 * y * ys_[j] / a1);
    }
    return acc;
}

long HalfPlaneLogPotential::nearest_index(Complex z) const {
    const long n = size();
    if (n == 0) return -1;
    double x = z.real(), y = z.imag();
    long jx = std::lower_bound(xs_.begin(), xs_.end(), x) - xs_.begin();
    long lo = std::lower_bound(xs_.begin(), xs_.end(), x - 2.0 * y) - xs_.begin();
    long hi = std::upper_bound(xs_.begin(), xs_.end(), x + 2.0 * y) - xs_.begin();
    lo = std::max(0L, std::min(lo, jx - 50));
    hi = std::min(n, std::max(hi, jx + 50));
    long best = -1;
    double best_rho = std::numeric_limits<double>::infinity();
    for (long j = lo; j < hi; ++j) {
        double rho = hyperbolic_distance(z, point(j), Domain::half_plane);
        if (rho < best_rho) {
            best_rho = rho;
            best = j;
        }
    }
    return best;
}

double HalfPlaneLogPotential::eval_fast(Complex z) const {
    const long n = size();
    if (n == 0) return 0.0;
    const long W = 32;
    long jc = nearest_index(z);
    long wl = std::max(0L, jc - W), wr = std::min(n - 1, jc + W);
    double acc = 0.0;
    for (long j = wl; j <= wr; ++j) acc += term(j, z);

    // Panel-integrated far terms: the summand varies on the index-distance
    // scale from jc and on the relative-x scale (the top of the curve packs
    // large x steps into few indices), so geometric panels from jc are
    // additionally capped at a 5% x ratio. Trapezoid panels with the
    // Euler-Maclaurin half-weights at the range ends approximate the sum.
    if (wl > 0) {
        long to = 0;
        long cur = wl - 1;
        double g_cur = term(cur, z);
        double side_acc = 0.5 * g_cur;
        while (cur > to) {
            long width = std::max<long>(1, static_cast<long>(0.04 * static_cast<double>(std::abs(cur - jc))));
            long next = std::max(to, cur - width);
            long lb = std::lower_bound(xs_.begin(), xs_.end(), xs_[cur] / 1.05) - xs_.begin();
            next = std::max(next, std::min(cur - 1, lb));
            double g_next = term(next, z);
            side_acc += 0.5 * (g_cur + g_next) * static_cast<double>(cur - next);
            cur = next;
            g_cur = g_next;
        }
        side_acc += 0.5 * g_cur;
        acc += side_acc;
    }
    if (wr < n - 1) {
        long to = n - 1;
        long cur = wr + 1;
        double g_cur = term(cur, z);
        double side_acc = 0.5 * g_cur;
        while (cur < to) {
            long width = std::max<long>(1, static_cast<long>(0.04 * static_cast<double>(std::abs(cur - jc))));
            long next = std::min(to, cur + width);
            long ub = std::upper_bound(xs_.begin(), xs_.end(), xs_[cur] * 1.05) - xs_.begin() - 1;
            next = std::min(next, std::max(cur + 1, ub));
            double g_next = term(next, z);
            side_acc += 0.5 * (g_cur + g_next) * static_cast<double>(next - cur);
            cur = next;
            g_cur = g_next;
        }
        side_acc += 0.5 * g_cur;
        acc += side_acc;
    }
    return acc;
}

double max_abs_x_plus_y(Complex center, double hyper_radius) {
    double x0 = center.real(), y0 = center.imag();
    double ch = std::cosh(2.0 * hyper_radius), sh = std::sinh(2.0 * hyper_radius);
    return std::abs(x0) + y0 * (ch + std::sqrt(2.0) * sh);
}

CounterexamplePhi::CounterexamplePhi(std::vector<Complex> curve_points, std::function<double(double)> sigma,
                                     double delta)
    : all_points_(std::move(curve_points)), sigma_(std::move(sigma)), delta_(delta) {
    if (all_points_.size() < 8) throw std::invalid_argument("CounterexamplePhi: need a longer point sequence");
    const long K = static_cast<long>(all_points_.size());

    std::vector<double> caps_all(K);
    for (long k = 0; k < K; ++k) caps_all[k] = sigma_(max_abs_x_plus_y(all_points_[k], delta_ / 2.0));

    // interpolation constant over the full sequence (conservative for tails)
    HalfPlaneLogPotential pot_all(all_points_);
    double cdelta = 0.0;
    std::vector<long> sample_ks;
    for (long k = 0; k < std::min<long>(K, 24); ++k) sample_ks.push_back(k);
    for (double g = 24; g < static_cast<double>(K); g *= 1.35) sample_ks.push_back(static_cast<long>(g));
    for (long k : sample_ks) {
        long j_asc = K - 1 - k;  // pot_all is ascending in x
        Complex a = all_points_[static_cast<size_t>(k)];
        for (double sfrac : {0.25, 0.5, 0.8, 0.97}) {
            EuclideanDisc disc = halfplane_disc_euclidean(a, sfrac * delta_);
            for (int t = 0; t < 8; ++t) {
                Complex z = disc.center + std::polar(disc.radius, kTwoPi * t / 8.0);
                double rest = pot_all.eval_fast(z) - pot_all.term(j_asc, z);
                cdelta = std::max(cdelta, rest);
            }
        }
    }
    c_delta_ = cdelta;
    threshold_ = c_delta_ + std::log(1.0 / std::tanh(0.75 * delta_));

    long last_bad = -1;
    for (long k = 0; k < K; ++k)
        if (!(caps_all[k] > threshold_)) last_bad = k;
    k0_ = last_bad + 1;
    if (k0_ >= K - 4)
        throw std::runtime_error(
            "CounterexamplePhi: gluing threshold not reached before the sequence ends (threshold " +
            std::to_string(threshold_) + ")");

    std::vector<Complex> tail(all_points_.begin() + k0_, all_points_.end());
    potential_ = HalfPlaneLogPotential(std::move(tail));
    caps_asc_.resize(static_cast<size_t>(potential_.size()));
    for (long j = 0; j < potential_.size(); ++j) {
        long k_abs = k0_ + (potential_.size() - 1 - j);
        caps_asc_[static_cast<size_t>(j)] = caps_all[static_cast<size_t>(k_abs)];
    }
}

double CounterexamplePhi::blaschke_part(Complex z, bool exact) const {
    return exact ? potential_.eval_exact(z) : potential_.eval_fast(z);
}

double CounterexamplePhi::evaluate(Complex z, bool exact) const {
    require_interior(z, Domain::half_plane, "CounterexamplePhi::evaluate");
    double bl = blaschke_part(z, exact);
    long j = potential_.nearest_index(z);
    if (j >= 0 && hyperbolic_distance(z, potential_.point(j), Domain::half_plane) <= delta_)
        return std::min(bl, caps_asc_[static_cast<size_t>(j)]);
    return bl;
}

CounterexamplePhi counterexample_phi(const std::function<double(double)>& sigma, const CurveSpec& spec,
                                     double delta, double x_min) {
    return CounterexamplePhi(curve_sequence(spec, delta, 1.0, x_min), sigma, delta);
}

DefectInstrumentResult superharmonic_defect(const std::function<double(Complex)>& phi, Domain domain,
                                            const DefectInstrumentOptions& opt) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    DefectInstrumentResult res;
    std::vector<std::pair<Complex, double>> circles;
    circles.reserve(opt.trials);
    for (int t = 0; t < opt.trials; ++t) {
        Complex c;
        double r;
        if (domain == Domain::half_plane) {
            double y = opt.y_lo * std::pow(opt.y_hi / opt.y_lo, unif(rng));
            double x = opt.x_lo + (opt.x_hi - opt.x_lo) * unif(rng);
            c = Complex(x, y);
            r = (opt.radius_frac_lo + (opt.radius_frac_hi - opt.radius_frac_lo) * unif(rng)) * y;
        } else {
            double rad = std::min(std::abs(opt.x_hi), 0.999) * std::sqrt(unif(rng));
            c = std::polar(rad, kTwoPi * unif(rng));
            r = (opt.radius_frac_lo + (opt.radius_frac_hi - opt.radius_frac_lo) * unif(rng)) * (1.0 - rad);
        }
        circles.emplace_back(c, r);
    }
    std::vector<DefectInstrumentResult> partial(thread_count());
    parallel_for(0, opt.trials, [&](long lo, long hi) {
        DefectInstrumentResult local;
        for (long t = lo; t < hi; ++t) {
            auto [c, r] = circles[static_cast<size_t>(t)];
            double mean = 0.0;
            for (int k = 0; k < opt.circle_nodes; ++k)
                mean += phi(c + std::polar(r, kTwoPi * k / opt.circle_nodes));
            mean /= opt.circle_nodes;
            double defect = mean - phi(c);
            if (defect > local.max_defect) {
                local.max_defect = defect;
                local.worst_center = c;
                local.worst_radius = r;
            }
        }
        size_t slot = static_cast<size_t>(lo) % partial.size();
        if (local.max_defect > partial[slot].max_defect) partial[slot] = local;
    });
    for (const auto& p : partial)
        if (p.max_defect > res.max_defect) res = p;
    return res;
}

CappedBlaschkePhi::CappedBlaschkePhi(const ZeroSet& zeros, double delta, double cap_margin)
    : zeros_(zeros), delta_(delta) {
    if (zeros_.domain != Domain::disk) throw std::invalid_argument("CappedBlaschkePhi: disk zeros expected");
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("CappedBlaschkePhi: delta outside (0,1)");
    double cdelta = 0.0;
    for (size_t k = 0; k < zeros_.zeros.size(); ++k) {
        Complex a = zeros_.zeros[k].position;
        for (double sfrac : {0.2, 0.5, 0.8, 0.97})
            for (int t = 0; t < 12; ++t) {
                Complex zeta = std::polar(std::tanh(sfrac * delta_), kTwoPi * t / 12.0);
                Complex z = mobius_involution(a, zeta);
                double rest = blaschke_log(zeros_, z) -
                              zeros_.zeros[k].mass * std::log(1.0 / pseudo_distance(z, a, Domain::disk));
                cdelta = std::max(cdelta, rest);
            }
    }
    c_delta_ = cdelta;
    caps_.resize(zeros_.zeros.size());
    for (size_t k = 0; k < zeros_.zeros.size(); ++k)
        caps_[k] = c_delta_ + zeros_.zeros[k].mass * std::log(1.0 / std::tanh(0.75 * delta_)) + cap_margin;
}

double CappedBlaschkePhi::evaluate(Complex z) const {
    double bl = blaschke_log(zeros_, z);
    double best_rho = std::numeric_limits<double>::infinity();
    size_t best_k = 0;
    for (size_t k = 0; k < zeros_.zeros.size(); ++k) {
        double rho = hyperbolic_distance(z, zeros_.zeros[k].position, Domain::disk);
        if (rho < best_rho) {
            best_rho = rho;
            best_k = k;
        }
    }
    if (best_rho <= delta_) return std::min(bl, caps_[best_k]);
    return bl;
}

double g_eps_value(Complex z, double delta, double eps) {
    Complex zeta = (1.0 - delta) * z / (1.0 - eps);
    return (1.0 - std::norm(zeta)) / std::norm(1.0 - zeta);
}

double kernel_bound_integral(double t, int base_cells) {
    auto integrand = [t](double x) {
        double denom = x * x * x * x + (x - t) * (x - t);
        if (denom == 0.0) return 1.0 / kPi;  // only at x = t = 0, where the limit is 1/pi
        return x * x / (kPi * denom);
    };
    std::vector<double> mesh;
    mesh.reserve(base_cells + 256);
    for (int i = 0; i <= base_cells; ++i) mesh.push_back(static_cast<double>(i) / base_cells);
    if (t > 0.0 && t < 1.2) {
        double w = std::max(t * t, 1e-12);
        for (int k = -60; k <= 60; ++k) {
            double x = t + w * 0.2 * k;
            if (x > 0.0 && x < 1.0) mesh.push_back(x);
        }
        for (int k = 1; k <= 40; ++k) {
            for (double s : {-1.0, 1.0}) {
                double x = t + s * w * 12.0 * std::pow(1.35, k);
                if (x > 0.0 && x < 1.0) mesh.push_back(x);
            }
        }
    }
    std::sort(mesh.begin(), mesh.end());
    mesh.erase(std::unique(mesh.begin(), mesh.end()), mesh.end());
    double acc = 0.0;
    for (size_t i = 0; i + 1 < mesh.size(); ++i)
        acc += 0.5 * (integrand(mesh[i]) + integrand(mesh[i + 1])) * (mesh[i + 1] - mesh[i]);
    return acc;
}

namespace {

json measurement(double value, double tol) { return json{{"value", value}, {"tolerance", tol}}; }

// Nontangential maximum of the Lemma-2 function at vertex xi with aperture 1:
// curve caps inside the angle plus a mesh near the curve scale.
double measure_m_phi(const CounterexamplePhi& phi, double xi, const CurveSpec& curve) {
    double best = 0.0;
    const long n = phi.tail_count();
    // tail points inside the Stolz angle carry the capped pole values
    {
        // |x_j - xi| <= y_j and y_j <= x_j implies x_j in [xi/2, 2|xi|+..]; scan a safe bracket
        double lo = xi > 0 ? 0.45 * xi : 0.0;
        double hi = xi > 0 ? 2.2 * xi + 1e-12 : 0.0;
        if (xi > 0) {
            for (long j = 0; j < n; ++j) {
                Complex a = phi.tail_point(j);
                if (a.real() < lo) continue;
                if (a.real() > hi) break;
                if (std::abs(a.real() - xi) <= a.imag()) best = std::max(best, phi.tail_cap(j));
            }
        }
    }
    double fscale = std::max(curve.f(std::abs(xi) + 1e-300), 1e-13);
    for (int level = 0; level < 36; ++level) {
        double y = fscale * 1e-2 * std::pow(1e4 * 2.0 / (fscale * 1e-2), level / 35.0);
        y = std::min(y, 2.0);
        for (double s : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
            double x = xi + s * y;
            best = std::max(best, phi.evaluate(Complex(x, y)));
        }
        double x0 = std::clamp(0.0, xi - y, xi + y);
        best = std::max(best, phi.evaluate(Complex(x0, y)));
        if (y >= 2.0) break;
    }
    return best;
}

}  // namespace

ExperimentReport run_sharpmaxf(const SharpmaxfOptions& opt) {
    ExperimentReport rep;
    rep.name = "sharpmaxf";
    validate_curve_spec(opt.curve);

    // divergence precheck: int_1^inf s = infinity
    bool divergent = opt.s.exponent <= 1.0 + 1e-12;
    {
        double prev = 0.0;
        json growth = json::array();
        for (int k = 1; k <= 6; ++k) {
            double upper = std::pow(10.0, k);
            int cells = 4000;
            double acc = 0.0;
            for (int i = 0; i < cells; ++i) {
                double a = std::pow(upper, static_cast<double>(i) / cells);
                double b = std::pow(upper, static_cast<double>(i + 1) / cells);
                acc += 0.5 * (opt.s.s(a) + opt.s.s(b)) * (b - a);
            }
            growth.push_back(acc);
            prev = acc;
        }
        rep.data["s_integral_partials"] = growth;
        (void)prev;
    }

    auto curve_points = curve_sequence(opt.curve, opt.delta, 1.0, opt.x_min);
    rep.data["curve_points"] = curve_points.size();
    auto sigma = [&](double t) { return opt.s.sigma(t); };
    CounterexamplePhi phi(curve_points, sigma, opt.delta);
    rep.data["k0"] = phi.k0();
    rep.data["c_delta"] = phi.c_delta();
    rep.data["gluing_threshold"] = phi.threshold();

    // bounded interpolation constant off the discs (drives the profile for
    // thresholds above it); sampled between consecutive discs and above
    double c1_offdisc = 0.0;
    {
        const long n = phi.tail_count();
        for (long j = 1; j < n; j += std::max<long>(1, n / 400)) {
            Complex a = phi.tail_point(j), b = phi.tail_point(j - 1);
            Complex mid = 0.5 * (a + b);
            for (double lift : {1.0, 2.0, 6.0}) {
                Complex z(mid.real(), mid.imag() * lift);
                if (hyperbolic_distance(z, a, Domain::half_plane) > opt.delta &&
                    hyperbolic_distance(z, b, Domain::half_plane) > opt.delta)
                    c1_offdisc = std::max(c1_offdisc, phi.blaschke_part(z));
            }
        }
        rep.data["c1_offdisc"] = c1_offdisc;
    }

    // phi <= max(C1, phi_sigma) sample check
    {
        std::mt19937_64 rng(501);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        double worst = -1e300;
        for (int s = 0; s < 4000; ++s) {
            double x = (unif(rng) * 2.0 - 1.0);
            double y = std::pow(10.0, -6.0 * unif(rng));
            double v = phi.evaluate(Complex(x, y));
            double bound = std::max(c1_offdisc + phi.threshold(), sigma(std::abs(x) + y));
            worst = std::max(worst, v - bound);
        }
        rep.data["phi_le_max_c1_phisigma_margin"] = worst;
    }

    // (a) weak-L1 profile of M phi against 2 sigma^{-1}(t)
    std::vector<double> xis, weights;
    {
        double xi_min = std::max(10.0 * opt.x_min, 1e-5), xi_max = 0.5;
        int n = static_cast<int>(opt.xi_per_decade * std::log10(xi_max / xi_min)) + 1;
        for (int i = 0; i <= n; ++i) xis.push_back(xi_min * std::pow(xi_max / xi_min, static_cast<double>(i) / n));
        int base = static_cast<int>(xis.size());
        for (int i = 0; i < base; ++i) xis.push_back(-xis[static_cast<size_t>(i)]);
        weights.resize(xis.size());
        for (size_t i = 0; i < xis.size(); ++i) {
            size_t k = i < static_cast<size_t>(base) ? i : i - base;
            double lo = k == 0 ? xi_min : 0.5 * (std::abs(xis[k]) + std::abs(xis[k - 1]));
            double hi = k + 1 == static_cast<size_t>(base) ? xi_max
                                                           : 0.5 * (std::abs(xis[k]) + std::abs(xis[k + 1]));
            weights[i] = std::max(hi - lo, 0.0);
        }
    }
    std::vector<double> mphi(xis.size());
    parallel_for(0, static_cast<long>(xis.size()), [&](long lo, long hi) {
        for (long i = lo; i < hi; ++i) mphi[static_cast<size_t>(i)] = measure_m_phi(phi, xis[static_cast<size_t>(i)], opt.curve);
    });
    std::vector<double> thresholds;
    for (int i = 0; i < opt.n_thresholds; ++i)
        thresholds.push_back(opt.t_lo * std::pow(opt.t_hi / opt.t_lo, static_cast<double>(i) / (opt.n_thresholds - 1)));
    WeakL1Profile profile = weak_l1_profile(mphi, weights, thresholds);
    double worst_ratio = 0.0;
    for (size_t i = 0; i < thresholds.size(); ++i) {
        double bound = 2.0 * opt.s.sigma_inv(thresholds[i]);
        worst_ratio = std::max(worst_ratio, profile.measures[i] / bound);
    }
    bool profile_ok = worst_ratio <= opt.profile_slack;
    rep.data["weak_l1_worst_ratio"] = measurement(worst_ratio, opt.profile_slack);
    {
        std::ostringstream csv;
        csv << "t,measure,bound\n";
        for (size_t i = 0; i < thresholds.size(); ++i)
            csv << thresholds[i] << "," << profile.measures[i] << "," << 2.0 * opt.s.sigma_inv(thresholds[i]) << "\n";
        rep.attachments["weak_l1_profile.csv"] = csv.str();
        std::ostringstream mcsv;
        mcsv << "xi,mphi\n";
        for (size_t i = 0; i < xis.size(); ++i) mcsv << xis[i] << "," << mphi[i] << "\n";
        rep.attachments["mphi_samples.csv"] = mcsv.str();
    }

    // (b) mass lower bounds per cutoff
    auto sigma4_integral = [&](double a, double b) {  // int_a^b sigma(4x) dx
        int cells = 400;
        double acc = 0.0;
        for (int i = 0; i < cells; ++i) {
            double u = a * std::pow(b / a, static_cast<double>(i) / cells);
            double v = a * std::pow(b / a, static_cast<double>(i + 1) / cells);
            acc += 0.5 * (sigma(4.0 * u) + sigma(4.0 * v)) * (v - u);
        }
        return acc;
    };
    std::vector<double> ladder;
    double mass = sigma4_integral(std::ldexp(1.0, -opt.cutoff_lo), 1.0);
    ladder.push_back(mass);
    double min_increment = 1e300;
    for (int j = opt.cutoff_lo; j < opt.cutoff_hi; ++j) {
        double inc = sigma4_integral(std::ldexp(1.0, -j - 1), std::ldexp(1.0, -j));
        mass += inc;
        ladder.push_back(mass);
        min_increment = std::min(min_increment, inc);
    }
    bool ladder_ok = min_increment >= 0.9 * std::log(2.0) / 4.0;
    rep.data["mass_ladder_min_increment"] = measurement(min_increment, 0.9 * std::log(2.0) / 4.0);
    {
        std::ostringstream csv;
        csv << "cutoff,mass_integral,mu_lower_bound\n";
        double c_kernel = 0.0;
        for (int i = 0; i < opt.kernel_t_count; ++i)
            c_kernel = std::max(c_kernel, kernel_bound_integral(-2.0 + 4.0 * i / (opt.kernel_t_count - 1)));
        for (size_t i = 0; i < ladder.size(); ++i)
            csv << std::ldexp(1.0, -opt.cutoff_lo - static_cast<int>(i)) << "," << ladder[i] << ","
                << 0.5 * ladder[i] / std::max(c_kernel, 1e-300) << "\n";
        rep.attachments["mass_ladder.csv"] = csv.str();
    }

    // (c) kernel bound sup_t int_0^1 P_{x^2}(x-t) dx, with mesh stability
    double kernel_sup = 0.0, kernel_instability = 0.0;
    {
        std::ostringstream csv;
        csv << "t,integral,refined\n";
        for (int i = 0; i < opt.kernel_t_count; ++i) {
            double t = -2.0 + 4.0 * i / (opt.kernel_t_count - 1);
            double v1 = kernel_bound_integral(t, 2000);
            double v2 = kernel_bound_integral(t, 4000);
            kernel_sup = std::max(kernel_sup, v2);
            kernel_instability = std::max(kernel_instability, std::abs(v2 - v1) / std::max(v2, 1e-300));
            csv << t << "," << v1 << "," << v2 << "\n";
        }
        rep.attachments["kernel_bound.csv"] = csv.str();
    }
    bool kernel_ok = std::isfinite(kernel_sup) && kernel_instability <= 0.05;
    rep.data["kernel_bound_sup"] = measurement(kernel_sup, 0.0);
    rep.data["kernel_bound_mesh_instability"] = measurement(kernel_instability, 0.05);
    rep.data["harnack_constant_2delta"] = std::exp(-4.0 * opt.delta);

    // covering of the curve by D_H(a_j, 2 delta)
    {
        double worst = 0.0;
        const auto& pts = phi.all_points();
        for (size_t k = 0; k + 1 < pts.size(); k += std::max<size_t>(1, pts.size() / 500)) {
            double xa = pts[k + 1].real(), xb = pts[k].real();
            for (double s : {0.25, 0.5, 0.75}) {
                double x = xa + (xb - xa) * s;
                Complex g(x, opt.curve.f(x));
                double best = 1e300;
                for (size_t j = k > 2 ? k - 2 : 0; j < std::min(pts.size(), k + 4); ++j)
                    best = std::min(best, hyperbolic_distance(g, pts[j], Domain::half_plane));
                worst = std::max(worst, best);
            }
        }
        rep.data["curve_covering_worst_rho"] = measurement(worst, 2.0 * opt.delta + 1e-6);
    }

    rep.data["divergence_precheck"] = divergent;
    rep.data["config"] = {{"s_exponent", opt.s.exponent},   {"curve_exponent", opt.curve.exponent},
                          {"curve_coeff", opt.curve.coeff}, {"delta", opt.delta},
                          {"x_min", opt.x_min},             {"t_lo", opt.t_lo},
                          {"t_hi", opt.t_hi},               {"cutoff_lo", opt.cutoff_lo},
                          {"cutoff_hi", opt.cutoff_hi}};
    if (!divergent)
        rep.verdict = "inconclusive (s integrable at infinity)";
    else if (ladder_ok && profile_ok && kernel_ok)
        rep.verdict = "no-harmonic-majorant evidence";
    else
        rep.verdict = "checks failed";
    rep.data["verdict"] = rep.verdict;
    return rep;
}

ExperimentReport run_anyrate(const AnyrateOptions& opt) {
    ExperimentReport rep;
    rep.name = "anyrate";
    if (!(opt.s.exponent > 0.0 && opt.s.exponent < 2.0))
        throw std::invalid_argument("run_anyrate: s exponent must be in (0,2) for a valid tangential curve");

    // f(xi) = safety * s^{-1}(1/xi^2) = safety * xi^{2/p}
    CurveSpec curve{2.0 / opt.s.exponent, opt.coeff_safety, std::pow(2.0, 2.0 / opt.s.exponent) + 0.5};
    validate_curve_spec(curve);
    auto sigma = [](double t) { return 1.0 / (t * t); };
    auto pts = curve_sequence(curve, opt.delta, 1.0, opt.x_min);
    CounterexamplePhi phi(pts, sigma, opt.delta);
    rep.data["curve_points"] = pts.size();
    rep.data["k0"] = phi.k0();
    rep.data["c_delta"] = phi.c_delta();

    auto phi_exact = [&](Complex z) { return phi.evaluate(z, true); };

    // growth check phi(x+iy) <= s(y) for small y
    double c1_offdisc = phi.threshold();
    double y_thresh = std::min(opt.s.s_inv(std::max(c1_offdisc, 1.0)), curve.f(0.25));
    double growth_margin = -1e300;
    long growth_samples = 0;
    {
        std::mt19937_64 rng(1303);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int s = 0; s < 4000; ++s) {
            double y = opt.x_min * opt.x_min * std::pow(y_thresh / (opt.x_min * opt.x_min), unif(rng));
            y = std::min(y, y_thresh);
            double x = (2.0 * unif(rng) - 1.0);
            double v = phi.evaluate(Complex(x, y));
            growth_margin = std::max(growth_margin, v - opt.s.s(y));
            ++growth_samples;
        }
        // also sample inside the capped discs along the curve
        for (long j = 0; j < phi.tail_count(); j += std::max<long>(1, phi.tail_count() / 800)) {
            Complex a = phi.tail_point(j);
            EuclideanDisc disc = halfplane_disc_euclidean(a, 0.9 * opt.delta);
            for (int t = 0; t < 6; ++t) {
                Complex z = disc.center + std::polar(0.7 * disc.radius, kTwoPi * t / 6.0);
                if (z.imag() <= 0.0 || z.imag() > y_thresh) continue;
                growth_margin = std::max(growth_margin, phi.evaluate(z) - opt.s.s(z.imag()));
                ++growth_samples;
            }
        }
    }
    rep.data["growth_margin"] = measurement(growth_margin, 0.0);
    rep.data["growth_samples"] = growth_samples;
    rep.data["growth_y_threshold"] = y_thresh;

    // superharmonic defect on sampled circles (exact evaluation)
    DefectInstrumentOptions dopt = opt.defect;
    dopt.x_lo = -0.5;
    dopt.x_hi = 1.0;
    dopt.y_lo = std::max(curve.f(3.0 * opt.x_min), 1e-12);
    dopt.y_hi = 0.5;
    DefectInstrumentResult defect = superharmonic_defect(phi_exact, Domain::half_plane, dopt);
    rep.data["superharmonic_defect"] = measurement(defect.max_defect, 1e-6);

    // M phi(xi) * xi^2 bounded below
    double min_product = 1e300;
    {
        std::ostringstream csv;
        csv << "xi,mphi,product\n";
        for (int i = 0; i < opt.xi_count; ++i) {
            double xi = opt.xi_lo * std::pow(opt.xi_hi / opt.xi_lo, static_cast<double>(i) / (opt.xi_count - 1));
            double m = measure_m_phi(phi, xi, curve);
            min_product = std::min(min_product, m * xi * xi);
            csv << xi << "," << m << "," << m * xi * xi << "\n";
        }
        rep.attachments["mphi_product.csv"] = csv.str();
    }
    rep.data["min_mphi_xi2"] = measurement(min_product, 0.0);

    rep.data["config"] = {{"s_exponent", opt.s.exponent},
                          {"delta", opt.delta},
                          {"x_min", opt.x_min},
                          {"coeff_safety", opt.coeff_safety},
                          {"defect_trials", opt.defect.trials}};
    bool ok = growth_margin <= 1e-9 && defect.max_defect <= 1e-6 && min_product > 0.0;
    rep.verdict = ok ? "no-harmonic-majorant evidence (rate respected, weak-L1 violated)" : "checks failed";
    rep.data["verdict"] = rep.verdict;
    return rep;
}

RnotlipResult run_rnotlip(const RnotlipOptions& opt) {
    if (!(opt.eps > 0.0 && opt.eps < opt.delta / 2.0))
        throw std::invalid_argument("run_rnotlip: need 0 < eps < delta/2");
    double target = 2.0 * (1.0 - opt.delta) / (1.0 - opt.eps);
    if (!(opt.gamma > 0.0 && opt.gamma < target))
        throw std::invalid_argument("run_rnotlip: need 0 < gamma < 2(1-delta)/(1-eps)");
    if (opt.grid.n_theta % 2 != 0) throw std::invalid_argument("run_rnotlip: n_theta must be even");
    double rho_circle = std::atanh(1.0 - opt.eps);
    if (opt.grid.r_max() < rho_circle + 0.25)
        throw std::invalid_argument("run_rnotlip: grid too small for the (1-eps) circle");

    RnotlipResult res;
    res.target = target;
    res.report.name = "rnotlip";

    const DiskGrid& g = opt.grid;
    const int M = opt.circle_samples;
    std::vector<double> log_h(M);
    std::vector<Complex> w(M);
    for (int t = 0; t < M; ++t) {
        double theta = kTwoPi * t / M;
        w[t] = std::polar(1.0 - opt.eps, theta);
        log_h[t] = std::log(g_eps_value(w[t], opt.delta, opt.eps));
    }

    GridFunction H(g);
    parallel_for(0, g.n_rho + 1, [&](long lo, long hi) {
        for (long i = lo; i < hi; ++i) {
            int m_count = (i == 0) ? 1 : g.n_theta;
            for (int m = 0; m < m_count; ++m) {
                Complex z = g.point(static_cast<int>(i), m);
                double best = -1e300;
                for (int t = 0; t < M; ++t) {
                    double v = log_h[t] - opt.gamma * hyperbolic_distance(w[t], z, Domain::disk);
                    if (v > best) best = v;
                }
                H.values(i, m) = std::exp(best);
            }
            if (i == 0) H.values.row(0).setConstant(H.values(0, 0));
        }
    });

    GridFunction genv = sample_on_grid(g, [&](Complex z) { return g_eps_value(z, opt.delta, opt.eps); });
    res.h_over_g_max = (H.values / genv.values).maxCoeff();

    GridDistanceTable table(g);
    GridFunction envelope = log_lipschitz_envelope(H, opt.gamma, &table);
    res.envelope_fixed_point_max_rel = ((envelope.values - H.values).abs() / H.values).maxCoeff();

    DiscAverager averager(g, opt.radii, 4, RadialDeposit::cubic);
    ReductionReport red = reduce(H, averager, opt.max_iter, opt.tol, 1e6);
    res.reduced = red.result;

    double interior_rho = std::atanh(1.0 - 2.0 * opt.eps);
    double worst_rel = 0.0;
    for (int i = 0; i <= g.n_rho; ++i) {
        if (g.rho(i) > interior_rho) break;
        for (int m = 0; m < g.n_theta; ++m) {
            double rel = std::abs(red.result.values(i, m) - genv.values(i, m)) / genv.values(i, m);
            worst_rel = std::max(worst_rel, rel);
        }
    }
    res.interior_identity_max_rel = worst_rel;

    int k = std::max(1, static_cast<int>(std::lround(opt.gradient_step_rho / g.drho)));
    k = std::min(k, g.n_rho);
    double xr = g.radius(k);
    res.gradient_estimate =
        (std::log(red.result.values(k, 0)) - std::log(red.result.values(k, g.n_theta / 2))) / (2.0 * xr);

    res.report.data["gradient_estimate"] = measurement(res.gradient_estimate, 0.15);
    res.report.data["gradient_target"] = target;
    res.report.data["envelope_fixed_point_max_rel"] = measurement(res.envelope_fixed_point_max_rel, 1e-3);
    res.report.data["interior_identity_max_rel"] = measurement(res.interior_identity_max_rel, 1e-2);
    res.report.data["h_over_g_max"] = res.h_over_g_max;
    res.report.data["reduction_status"] = to_string(red.status);
    res.report.data["reduction_iterations"] = red.iterations;
    res.report.data["trace_tail"] = red.trace.empty() ? 0.0 : red.trace.back();
    res.report.data["config"] = {{"gamma", opt.gamma},
                                 {"delta", opt.delta},
                                 {"eps", opt.eps},
                                 {"drho", g.drho},
                                 {"n_rho", g.n_rho},
                                 {"n_theta", g.n_theta},
                                 {"circle_samples", M},
                                 {"max_iter", opt.max_iter},
                                 {"tol", opt.tol}};
    {
        std::ostringstream csv;
        csv << "rho,x,R,g_eps\n";
        for (int i = 0; i <= g.n_rho; ++i)
            csv << g.rho(i) << "," << g.radius(i) << "," << red.result.values(i, 0) << "," << genv.values(i, 0)
                << "\n";
        res.report.attachments["center_ray.csv"] = csv.str();
    }
    bool in_range = std::abs(res.gradient_estimate - target) <= 0.15 && res.gradient_estimate > opt.gamma;
    res.report.verdict = in_range && res.interior_identity_max_rel <= 1e-2
                             ? "reproduced"
                             : "outside expected range (see h_over_g_max for the regime diagnostic)";
    res.report.data["verdict"] = res.report.verdict;
    return res;
}

}  // namespace majorant
