#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "majorant/envelopes.hpp"
#include "majorant/grid.hpp"
#include "majorant/hyperbolic.hpp"
#include "majorant/kernels.hpp"

namespace majorant {

using json = nlohmann::json;

/// Tangential curve gamma(x) = x + i f(x) with f(t) = coeff t^exponent.
/// Requirements: f(t) <= t, f(t)/t -> 0, and the doubling bounds
/// f(t/2) >= f(t)/c0, f(3t/2) <= c0 f(t).
struct CurveSpec {
    double exponent = 2.0;
    double coeff = 1.0;
    double c0 = 4.0;
    double f(double t) const { return coeff * std::pow(t, exponent); }
};

void validate_curve_spec(const CurveSpec& spec);

/// Monotone rate s(t) = t^{-exponent}; sigma = s^{-1} where needed.
struct RateSpec {
    double exponent = 1.0;
    double s(double t) const { return std::pow(t, -exponent); }
    double s_inv(double u) const { return std::pow(u, -1.0 / exponent); }
    double sigma(double t) const { return s_inv(t); }
    double sigma_inv(double u) const { return s(u); }
};

/// Points a_k = x_k + i f(x_k) with constant hyperbolic spacing
/// rho(a_k, a_{k+1}) = 2 delta, x_0 = x_start, descending until x < x_min.
std::vector<Complex> curve_sequence(const CurveSpec& spec, double delta, double x_start = 1.0,
                                    double x_min = 1e-6);

/// Log potential of unit masses at a long tangential point sequence, with an
/// accelerated evaluator (exact near terms + panel-integrated far terms).
class HalfPlaneLogPotential {
  public:
    HalfPlaneLogPotential() = default;
    explicit HalfPlaneLogPotential(std::vector<Complex> points_descending_x);

    long size() const { return static_cast<long>(xs_.size()); }
    Complex point(long j) const { return {xs_[j], ys_[j]}; }  // ascending x

    double term(long j, Complex z) const;  // log(1/d(a_j, z))
    double eval_exact(Complex z) const;
    /// absolute error ~1e-3 against eval_exact; validated by tests
    double eval_fast(Complex z) const;
    /// index of the hyperbolically nearest point (ascending-x indexing)
    long nearest_index(Complex z) const;

  private:
    std::vector<double> xs_, ys_;  // ascending in x
};

/// The Lemma-2 function on the upper half-plane: log(1/|B_0|) capped inside
/// the discs D_H(a_k, delta), k >= k0, by the per-disc minima of phi_sigma.
class CounterexamplePhi {
  public:
    CounterexamplePhi(std::vector<Complex> curve_points, std::function<double(double)> sigma, double delta);

    double evaluate(Complex z, bool exact = false) const;
    double blaschke_part(Complex z, bool exact = false) const;

    long k0() const { return k0_; }
    double c_delta() const { return c_delta_; }
    double threshold() const { return threshold_; }
    double delta() const { return delta_; }
    const std::vector<Complex>& all_points() const { return all_points_; }

    // tail points (k >= k0) indexed ascending in x
    long tail_count() const { return potential_.size(); }
    Complex tail_point(long j) const { return potential_.point(j); }
    double tail_cap(long j) const { return caps_asc_[static_cast<size_t>(j)]; }
    const HalfPlaneLogPotential& potential() const { return potential_; }

  private:
    std::vector<Complex> all_points_;  // descending x, k = 0,1,...
    std::function<double(double)> sigma_;
    double delta_;
    long k0_ = 0;
    double c_delta_ = 0.0;
    double threshold_ = 0.0;
    std::vector<double> caps_asc_;      // aligned with potential_'s indexing
    HalfPlaneLogPotential potential_;   // tail points only (ascending x)
};

/// max over D_H(c, r) of |x| + y, in closed form via the Euclidean disc.
double max_abs_x_plus_y(Complex center, double hyper_radius);

CounterexamplePhi counterexample_phi(const std::function<double(double)>& sigma, const CurveSpec& spec,
                                     double delta, double x_min = 1e-6);

struct DefectInstrumentOptions {
    int trials = 1000;
    int circle_nodes = 256;
    double radius_frac_lo = 0.1;   // circle radius as a fraction of the height
    double radius_frac_hi = 0.45;
    unsigned seed = 77;
    // sampling box (half-plane: x range and log-y range; disk: |z| <= x_hi)
    double x_lo = -1.0, x_hi = 1.0;
    double y_lo = 1e-4, y_hi = 1.0;
};

struct DefectInstrumentResult {
    double max_defect = -std::numeric_limits<double>::infinity();
    Complex worst_center;
    double worst_radius = 0.0;
};

/// Circle-mean minus center value, maximized over sampled circles inside the
/// domain; <= tolerance certifies the sub-mean inequality on the sample.
DefectInstrumentResult superharmonic_defect(const std::function<double(Complex)>& phi, Domain domain,
                                            const DefectInstrumentOptions& opt = {});

/// Disk variant of the Lemma-2 capping for end-to-end pipeline tests.
class CappedBlaschkePhi {
  public:
    CappedBlaschkePhi(const ZeroSet& zeros, double delta, double cap_margin = 1.0);
    double evaluate(Complex z) const;
    const ZeroSet& zeros() const { return zeros_; }
    double cap(size_t k) const { return caps_[k]; }
    double c_delta() const { return c_delta_; }

  private:
    ZeroSet zeros_;
    double delta_;
    double c_delta_ = 0.0;
    std::vector<double> caps_;
};

struct ExperimentReport {
    std::string name;
    json data;
    std::map<std::string, std::string> attachments;  // csv name -> content
    std::string verdict;
};

struct SharpmaxfOptions {
    RateSpec s{1.0};
    CurveSpec curve{2.0, 1.0, 4.0};
    double delta = 0.2;
    double x_min = 1e-6;
    int cutoff_lo = 5, cutoff_hi = 20;  // x_K = 2^-j
    double t_lo = 10.0, t_hi = 1e4;
    int n_thresholds = 25;
    int xi_per_decade = 48;
    double profile_slack = 1.1;  // allowed factor on 2 sigma^{-1}(t)
    int kernel_t_count = 81;
};

ExperimentReport run_sharpmaxf(const SharpmaxfOptions& opt = {});

struct AnyrateOptions {
    RateSpec s{1.0};
    double delta = 0.2;
    double x_min = 1e-4;
    double coeff_safety = 0.25;  // f = safety * s^{-1}(1/x^2)
    DefectInstrumentOptions defect;
    double xi_lo = 1e-3, xi_hi = 1e-1;
    int xi_count = 50;
};

ExperimentReport run_anyrate(const AnyrateOptions& opt = {});

struct RnotlipOptions {
    double gamma = 1.0;
    double delta = 0.1;
    double eps = 0.01;
    DiskGrid grid{0.02, 165, 512};
    std::vector<double> radii = {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125};
    int max_iter = 400;
    double tol = 1e-5;
    int circle_samples = 4096;
    double gradient_step_rho = 0.1;  // central-difference offset
};

struct RnotlipResult {
    ExperimentReport report;
    double gradient_estimate = 0.0;
    double target = 0.0;
    double envelope_fixed_point_max_rel = 0.0;
    double interior_identity_max_rel = 0.0;
    double h_over_g_max = 0.0;  // diagnostic: sup H/g_eps (paper regime iff <= 1)
    GridFunction reduced;
};

RnotlipResult run_rnotlip(const RnotlipOptions& opt = {});

/// g_eps(z) = f((1-delta) z/(1-eps)) with f = Re (1+z)/(1-z).
double g_eps_value(Complex z, double delta, double eps);

/// Kernel-bound instrument of Proposition 4: integral of P_{x^2}(x-t) over
/// x in [0,1], adaptively refined near the peak at x ~ t.
double kernel_bound_integral(double t, int base_cells = 2000);

}  // namespace majorant
