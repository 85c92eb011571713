#include <doctest.h>

#include <random>

#include "majorant/experiments.hpp"

using namespace majorant;

TEST_CASE("curve spec validation") {
    CHECK_NOTHROW(validate_curve_spec(CurveSpec{2.0, 1.0, 4.0}));
    CHECK_NOTHROW(validate_curve_spec(CurveSpec{1.5, 1.0, 3.0}));
    // f(t) = t violates f(t)/t -> 0
    CHECK_THROWS_AS(validate_curve_spec(CurveSpec{1.0, 1.0, 4.0}), std::invalid_argument);
    // doubling constant too small for the exponent
    CHECK_THROWS_AS(validate_curve_spec(CurveSpec{3.0, 1.0, 4.0}), std::invalid_argument);
    // f(t) > t
    CHECK_THROWS_AS(validate_curve_spec(CurveSpec{2.0, 3.0, 8.0}), std::invalid_argument);
}

TEST_CASE("curve sequence spacing and monotonicity") {
    CurveSpec spec{2.0, 1.0, 4.0};
    double delta = 0.2;
    auto pts = curve_sequence(spec, delta, 1.0, 1e-4);
    REQUIRE(pts.size() > 100);
    for (size_t k = 0; k + 1 < pts.size(); ++k) {
        CHECK(pts[k + 1].real() < pts[k].real());
        CHECK(pts[k + 1].real() > 0.0);
        double gap = hyperbolic_distance(pts[k], pts[k + 1], Domain::half_plane);
        CHECK(std::abs(gap - 2.0 * delta) <= 1e-9);
        // points lie on the curve
        CHECK(pts[k].imag() == doctest::Approx(spec.f(pts[k].real())).epsilon(1e-12));
    }
}

TEST_CASE("accelerated log potential matches the exact sum") {
    CurveSpec spec{2.0, 1.0, 4.0};
    auto pts = curve_sequence(spec, 0.2, 1.0, 2e-5);  // ~60k points
    HalfPlaneLogPotential pot(pts);
    REQUIRE(pot.size() > 30000);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 120; ++t) {
        double x = (t % 3 == 0) ? (2.0 * unif(rng) - 1.0) : std::pow(10.0, -4.5 * unif(rng));
        double y = std::pow(10.0, -6.0 * unif(rng));
        Complex z(x, y);
        double fast = pot.eval_fast(z);
        double exact = pot.eval_exact(z);
        worst = std::max(worst, std::abs(fast - exact) / (1.0 + std::abs(exact)));
    }
    CHECK(worst <= 2e-3);
}

TEST_CASE("max of |x|+y over hyperbolic discs") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int t = 0; t < 40; ++t) {
        Complex c(2.0 * unif(rng) - 1.0, 0.05 + unif(rng));
        double r = 0.05 + 0.4 * unif(rng);
        double closed = max_abs_x_plus_y(c, r);
        EuclideanDisc disc = halfplane_disc_euclidean(c, r);
        double sampled = 0.0;
        for (int k = 0; k < 2048; ++k) {
            Complex z = disc.center + std::polar(disc.radius, kTwoPi * k / 2048.0);
            sampled = std::max(sampled, std::abs(z.real()) + z.imag());
        }
        CHECK(closed >= sampled - 1e-12);
        CHECK(closed <= sampled + 1e-4 * (1.0 + sampled));
    }
}

TEST_CASE("counterexample phi: caps, threshold and branch structure") {
    CurveSpec spec{2.0, 1.0, 4.0};
    double delta = 0.2;
    auto sigma = [](double t) { return 1.0 / (t * t); };
    auto pts = curve_sequence(spec, delta, 1.0, 1e-3);
    CounterexamplePhi phi(pts, sigma, delta);

    // k0 equals the brute-force smallest index from which all caps clear the threshold
    long k0_oracle = 0;
    for (long k = 0; k < static_cast<long>(pts.size()); ++k) {
        double cap = sigma(max_abs_x_plus_y(pts[static_cast<size_t>(k)], delta / 2.0));
        if (!(cap > phi.threshold())) k0_oracle = k + 1;
    }
    CHECK(phi.k0() == k0_oracle);

    // at a tail point the pole is capped by the phi_sigma branch
    long j = phi.tail_count() / 2;
    Complex ak = phi.tail_point(j);
    CHECK(phi.evaluate(ak, true) == doctest::Approx(phi.tail_cap(j)).epsilon(1e-12));

    // far from every point the function is the blaschke branch and is bounded
    // by the interpolation constant plus the threshold scale
    Complex far(0.5, 1.5);
    CHECK(phi.evaluate(far, true) == doctest::Approx(phi.blaschke_part(far, true)).epsilon(1e-12));

    // interpolation bound: on D_H(a_k, delta) the potential minus its own
    // term stays below c_delta
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        long jj = static_cast<long>(unif(rng) * (phi.tail_count() - 1));
        EuclideanDisc disc = halfplane_disc_euclidean(phi.tail_point(jj), delta * (0.2 + 0.75 * unif(rng)));
        Complex z = disc.center + std::polar(disc.radius * unif(rng), kTwoPi * unif(rng));
        double rest = phi.potential().eval_exact(z) - phi.potential().term(jj, z);
        CHECK(rest <= phi.c_delta() * (1.0 + 1e-9) + 1e-12);
    }

    // gluing consistency: for 3delta/4 <= rho <= delta the blaschke branch wins
    for (int trial = 0; trial < 60; ++trial) {
        long jj = 1 + static_cast<long>(unif(rng) * (phi.tail_count() - 2));
        double rr = delta * (0.75 + 0.24 * unif(rng));
        EuclideanDisc disc = halfplane_disc_euclidean(phi.tail_point(jj), rr);
        Complex z = disc.center + std::polar(disc.radius, kTwoPi * unif(rng));
        double bl = phi.blaschke_part(z, true);
        CHECK(bl <= phi.tail_cap(jj) + 1e-9);
    }
}

TEST_CASE("superharmonic defect instrument") {
    // harmonic: defect at quadrature precision
    auto harm = [](Complex z) { return 2.0 * z.imag() + 1.0; };
    DefectInstrumentOptions opt;
    opt.trials = 200;
    opt.circle_nodes = 128;
    DefectInstrumentResult res = superharmonic_defect(harm, Domain::half_plane, opt);
    CHECK(std::abs(res.max_defect) <= 1e-9);
    // |z|^2: circle mean exceeds the center by exactly r^2
    opt.trials = 300;
    DefectInstrumentResult sq = superharmonic_defect([](Complex z) { return std::norm(z); }, Domain::half_plane, opt);
    CHECK(sq.max_defect == doctest::Approx(sq.worst_radius * sq.worst_radius).epsilon(1e-9));
    // a log potential away from its poles
    ZeroSet zeros{Domain::half_plane, {{Complex(0.3, 2.5), 1.0}, {Complex(-0.4, 3.0), 1.0}}};
    DefectInstrumentOptions low;
    low.trials = 300;
    low.circle_nodes = 512;
    low.y_lo = 0.01;
    low.y_hi = 1.0;  // poles are higher up
    DefectInstrumentResult bl = superharmonic_defect(
        [&](Complex z) { return blaschke_log(zeros, z); }, Domain::half_plane, low);
    CHECK(bl.max_defect <= 1e-9);
}

TEST_CASE("capped blaschke on the disk is superharmonic and bounded") {
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    ZeroSet nu{Domain::disk, {}};
    for (int i = 0; i < 5; ++i) nu.zeros.push_back({std::polar(0.3 + 0.55 * unif(rng), kTwoPi * unif(rng)), 1.0});
    CappedBlaschkePhi phi(nu, 0.25);
    // bounded by the largest cap
    double cap_max = 0.0;
    for (size_t k = 0; k < nu.zeros.size(); ++k) cap_max = std::max(cap_max, phi.cap(k));
    std::mt19937_64 rng2(25);
    for (int t = 0; t < 2000; ++t) {
        Complex z = std::polar(0.999 * std::sqrt(unif(rng)), kTwoPi * unif(rng));
        CHECK(phi.evaluate(z) <= cap_max + 1e-12);
    }
    DefectInstrumentOptions opt;
    opt.trials = 500;
    opt.circle_nodes = 1024;
    opt.x_hi = 0.97;
    opt.radius_frac_lo = 0.05;
    opt.radius_frac_hi = 0.35;
    DefectInstrumentResult res = superharmonic_defect([&](Complex z) { return phi.evaluate(z); }, Domain::disk, opt);
    CHECK(res.max_defect <= 1e-6);
}

TEST_CASE("blaschke summability blocks decay geometrically") {
    CurveSpec spec{2.0, 1.0, 4.0};
    auto pts = curve_sequence(spec, 0.2, 1.0, 1e-5);
    // dyadic blocks in x: sums of y over [2^-j-1, 2^-j)
    std::vector<double> blocks(18, 0.0);
    for (const Complex& p : pts) {
        int j = static_cast<int>(std::floor(-std::log2(p.real())));
        if (j >= 0 && j < 18) blocks[static_cast<size_t>(j)] += p.imag();
    }
    double total = 0.0;
    for (int j = 2; j + 1 < 16; ++j) {
        if (blocks[j] == 0.0) continue;
        CHECK(blocks[j + 1] <= 0.75 * blocks[j]);
        total += blocks[j];
    }
    CHECK(total < 1.0);
}

TEST_CASE("curve is covered by doubled discs") {
    CurveSpec spec{2.0, 1.0, 4.0};
    double delta = 0.2;
    auto pts = curve_sequence(spec, delta, 1.0, 1e-3);
    std::mt19937_64 rng(26);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int t = 0; t < 500; ++t) {
        size_t k = static_cast<size_t>(unif(rng) * (pts.size() - 2));
        double x = pts[k + 1].real() + (pts[k].real() - pts[k + 1].real()) * unif(rng);
        Complex gamma_x(x, spec.f(x));
        double best = 1e300;
        for (size_t j = (k >= 2 ? k - 2 : 0); j < std::min(pts.size(), k + 4); ++j)
            best = std::min(best, hyperbolic_distance(gamma_x, pts[j], Domain::half_plane));
        CHECK(best <= 2.0 * delta + 1e-9);
    }
}

TEST_CASE("kernel bound integral") {
    // t = 0: integral of x^2/(x^4 + x^2)/pi = atan(1)/pi = 1/4
    CHECK(kernel_bound_integral(0.0) == doctest::Approx(0.25).epsilon(1e-6));
    // finite and mesh-stable across t, including the peaked region
    for (double t : {-1.5, -0.3, 0.04, 0.2, 0.5, 0.9, 1.3}) {
        double v1 = kernel_bound_integral(t, 2000);
        double v2 = kernel_bound_integral(t, 4000);
        CHECK(std::isfinite(v1));
        CHECK(std::abs(v2 - v1) <= 0.05 * std::max(v2, 1e-12));
    }
}

TEST_CASE("g_eps values") {
    CHECK(g_eps_value(Complex(0, 0), 0.1, 0.01) == doctest::Approx(1.0).epsilon(1e-14));
    // on the (1-eps) circle it matches f((1-delta) e^{i theta})
    double delta = 0.1, eps = 0.01;
    for (double th : {0.0, 0.4, 2.0}) {
        Complex w = std::polar(1.0 - eps, th);
        Complex zeta = (1.0 - delta) * std::polar(1.0, th);
        double f = (1.0 - std::norm(zeta)) / std::norm(1.0 - zeta);
        CHECK(g_eps_value(w, delta, eps) == doctest::Approx(f).epsilon(1e-13));
    }
}

TEST_CASE("anyrate experiment, shortened curve") {
    AnyrateOptions opt;
    opt.x_min = 1e-3;
    opt.defect.trials = 250;
    opt.defect.circle_nodes = 192;
    opt.xi_lo = 5e-3;
    opt.xi_count = 25;
    ExperimentReport rep = run_anyrate(opt);
    CHECK(rep.data["growth_margin"]["value"].get<double>() <= 1e-9);
    CHECK(rep.data["superharmonic_defect"]["value"].get<double>() <= 1e-6);
    CHECK(rep.data["min_mphi_xi2"]["value"].get<double>() > 0.05);
    CHECK(rep.verdict == "no-harmonic-majorant evidence (rate respected, weak-L1 violated)");
    // s exponent >= 2 cannot produce a valid tangential curve
    AnyrateOptions bad;
    bad.s.exponent = 2.0;
    CHECK_THROWS_AS(run_anyrate(bad), std::invalid_argument);
}

TEST_CASE("sharpmaxf experiment, shortened curve") {
    SharpmaxfOptions opt;
    opt.x_min = 1e-4;
    opt.t_lo = 10.0;
    opt.t_hi = 300.0;  // stays within the shortened curve's resolved range
    opt.n_thresholds = 12;
    opt.xi_per_decade = 30;
    opt.cutoff_lo = 3;
    opt.cutoff_hi = 12;
    opt.kernel_t_count = 21;
    ExperimentReport rep = run_sharpmaxf(opt);
    CHECK(rep.data["weak_l1_worst_ratio"]["value"].get<double>() <= 1.1);
    double min_inc = rep.data["mass_ladder_min_increment"]["value"].get<double>();
    CHECK(min_inc >= 0.9 * std::log(2.0) / 4.0);
    CHECK(rep.data["kernel_bound_mesh_instability"]["value"].get<double>() <= 0.05);
    CHECK(rep.data["curve_covering_worst_rho"]["value"].get<double>() <= 0.4 + 1e-6);
    CHECK(rep.verdict == "no-harmonic-majorant evidence");
}

TEST_CASE("rnotlip experiment in the valid regime") {
    RnotlipOptions opt;
    opt.gamma = 1.5;
    opt.delta = 0.2;
    opt.eps = 0.02;
    opt.grid = DiskGrid{0.05, 52, 512};
    opt.radii = {1.0, 0.5, 0.25, 0.125};
    opt.max_iter = 400;
    opt.tol = 1e-4;
    opt.circle_samples = 2048;
    RnotlipResult res = run_rnotlip(opt);
    // inside the Claim's regime H stays below g_eps
    CHECK(res.h_over_g_max <= 1.0 + 1e-9);
    // the envelope fixes H
    CHECK(res.envelope_fixed_point_max_rel <= 1e-3);
    // R(H) matches g_eps on the shrunken disk; the slow angular fill near the
    // peak leaves a few percent at this iteration budget
    CHECK(res.interior_identity_max_rel <= 4e-2);
    // gradient target 2(1-delta)/(1-eps) = 1.6327, above gamma
    CHECK(res.gradient_estimate == doctest::Approx(res.target).epsilon(0.15 / res.target));
    CHECK(res.gradient_estimate > opt.gamma);
    // parameter validation
    RnotlipOptions bad = opt;
    bad.eps = 0.15;
    CHECK_THROWS_AS(run_rnotlip(bad), std::invalid_argument);
    RnotlipOptions bad2 = opt;
    bad2.gamma = 1.99;
    CHECK_THROWS_AS(run_rnotlip(bad2), std::invalid_argument);
}
