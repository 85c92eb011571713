#include <doctest.h>

#include <random>

#include "majorant/hyperbolic.hpp"

using namespace majorant;

namespace {
Complex random_disk_point(std::mt19937_64& rng, double rho_max = 5.0) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    return std::polar(std::tanh(rho_max * unif(rng)), kTwoPi * unif(rng));
}
}  // namespace

TEST_CASE("pseudohyperbolic distance formulas") {
    CHECK(pseudo_distance(Complex(0, 0), Complex(0.3, 0.4), Domain::disk) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(pseudo_distance(Complex(0.5, 0), Complex(-0.5, 0), Domain::disk) == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(pseudo_distance(Complex(0, 1), Complex(0, 2), Domain::half_plane) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(pseudo_distance(disk_point(0.1, 0.2), disk_point(0.1, 0.2)) == 0.0);
    CHECK_THROWS_AS(pseudo_distance(disk_point(0.1, 0), half_plane_point(0, 1)), std::invalid_argument);
    CHECK_THROWS_AS(pseudo_distance(Point{Complex(1.5, 0), Domain::disk}, disk_point(0, 0)), std::domain_error);
    CHECK_THROWS_AS(disk_point(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(half_plane_point(0.0, 0.0), std::domain_error);
}

TEST_CASE("hyperbolic distance closed forms") {
    CHECK(hyperbolic_distance(Complex(0.2, 0.3), Complex(0.2, 0.3), Domain::disk) == 0.0);
    CHECK(hyperbolic_distance(Complex(0, 0), Complex(0.5, 0), Domain::disk) ==
          doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-14));
    CHECK(hyperbolic_distance(Complex(0, 1), Complex(0, 2), Domain::half_plane) ==
          doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("Mobius involution fixes the defining pair") {
    Complex a(0.3, 0.0);
    CHECK(std::abs(mobius_involution(a, Complex(0, 0)) - a) < 1e-15);
    CHECK(std::abs(mobius_involution(a, a)) < 1e-15);
    Complex z(0.7, 0.0);
    CHECK(std::abs(mobius_involution(a, mobius_involution(a, z)) - z) < 1e-14);
    std::mt19937_64 rng(1);
    for (int t = 0; t < 200; ++t) {
        Complex base = random_disk_point(rng, 4.0), w = random_disk_point(rng, 4.0);
        Complex round_trip = mobius_involution(base, mobius_involution(base, w));
        CHECK(std::abs(round_trip - w) < 1e-12);
    }
}

TEST_CASE("Mobius invariance of the pseudohyperbolic distance") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 500; ++t) {
        Complex a = random_disk_point(rng, 4.0), z = random_disk_point(rng, 4.0), w = random_disk_point(rng, 4.0);
        double before = pseudo_distance(z, w, Domain::disk);
        double after = pseudo_distance(mobius_involution(a, z), mobius_involution(a, w), Domain::disk);
        CHECK(std::abs(before - after) <= 1e-12);
    }
}

TEST_CASE("metric axioms for rho on random triples") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 1200; ++t) {
        Complex a = random_disk_point(rng), b = random_disk_point(rng), c = random_disk_point(rng);
        double ab = hyperbolic_distance(a, b, Domain::disk);
        double bc = hyperbolic_distance(b, c, Domain::disk);
        double ac = hyperbolic_distance(a, c, Domain::disk);
        CHECK(ac <= ab + bc + 1e-12);
        // rho dominates the pseudohyperbolic distance
        CHECK(2.0 * ab + 1e-15 >= 2.0 * pseudo_distance(a, b, Domain::disk));
    }
    // symmetry, on pairs at mutual distance <= 5 (the atanh amplification of
    // the quotient roundoff is cosh^2 of the distance)
    for (int t = 0; t < 1200; ++t) {
        Complex a = random_disk_point(rng, 5.0);
        Complex b = mobius_involution(a, random_disk_point(rng, 5.0));
        CHECK(std::abs(hyperbolic_distance(a, b, Domain::disk) - hyperbolic_distance(b, a, Domain::disk)) <=
              1e-11);
    }
}

TEST_CASE("harnack bounds") {
    auto [lo0, hi0] = harnack_bounds(0.0);
    CHECK(lo0 == 1.0);
    CHECK(hi0 == 1.0);
    auto [lo, hi] = harnack_bounds(0.5);
    CHECK(lo == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(hi == doctest::Approx(3.0).epsilon(1e-14));
    auto [lo9, hi9] = harnack_bounds(0.9);
    CHECK(lo9 == doctest::Approx(1.0 / 19.0).epsilon(1e-12));
    CHECK(hi9 == doctest::Approx(19.0).epsilon(1e-12));
    CHECK(lo * hi == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(harnack_bounds(1.0), std::domain_error);
}

TEST_CASE("hyperbolic disc euclidean realization") {
    double delta = 0.37;
    EuclideanDisc d0 = hyperbolic_disc_euclidean(Complex(0, 0), delta);
    CHECK(std::abs(d0.center) == 0.0);
    CHECK(d0.radius == doctest::Approx(std::tanh(delta)).epsilon(1e-14));
    EuclideanDisc dz = hyperbolic_disc_euclidean(Complex(0, 0), 0.0);
    CHECK(dz.radius == 0.0);

    // every boundary point of the returned disc is at rho-distance r
    std::mt19937_64 rng(4);
    for (int t = 0; t < 60; ++t) {
        Complex c = random_disk_point(rng, 2.5);
        double r = 0.05 + 1.5 * std::uniform_real_distribution<double>(0, 1)(rng);
        EuclideanDisc disc = hyperbolic_disc_euclidean(c, r);
        for (int k = 0; k < 32; ++k) {
            Complex z = disc.center + std::polar(disc.radius, kTwoPi * k / 32.0);
            CHECK(std::abs(hyperbolic_distance(c, z, Domain::disk) - r) < 1e-9);
        }
        CHECK(std::abs(disc.center) + disc.radius < 1.0);
    }
    EuclideanDisc half = hyperbolic_disc_euclidean(Complex(0.5, 0), 0.5);
    for (int k = 0; k < 32; ++k) {
        Complex z = half.center + std::polar(half.radius, kTwoPi * k / 32.0);
        CHECK(std::abs(hyperbolic_distance(Complex(0.5, 0), z, Domain::disk) - 0.5) < 1e-9);
    }
}

TEST_CASE("half-plane hyperbolic disc realization") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int t = 0; t < 60; ++t) {
        Complex c(2.0 * unif(rng) - 1.0, 0.01 + 2.0 * unif(rng));
        double r = 0.05 + unif(rng);
        EuclideanDisc disc = halfplane_disc_euclidean(c, r);
        for (int k = 0; k < 16; ++k) {
            Complex z = disc.center + std::polar(disc.radius, kTwoPi * k / 16.0);
            CHECK(std::abs(hyperbolic_distance(c, z, Domain::half_plane) - r) < 1e-9);
        }
    }
}

TEST_CASE("stolz angle membership") {
    CHECK(stolz_contains(halfplane_stolz(0.0, 1.0), Complex(0, 1)));
    CHECK_FALSE(stolz_contains(halfplane_stolz(0.0, 1.0), Complex(2.0, 0.5)));
    // on the disk with vertex 1 the origin is in the angle iff alpha >= 1
    CHECK(stolz_contains(disk_stolz(Complex(1, 0), 1.0), Complex(0, 0)));
    CHECK(stolz_contains(disk_stolz(Complex(1, 0), 1.5), Complex(0, 0)));
    CHECK_FALSE(stolz_contains(disk_stolz(Complex(1, 0), 0.99), Complex(0, 0)));
    // truncation caps the height
    CHECK_FALSE(stolz_contains(halfplane_stolz(0.0, 1.0, 0.5), Complex(0, 1)));
    CHECK(stolz_contains(halfplane_stolz(0.0, 1.0, 2.0), Complex(0, 1)));
    CHECK_THROWS_AS(disk_stolz(Complex(0.5, 0), 1.0), std::domain_error);
    CHECK_THROWS_AS(halfplane_stolz(0.0, -1.0), std::domain_error);
}

TEST_CASE("beta mass of hyperbolic discs") {
    // beta(D(0,t)) = pi t^2/(1-t^2) with t = tanh r equals pi sinh^2 r
    double r = 0.8, t = std::tanh(r);
    CHECK(beta_disc_mass(r) == doctest::Approx(kPi * t * t / (1 - t * t)).epsilon(1e-13));
}
