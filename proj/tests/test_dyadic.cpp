#include <doctest.h>

#include <cstdint>
#include <random>
#include <sstream>

#include "majorant/dyadic.hpp"

using namespace majorant;

namespace {

// Independent oracle: enumerate the totals of every frontier cut of the tree
// (every maximal disjoint family of dyadic arcs). Sums are built by cross
// combination; the max is taken only at the very end.
template <class Scalar>
std::vector<Scalar> cut_sums(const DyadicTree<Scalar>& data, const std::vector<Scalar>& lengths, int n,
                             std::int64_t k) {
    Scalar own = data.at(n, k) * lengths[n];
    if (n == data.depth) return {own};
    std::vector<Scalar> left = cut_sums(data, lengths, n + 1, 2 * k);
    std::vector<Scalar> right = cut_sums(data, lengths, n + 1, 2 * k + 1);
    std::vector<Scalar> out;
    out.reserve(left.size() * right.size() + 1);
    out.push_back(own);
    for (const Scalar& a : left)
        for (const Scalar& b : right) out.push_back(a + b);
    return out;
}

template <class Scalar>
Scalar best_cut_oracle(const DyadicTree<Scalar>& data, const std::vector<Scalar>& lengths) {
    std::vector<Scalar> sums = cut_sums(data, lengths, 0, 0);
    Scalar best = Scalar(0);
    for (const Scalar& s : sums) best = std::max(best, s);
    return best;
}

DyadicData make_random_data(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> val(0, 3);
    DyadicData data = DyadicData::zeros(depth);
    for (int n = 0; n <= depth; ++n)
        for (std::int64_t k = 0; k < (std::int64_t(1) << n); ++k) data.at(n, k) = val(rng);
    return data;
}

}  // namespace

TEST_CASE("packing dp on the spec examples") {
    {
        DyadicData d = DyadicData::zeros(3);
        DyadicDP dp = packing_dp(d);
        CHECK(dp.root() == 0.0);
        for (int n = 0; n <= 3; ++n)
            for (std::int64_t k = 0; k < (1 << n); ++k) {
                CHECK(dp.best.at(n, k) == 0.0);
                CHECK(dp.modified.at(n, k) == 0.0);
            }
    }
    {
        DyadicData d = DyadicData::zeros(1);
        d.at(0, 0) = 1.0;
        d.at(1, 0) = 3.0;
        DyadicDP dp = packing_dp(d);
        CHECK(dp.root() == doctest::Approx(3.0 * kPi).epsilon(1e-14));
        CHECK(dp.modified.at(0, 0) == doctest::Approx(1.5).epsilon(1e-14));
    }
    {
        DyadicData d = DyadicData::zeros(2);
        d.at(1, 0) = 1.0;
        d.at(2, 1) = 4.0;
        DyadicDP dp = packing_dp(d);
        CHECK(dp.root() == doctest::Approx(2.0 * kPi).epsilon(1e-14));
        CHECK(dp.modified.at(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("packing_condition examples") {
    DyadicData zero = DyadicData::zeros(4);
    CHECK(packing_condition(zero) == 0.0);
    DyadicData single = DyadicData::zeros(4);
    single.at(3, 5) = 2.0;
    CHECK(packing_condition(single) == doctest::Approx(kPi / 2.0).epsilon(1e-14));
    DyadicData ex = DyadicData::zeros(1);
    ex.at(0, 0) = 1.0;
    ex.at(1, 0) = 3.0;
    CHECK(packing_condition(ex) == doctest::Approx(3.0 * kPi).epsilon(1e-14));
}

TEST_CASE("dp equals exhaustive cut enumeration, exact integer mode") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 60; ++trial) {
        int depth = 1 + static_cast<int>(rng() % 5);
        DyadicData data = make_random_data(rng, depth);
        // scaled integer arithmetic: lengths 2^{depth-n}
        DyadicTree<std::int64_t> idata = DyadicTree<std::int64_t>::zeros(depth);
        std::vector<std::int64_t> ilengths(depth + 1);
        for (int n = 0; n <= depth; ++n) {
            ilengths[n] = std::int64_t(1) << (depth - n);
            for (std::int64_t k = 0; k < (std::int64_t(1) << n); ++k)
                idata.at(n, k) = static_cast<std::int64_t>(data.at(n, k));
        }
        auto ibest = packing_dp_core(idata, ilengths);
        CHECK(ibest.at(0, 0) == best_cut_oracle(idata, ilengths));

        // float mode against the same oracle in absolute units
        std::vector<double> lengths(depth + 1);
        for (int n = 0; n <= depth; ++n) lengths[n] = arc_length(n);
        DyadicDP dp = packing_dp(data);
        CHECK(dp.root() == doctest::Approx(best_cut_oracle(data, lengths)).epsilon(1e-12));
    }
}

TEST_CASE("modified data is discretely superharmonic") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        DyadicData data = make_random_data(rng, 6);
        DyadicDP dp = packing_dp(data);
        for (int n = 0; n < 6; ++n)
            for (std::int64_t k = 0; k < (std::int64_t(1) << n); ++k) {
                double parent = dp.modified.at(n, k);
                double mean = 0.5 * (dp.modified.at(n + 1, 2 * k) + dp.modified.at(n + 1, 2 * k + 1));
                CHECK(parent >= mean - 1e-12);
                CHECK(dp.modified.at(n, k) >= data.at(n, k) - 1e-12);
            }
    }
}

TEST_CASE("dominating measure on the spec examples") {
    {
        DyadicData d = DyadicData::zeros(1);
        d.at(1, 0) = 1.0;
        d.at(1, 1) = 1.0;
        CircleMeasure mu = build_dominating_measure(d);
        CHECK(mu.leaf_masses()[0] == doctest::Approx(kPi).epsilon(1e-14));
        CHECK(mu.leaf_masses()[1] == doctest::Approx(kPi).epsilon(1e-14));
    }
    {
        DyadicData d = DyadicData::zeros(1);
        d.at(0, 0) = 1.0;
        d.at(1, 0) = 3.0;
        CircleMeasure mu = build_dominating_measure(d);
        CHECK(mu.leaf_masses()[0] == doctest::Approx(3.0 * kPi).epsilon(1e-14));
        CHECK(mu.leaf_masses()[1] == 0.0);
    }
    {
        CircleMeasure mu = build_dominating_measure(DyadicData::zeros(3));
        CHECK(mu.total() == 0.0);
    }
}

TEST_CASE("dominating measure: domination and conservation at depth 12") {
    std::mt19937_64 rng(99);
    DyadicData data = DyadicData::zeros(12);
    std::uniform_real_distribution<double> val(0.0, 2.0);
    // sparse random demands
    for (int n = 0; n <= 12; ++n)
        for (std::int64_t k = 0; k < (std::int64_t(1) << n); ++k)
            if (rng() % 7 == 0) data.at(n, k) = val(rng);
    DyadicDP dp = packing_dp(data);
    CircleMeasure mu = build_dominating_measure(data);
    CHECK(std::abs(mu.total() - dp.root()) <= 1e-9);
    for (int n = 0; n <= 12; ++n)
        for (std::int64_t k = 0; k < (std::int64_t(1) << n); ++k) {
            double need = arc_length(n) * data.at(n, k);
            CHECK(mu.node_mass({n, k}) >= need - 1e-9);
            // conservation across splitting: parent mass equals child sum
            if (n < 12)
                CHECK(mu.node_mass({n, k}) ==
                      doctest::Approx(mu.node_mass({n + 1, 2 * k}) + mu.node_mass({n + 1, 2 * k + 1}))
                          .epsilon(1e-12));
        }
}

TEST_CASE("direct density examples and necessity") {
    {
        DyadicData d = DyadicData::zeros(1);
        d.at(1, 0) = 2.0;
        BoundaryDensity f = direct_density(d);
        CHECK(f.value_at(0.1) == doctest::Approx(2.0));
        CHECK(f.value_at(4.0) == doctest::Approx(0.0));
        CHECK(f.integral() == doctest::Approx(2.0 * kPi).epsilon(1e-13));
    }
    {
        DyadicData d = DyadicData::zeros(1);
        d.at(0, 0) = 1.0;
        d.at(1, 0) = 1.0;
        BoundaryDensity f = direct_density(d);
        CHECK(f.value_at(1.0) == doctest::Approx(2.0));
        CHECK(f.value_at(4.0) == doctest::Approx(1.0));
    }
    {
        BoundaryDensity f = direct_density(DyadicData::zeros(2));
        CHECK(f.integral() == 0.0);
        CHECK(f.value_at(1.0) == 0.0);
    }
    // necessity: the measure f dtheta dominates every node demand, and its
    // integral is the full demand sum
    std::mt19937_64 rng(123);
    DyadicData data = DyadicData::zeros(7);
    std::uniform_real_distribution<double> val(0.0, 1.5);
    double demand_sum = 0.0;
    for (int n = 0; n <= 7; ++n)
        for (std::int64_t k = 0; k < (std::int64_t(1) << n); ++k)
            if (rng() % 3 == 0) {
                data.at(n, k) = val(rng);
                demand_sum += data.at(n, k) * arc_length(n);
            }
    BoundaryDensity f = direct_density(data);
    CHECK(f.integral() == doctest::Approx(demand_sum).epsilon(1e-11));
    for (int n = 0; n <= 7; ++n)
        for (std::int64_t k = 0; k < (std::int64_t(1) << n); ++k) {
            if (data.at(n, k) == 0.0) continue;
            // mu_f(I_{n,k}) >= |I| p by integrating the density over the arc
            double lo = arc_theta_lo({n, k}), hi = arc_theta_hi({n, k});
            int cells = 1 << (7 - n);
            double mass = 0.0;
            for (int c = 0; c < cells; ++c) {
                double mid = lo + (hi - lo) * (c + 0.5) / cells;
                mass += f.value_at(mid) * (hi - lo) / cells;
            }
            CHECK(mass >= arc_length(n) * data.at(n, k) - 1e-9);
        }
}

TEST_CASE("square kernel values") {
    CircleMeasure uniform = CircleMeasure::uniform(6, kTwoPi);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        Complex z = std::polar(0.3 + 0.69 * unif(rng), kTwoPi * unif(rng));
        auto v = square_kernel_value(uniform, z, 1.0);
        REQUIRE(v.has_value());
        CHECK(*v == doctest::Approx(1.0).epsilon(1e-12));
    }
    // empty I_z: z near the center with a small aperture
    CHECK_FALSE(square_kernel_value(uniform, Complex(0.05, 0), 0.5).has_value());
    CHECK_FALSE(square_kernel_value(uniform, Complex(0, 0), 0.5).has_value());
    // zero measure
    CircleMeasure zero(4, Eigen::ArrayXd::Zero(16));
    CHECK(*square_kernel_value(zero, Complex(0.9, 0), 1.0) == 0.0);

    // single leaf of mass 1 at depth N with I_z equal to that leaf:
    // value = mass/|I_z| = 2^{N-1}/pi
    const int N = 5;
    Eigen::ArrayXd leaves = Eigen::ArrayXd::Zero(1 << N);
    leaves[0] = 1.0;
    CircleMeasure single(N, leaves);
    double leaf_center = 0.5 * arc_length(N);
    double half_width = 0.5 * arc_length(N);
    // choose |z| so that the computed arc I_z has exactly the leaf's width
    double target_cos = std::cos(half_width);
    double alpha = 1.0;
    double r_lo = 0.5, r_hi = 0.999999;
    for (int it = 0; it < 200; ++it) {
        double r = 0.5 * (r_lo + r_hi);
        double h = alpha * (1.0 - r * r);
        double c = (1.0 + r * r - h * h) / (2.0 * r);
        (c < target_cos ? r_lo : r_hi) = r;
    }
    Complex z = std::polar(0.5 * (r_lo + r_hi), leaf_center);
    auto arc = square_kernel_arc(z, alpha);
    REQUIRE(arc.has_value());
    CHECK(arc->second == doctest::Approx(half_width).epsilon(1e-6));
    auto v = square_kernel_value(single, z, alpha);
    REQUIRE(v.has_value());
    CHECK(*v == doctest::Approx(std::ldexp(1.0, N - 1) / kPi).epsilon(1e-5));
}

TEST_CASE("circle measure arc queries and serialization") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::ArrayXd leaves(8);
    for (int i = 0; i < 8; ++i) leaves[i] = unif(rng);
    CircleMeasure mu(3, leaves);
    CHECK(mu.arc_mass(0.0, kTwoPi) == doctest::Approx(mu.total()).epsilon(1e-13));
    // additivity over a random split
    for (int t = 0; t < 100; ++t) {
        double a = kTwoPi * unif(rng), b = a + kTwoPi * unif(rng);
        double c = a + (b - a) * unif(rng);
        CHECK(mu.arc_mass(a, b) == doctest::Approx(mu.arc_mass(a, c) + mu.arc_mass(c, b)).epsilon(1e-11));
    }
    CHECK(mu.node_mass({0, 0}) == doctest::Approx(mu.total()).epsilon(1e-13));
    CHECK(mu.node_mass({3, 2}) == doctest::Approx(leaves[2]).epsilon(1e-13));

    std::stringstream ss;
    save_circle_measure(ss, mu);
    CircleMeasure back = load_circle_measure(ss);
    CHECK(back.depth() == 3);
    for (int i = 0; i < 8; ++i) CHECK(back.leaf_masses()[i] == mu.leaf_masses()[i]);
}

TEST_CASE("dyadic data serialization round-trip") {
    DyadicData d = DyadicData::zeros(4);
    d.at(0, 0) = 0.25;
    d.at(3, 5) = 1.75;
    d.at(4, 15) = 3.0;
    std::stringstream ss;
    save_dyadic_data(ss, d);
    DyadicData back = load_dyadic_data(ss);
    CHECK(back.depth == 4);
    for (int n = 0; n <= 4; ++n)
        for (std::int64_t k = 0; k < (1 << n); ++k) CHECK(back.at(n, k) == d.at(n, k));
    std::stringstream bad("2\n5 0 1\n");
    CHECK_THROWS(load_dyadic_data(bad));
    DyadicData neg = DyadicData::zeros(1);
    neg.at(1, 0) = -1.0;
    CHECK_THROWS_AS(packing_dp(neg), std::invalid_argument);
}

TEST_CASE("whitney squares tile the disk") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int t = 0; t < 400; ++t) {
        Complex z = std::polar(unif(rng) * 0.9999, kTwoPi * unif(rng));
        DyadicIndex idx = whitney_index(z);
        WhitneySquare q{idx};
        CHECK(q.contains(z));
        // the parent-level square over the containing arc does not contain z
        if (idx.level > 0) {
            WhitneySquare parent{{idx.level - 1, idx.pos / 2}};
            CHECK_FALSE(parent.contains(z));
        }
    }
}
