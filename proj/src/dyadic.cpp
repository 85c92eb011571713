#include "majorant/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace majorant {

bool WhitneySquare::contains(Complex z) const {
    double r = std::abs(z);
    if (r < r_lo() || r >= r_hi()) return false;
    double theta = std::arg(z);
    if (theta < 0) theta += kTwoPi;
    return theta >= arc_theta_lo(index) && theta < arc_theta_hi(index);
}

int whitney_level(Complex z) {
    double r = std::abs(z);
    if (r >= 1.0) throw std::domain_error("whitney_level: point not in disk");
    if (r < 0.5) return 0;
    return static_cast<int>(std::floor(-std::log2(1.0 - r)));
}

DyadicIndex whitney_index(Complex z) {
    int n = whitney_level(z);
    double theta = std::arg(z);
    if (theta < 0) theta += kTwoPi;
    auto k = static_cast<std::int64_t>(std::floor(theta / arc_length(n)));
    k = std::clamp<std::int64_t>(k, 0, (std::int64_t(1) << n) - 1);
    return {n, k};
}

void validate(const DyadicData& data) {
    if (data.depth < 0 || data.level_values.size() != static_cast<size_t>(data.depth) + 1)
        throw std::invalid_argument("DyadicData: level count does not match depth");
    for (int n = 0; n <= data.depth; ++n) {
        if (data.level_values[n].size() != (static_cast<size_t>(1) << n))
            throw std::invalid_argument("DyadicData: level size mismatch");
        for (double v : data.level_values[n])
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("DyadicData: values must be finite and >= 0");
    }
}

DyadicDP packing_dp(const DyadicData& data) {
    validate(data);
    std::vector<double> lengths(data.depth + 1);
    for (int n = 0; n <= data.depth; ++n) lengths[n] = arc_length(n);
    DyadicDP dp;
    dp.best = packing_dp_core(data, lengths);
    dp.modified = DyadicTree<double>::zeros(data.depth);
    for (int n = 0; n <= data.depth; ++n)
        for (std::int64_t k = 0; k < (std::int64_t(1) << n); ++k)
            dp.modified.at(n, k) = dp.best.at(n, k) / lengths[n];
    return dp;
}

double packing_condition(const DyadicData& data) { return packing_dp(data).root(); }

CircleMeasure::CircleMeasure(int depth, Eigen::ArrayXd leaf_masses, bool uniform)
    : depth_(depth), leaf_mass_(std::move(leaf_masses)), uniform_(uniform) {
    if (leaf_mass_.size() != (Eigen::Index(1) << depth_))
        throw std::invalid_argument("CircleMeasure: leaf count != 2^depth");
    if ((leaf_mass_ < 0.0).any()) throw std::invalid_argument("CircleMeasure: negative leaf mass");
    cumulative_.resize(leaf_mass_.size() + 1);
    cumulative_[0] = 0.0;
    for (Eigen::Index k = 0; k < leaf_mass_.size(); ++k)
        cumulative_[k + 1] = cumulative_[k] + leaf_mass_[k];
    total_ = cumulative_[leaf_mass_.size()];
}

CircleMeasure CircleMeasure::uniform(int depth, double total_mass) {
    Eigen::Index n = Eigen::Index(1) << depth;
    return CircleMeasure(depth, Eigen::ArrayXd::Constant(n, total_mass / static_cast<double>(n)), true);
}

double CircleMeasure::node_mass(DyadicIndex idx) const {
    if (idx.level > depth_) throw std::invalid_argument("node_mass: level below leaf depth");
    std::int64_t span = std::int64_t(1) << (depth_ - idx.level);
    std::int64_t lo = idx.pos * span;
    return cumulative_[lo + span] - cumulative_[lo];
}

double CircleMeasure::arc_mass(double theta0, double theta1) const {
    double len = theta1 - theta0;
    if (len <= 0.0) return 0.0;
    if (len >= kTwoPi) return total_;
    theta0 = std::fmod(theta0, kTwoPi);
    if (theta0 < 0) theta0 += kTwoPi;
    theta1 = theta0 + len;

    auto partial = [&](double a, double b) {  // 0 <= a <= b <= 2pi
        double n_leaves = static_cast<double>(leaf_mass_.size());
        double fa = a / kTwoPi * n_leaves, fb = b / kTwoPi * n_leaves;
        auto ia = static_cast<Eigen::Index>(std::floor(fa));
        auto ib = static_cast<Eigen::Index>(std::floor(fb));
        ia = std::min(ia, leaf_mass_.size() - 1);
        ib = std::min(ib, leaf_mass_.size() - 1);
        if (ia == ib) return leaf_mass_[ia] * (fb - fa);
        double m = leaf_mass_[ia] * (ia + 1 - fa);
        m += cumulative_[ib] - cumulative_[ia + 1];
        m += leaf_mass_[ib] * (fb - ib);
        return m;
    };
    if (theta1 <= kTwoPi) return partial(theta0, theta1);
    return partial(theta0, kTwoPi) + partial(0.0, theta1 - kTwoPi);
}

CircleMeasure build_dominating_measure(const DyadicData& data) {
    DyadicDP dp = packing_dp(data);
    int N = data.depth;
    std::vector<double> current{dp.root()};
    for (int n = 0; n < N; ++n) {
        std::vector<double> next(static_cast<size_t>(1) << (n + 1));
        for (std::int64_t k = 0; k < (std::int64_t(1) << n); ++k) {
            double mass = current[static_cast<size_t>(k)];
            double want_l = dp.best.at(n + 1, 2 * k);
            double want_r = dp.best.at(n + 1, 2 * k + 1);
            double excess = mass - want_l - want_r;
            if (excess < 0.0) excess = 0.0;  // DP guarantees >= 0 up to roundoff
            double left;
            if (want_l + want_r > 0.0)
                left = want_l + excess * (want_l / (want_l + want_r));
            else
                left = 0.5 * mass;
            left = std::clamp(left, 0.0, mass);  // roundoff guard
            next[static_cast<size_t>(2 * k)] = left;
            next[static_cast<size_t>(2 * k + 1)] = mass - left;  // conserve exactly
        }
        current = std::move(next);
    }
    Eigen::ArrayXd leaves = Eigen::Map<Eigen::ArrayXd>(current.data(), static_cast<Eigen::Index>(current.size()));
    return CircleMeasure(N, std::move(leaves));
}

BoundaryDensity direct_density(const DyadicData& data) {
    validate(data);
    int N = data.depth;
    Eigen::Index n_leaves = Eigen::Index(1) << N;
    Eigen::ArrayXd leaf_values(n_leaves);
    // path sums: value on a leaf is the sum of p over its ancestors and itself
    std::vector<double> prev{data.at(0, 0)};
    for (int n = 1; n <= N; ++n) {
        std::vector<double> acc(static_cast<size_t>(1) << n);
        for (std::int64_t k = 0; k < (std::int64_t(1) << n); ++k)
            acc[static_cast<size_t>(k)] = prev[static_cast<size_t>(k / 2)] + data.at(n, k);
        prev = std::move(acc);
    }
    for (Eigen::Index k = 0; k < n_leaves; ++k) leaf_values[k] = prev[static_cast<size_t>(k)];

    BoundaryDensity f;
    f.domain = Domain::disk;
    f.breakpoints.resize(static_cast<size_t>(n_leaves));
    for (Eigen::Index k = 0; k < n_leaves; ++k)
        f.breakpoints[static_cast<size_t>(k)] = kTwoPi * static_cast<double>(k) / static_cast<double>(n_leaves);
    f.values = std::move(leaf_values);
    return f;
}

std::optional<std::pair<double, double>> square_kernel_arc(Complex z, double alpha) {
    require_interior(z, Domain::disk, "square_kernel_arc");
    if (!(alpha > 0.0)) throw std::domain_error("square_kernel_arc: aperture <= 0");
    double r = std::abs(z);
    double h = alpha * (1.0 - r * r);
    if (r == 0.0) {
        if (h >= 1.0) return std::make_pair(0.0, kPi);
        return std::nullopt;
    }
    // |z - e^{i theta}|^2 = 1 + r^2 - 2 r cos(theta - phi) <= h^2
    double c = (1.0 + r * r - h * h) / (2.0 * r);
    if (c > 1.0) return std::nullopt;
    double phi = std::arg(z);
    if (phi < 0) phi += kTwoPi;
    if (c < -1.0) return std::make_pair(phi, kPi);
    return std::make_pair(phi, std::acos(c));
}

std::optional<double> square_kernel_value(const CircleMeasure& mu, Complex z, double alpha) {
    auto arc = square_kernel_arc(z, alpha);
    if (!arc) return std::nullopt;
    auto [center, half] = *arc;
    double len = std::min(2.0 * half, kTwoPi);
    return mu.arc_mass(center - half, center - half + len) / len;
}

void save_dyadic_data(std::ostream& os, const DyadicData& data) {
    os << data.depth << "\n";
    for (int n = 0; n <= data.depth; ++n)
        for (std::int64_t k = 0; k < (std::int64_t(1) << n); ++k)
            if (data.at(n, k) != 0.0) {
                os.precision(17);
                os << n << " " << k << " " << data.at(n, k) << "\n";
            }
}

DyadicData load_dyadic_data(std::istream& is) {
    int depth;
    if (!(is >> depth) || depth < 0 || depth > 30) throw std::runtime_error("load_dyadic_data: bad depth");
    DyadicData data = DyadicData::zeros(depth);
    int n;
    std::int64_t k;
    double p;
    while (is >> n >> k >> p) {
        if (n < 0 || n > depth || k < 0 || k >= (std::int64_t(1) << n))
            throw std::runtime_error("load_dyadic_data: index out of range");
        if (!(p >= 0.0)) throw std::runtime_error("load_dyadic_data: negative value");
        data.at(n, k) = p;
    }
    return data;
}

void save_circle_measure(std::ostream& os, const CircleMeasure& mu) {
    os << "k,mass\n";
    os.precision(17);
    for (Eigen::Index k = 0; k < mu.leaf_masses().size(); ++k)
        os << k << "," << mu.leaf_masses()[k] << "\n";
}

CircleMeasure load_circle_measure(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("k,mass", 0) != 0)
        throw std::runtime_error("load_circle_measure: missing header");
    std::vector<double> masses;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("load_circle_measure: bad row");
        masses.push_back(std::stod(line.substr(comma + 1)));
    }
    auto n = static_cast<Eigen::Index>(masses.size());
    int depth = 0;
    while ((Eigen::Index(1) << depth) < n) ++depth;
    if ((Eigen::Index(1) << depth) != n) throw std::runtime_error("load_circle_measure: leaf count not a power of 2");
    return CircleMeasure(depth, Eigen::Map<Eigen::ArrayXd>(masses.data(), n));
}

}  // namespace majorant
