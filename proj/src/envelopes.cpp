#include "majorant/envelopes.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>

#include "majorant/parallel.hpp"

namespace majorant {

GridDistanceTable::GridDistanceTable(const DiskGrid& g) : grid_(g) {
    long rows = static_cast<long>(g.n_rho + 1) * (g.n_rho + 2) / 2;
    data_.resize(rows * g.n_theta);
    parallel_for(0, g.n_rho + 1, [&](long lo, long hi) {
        for (long j = lo; j < hi; ++j)
            for (long i = 0; i <= j; ++i) {
                double* out = data_.data() + tri(static_cast<int>(i), static_cast<int>(j)) * grid_.n_theta;
                Complex zi = g.point(static_cast<int>(i), 0);
                for (int dm = 0; dm < g.n_theta; ++dm)
                    out[dm] = hyperbolic_distance(zi, g.point(static_cast<int>(j), dm), Domain::disk);
            }
    });
}

GridFunction log_lipschitz_envelope(const GridFunction& phi, double C, const GridDistanceTable* table) {
    if (!(C > 0.0)) throw std::domain_error("log_lipschitz_envelope: C <= 0");
    const DiskGrid& g = phi.grid;
    GridFunction out(g);
    if (phi.has_infinite()) {  // flagged: the envelope is infinite everywhere
        out.values.setConstant(std::numeric_limits<double>::infinity());
        return out;
    }
    std::optional<GridDistanceTable> local;
    if (!table) {
        local.emplace(g);
        table = &*local;
    } else if (!(table->grid() == g)) {
        throw std::invalid_argument("log_lipschitz_envelope: table built for another grid");
    }

    const int R = g.n_rho, N = g.n_theta;
    const double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> lrows(R + 1, std::vector<double>(N));
    std::vector<double> rowmax(R + 1, neg_inf);
    for (int j = 0; j <= R; ++j)
        for (int m = 0; m < N; ++m) {
            double v = phi.values(j, m);
            double l = v > 0.0 ? std::log(v) : neg_inf;
            lrows[j][m] = l;
            rowmax[j] = std::max(rowmax[j], l);
        }
    double global_max = *std::max_element(rowmax.begin(), rowmax.end());

    parallel_for(0, R + 1, [&](long ilo, long ihi) {
        std::vector<double> best(N);
        std::vector<int> order(R + 1);
        for (long i = ilo; i < ihi; ++i) {
            std::fill(best.begin(), best.end(), neg_inf);
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(),
                      [&](int a, int b) { return std::abs(a - i) < std::abs(b - i); });
            double best_min = neg_inf;
            for (int j : order) {
                const double* D = table->row(static_cast<int>(i), j);
                double radial = D[0];  // smallest distance to ring j
                if (global_max - C * radial <= best_min) break;
                if (rowmax[j] == neg_inf || rowmax[j] - C * radial <= best_min) continue;
                const double* lp = lrows[j].data();
                for (int m = 0; m < N; ++m) {
                    double b = best[m];
                    const double* Dm = D - m;
                    for (int mp = m; mp < N; ++mp) {
                        double v = lp[mp] - C * Dm[mp];
                        if (v > b) b = v;
                    }
                    const double* Dm2 = D + (N - m);
                    for (int mp = 0; mp < m; ++mp) {
                        double v = lp[mp] - C * Dm2[mp];
                        if (v > b) b = v;
                    }
                    best[m] = b;
                }
                best_min = *std::min_element(best.begin(), best.end());
            }
            for (int m = 0; m < N; ++m) out.values(i, m) = best[m] == neg_inf ? 0.0 : std::exp(best[m]);
        }
    });
    out.values.row(0).setConstant(out.values(0, 0));
    return out;
}

DefectReport log_lipschitz_defect(const GridFunction& F, double C, const DefectOptions& opt) {
    const DiskGrid& g = F.grid;
    DefectReport rep;
    for (int i = 0; i <= g.n_rho; ++i)
        for (int m = 0; m < g.n_theta; ++m) {
            double v = F.values(i, m);
            if (!(v > 0.0) || std::isinf(v)) ++rep.excluded_points;
        }
    auto usable = [&](int i, int m) {
        double v = F.values(i, m);
        return v > 0.0 && !std::isinf(v);
    };
    auto consider = [&](int i1, int m1, int i2, int m2) {
        if (!usable(i1, m1) || !usable(i2, m2)) return;
        Complex z = g.point(i1, m1), w = g.point(i2, m2);
        double rho = hyperbolic_distance(z, w, Domain::disk);
        double defect = std::abs(std::log(F.values(i1, m1)) - std::log(F.values(i2, m2))) - C * rho;
        if (defect > rep.max_defect) {
            rep.max_defect = defect;
            rep.witness_z = z;
            rep.witness_w = w;
        }
    };
    for (int i = 0; i < g.n_rho; ++i)
        for (int m = 0; m < g.n_theta; ++m) consider(i, m, i + 1, m);
    for (int i = 1; i <= g.n_rho; ++i)
        for (int m = 0; m < g.n_theta; ++m) consider(i, m, i, (m + 1) % g.n_theta);
    if (g.n_theta % 2 == 0)
        for (int i = 1; i <= g.n_rho; ++i)
            for (int m = 0; m < g.n_theta / 2; ++m) consider(i, m, i, m + g.n_theta / 2);
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<int> ri(0, g.n_rho), rm(0, g.n_theta - 1);
    for (long s = 0; s < opt.random_pairs; ++s) consider(ri(rng), rm(rng), ri(rng), rm(rng));
    return rep;
}

std::vector<double> default_radii() {
    return {4.0, 2.0, 1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
}

std::vector<double> reduce_radii() { return {4.0, 2.0, 1.0, 0.5, 0.25, 0.125}; }

DiscAverager::DiscAverager(const DiskGrid& grid, std::vector<double> radii, int subdiv, RadialDeposit deposit)
    : grid_(grid), radii_(std::move(radii)) {
    for (double r : radii_)
        if (!(r > 0.0)) throw std::domain_error("DiscAverager: radii must be positive");
    if (deposit == RadialDeposit::cubic && grid_.n_theta % 2 != 0)
        throw std::invalid_argument("DiscAverager: cubic deposit reflects through the center, n_theta must be even");
    if (subdiv < 1) subdiv = 1;
    stencils_.resize(radii_.size());
    const int R = grid_.n_rho, N = grid_.n_theta;
    const double h = grid_.drho, tstep = grid_.theta_step(), r_max = grid_.r_max();
    // the cubic deposit reaches two rings outward, keep the disc clear of the rim
    const double rim_margin = (deposit == RadialDeposit::cubic ? 1.5 : 0.5) * h;
    std::vector<double> worst_error(radii_.size(), 0.0);
    for (size_t q = 0; q < radii_.size(); ++q) {
        stencils_[q].resize(R + 1);
        const double r = radii_[q];
        const double beta_true = beta_disc_mass(r);
        std::vector<double> ring_err(R + 1, 0.0);
        parallel_for(0, R + 1, [&](long ilo, long ihi) {
            std::vector<double> scratch(static_cast<size_t>(R + 1) * N);
            for (long i = ilo; i < ihi; ++i) {
                double rho_c = grid_.rho(static_cast<int>(i));
                if (rho_c + r > r_max - rim_margin) continue;  // masked: disc exits the grid
                std::fill(scratch.begin(), scratch.end(), 0.0);
                double lo = std::max(0.0, rho_c - r), hi = rho_c + r;
                int nb = std::max(4, static_cast<int>(std::ceil((hi - lo) / (h / subdiv))));
                double a = std::tanh(rho_c), tt = std::tanh(r);
                double tt2 = tt * tt;
                // deposit `w` at radial coordinate u (in ring units) and angular
                // column c0/c1 split; negative rings reflect through the center
                auto deposit_radial = [&](double u, int c0, int c1, double w0, double w1) {
                    auto put = [&](int ring, int col, double wv) {
                        if (ring < 0) {
                            ring = -ring;
                            col += N / 2;
                        }
                        col %= N;
                        if (col < 0) col += N;
                        scratch[static_cast<size_t>(col) * (R + 1) + ring] += wv;
                    };
                    if (deposit == RadialDeposit::linear) {
                        int i0 = static_cast<int>(std::floor(u));
                        double fr = u - i0;
                        put(i0, c0, w0 * (1.0 - fr));
                        put(i0 + 1, c0, w0 * fr);
                        put(i0, c1, w1 * (1.0 - fr));
                        put(i0 + 1, c1, w1 * fr);
                    } else {
                        int n0 = static_cast<int>(std::floor(u));
                        double d = u - n0;
                        double lm1 = -d * (d - 1.0) * (d - 2.0) / 6.0;
                        double l0 = (d * d - 1.0) * (d - 2.0) / 2.0;
                        double l1 = -d * (d + 1.0) * (d - 2.0) / 2.0;
                        double l2 = d * (d * d - 1.0) / 6.0;
                        put(n0 - 1, c0, w0 * lm1);
                        put(n0, c0, w0 * l0);
                        put(n0 + 1, c0, w0 * l1);
                        put(n0 + 2, c0, w0 * l2);
                        put(n0 - 1, c1, w1 * lm1);
                        put(n0, c1, w1 * l0);
                        put(n0 + 1, c1, w1 * l1);
                        put(n0 + 2, c1, w1 * l2);
                    }
                };
                auto window_half_width = [&](double rho_m) {
                    if (i == 0) return rho_m <= r ? kPi : 0.0;
                    double bb = std::tanh(rho_m);
                    if (bb < 1e-14) return rho_c <= r ? kPi : 0.0;
                    double cstar =
                        (a * a + bb * bb - tt2 * (1.0 + a * a * bb * bb)) / (2.0 * a * bb * (1.0 - tt2));
                    if (cstar >= 1.0) return 0.0;
                    if (cstar <= -1.0) return kPi;
                    return std::acos(cstar);
                };
                for (int b = 0; b < nb; ++b) {
                    // the angular window closes like a square root at the
                    // radial edges of the disc; slice those bands finer so the
                    // midpoint mass does not overweight the rim
                    int slices = (b < 2 || b >= nb - 2) ? 8 : 1;
                    for (int sl = 0; sl < slices; ++sl) {
                        double rho_lo = lo + (hi - lo) * (b + static_cast<double>(sl) / slices) / nb;
                        double rho_hi = lo + (hi - lo) * (b + static_cast<double>(sl + 1) / slices) / nb;
                        double rho_m = 0.5 * (rho_lo + rho_hi);
                        double phimax = window_half_width(rho_m);
                        if (phimax <= 0.0) continue;
                        double sh_hi = std::sinh(rho_hi), sh_lo = std::sinh(rho_lo);
                        double arc_mass = (sh_hi * sh_hi - sh_lo * sh_lo) * phimax;
                        int n_nodes = static_cast<int>(std::ceil(2.0 * phimax / tstep)) * subdiv;
                        n_nodes = std::clamp(n_nodes, 8, 2 * subdiv * N);
                        double w_node = arc_mass / n_nodes;
                        double u = rho_m / h;
                        for (int s = 0; s < n_nodes; ++s) {
                            double theta_s = -phimax + 2.0 * phimax * (s + 0.5) / n_nodes;
                            double v = theta_s / tstep;
                            int m0 = static_cast<int>(std::floor(v));
                            double gr = v - m0;
                            deposit_radial(u, m0, m0 + 1, w_node * (1.0 - gr), w_node * gr);
                        }
                    }
                }
                double total = 0.0;
                for (double wv : scratch) total += wv;
                if (!(total > 0.0)) continue;
                ring_err[i] = std::abs(total - beta_true) / beta_true;
                auto& st = stencils_[q][i];
                for (int dth = 0; dth < N; ++dth)
                    for (int ring = 0; ring <= R; ++ring) {
                        double wv = scratch[static_cast<size_t>(dth) * (R + 1) + ring];
                        if (wv != 0.0) st.push_back({ring, dth, wv / total});
                    }
            }
        });
        for (double e : ring_err) worst_error[q] = std::max(worst_error[q], e);
    }
    for (double e : worst_error) mass_error_ = std::max(mass_error_, e);
}

Eigen::ArrayXXd DiscAverager::average(const Eigen::ArrayXXd& in, int q) const {
    const int R = grid_.n_rho, N = grid_.n_theta;
    Eigen::ArrayXXd out = Eigen::ArrayXXd::Constant(R + 1, N, std::numeric_limits<double>::quiet_NaN());
    parallel_for(0, R + 1, [&](long ilo, long ihi) {
        for (long i = ilo; i < ihi; ++i) {
            const auto& st = stencils_[q][i];
            if (st.empty()) continue;
            int m_count = (i == 0) ? 1 : N;  // the center row is a single point
            for (int m = 0; m < m_count; ++m) {
                double acc = 0.0;
                for (const auto& e : st) {
                    int col = m + e.dtheta;
                    if (col >= N) col -= N;
                    acc += e.weight * in(e.ring, col);
                }
                out(i, m) = acc;
            }
            if (i == 0) out.row(0).setConstant(out(0, 0));
        }
    });
    return out;
}

Eigen::ArrayXXd DiscAverager::sup_mean(const Eigen::ArrayXXd& in) const {
    const int R = grid_.n_rho, N = grid_.n_theta;
    Eigen::ArrayXXd out = in;
    for (size_t q = 0; q < radii_.size(); ++q) {
        parallel_for(0, R + 1, [&](long ilo, long ihi) {
            for (long i = ilo; i < ihi; ++i) {
                const auto& st = stencils_[q][i];
                if (st.empty()) continue;
                int m_count = (i == 0) ? 1 : N;
                for (int m = 0; m < m_count; ++m) {
                    double acc = 0.0;
                    for (const auto& e : st) {
                        int col = m + e.dtheta;
                        if (col >= N) col -= N;
                        acc += e.weight * in(e.ring, col);
                    }
                    if (acc > out(i, m)) out(i, m) = acc;
                }
            }
        });
    }
    out.row(0).setConstant(out(0, 0));
    return out;
}

MaskedGridFunction invariant_mean(const GridFunction& u, double delta, int subdiv) {
    if (!(delta > 0.0 && delta <= 0.5)) throw std::domain_error("invariant_mean: delta outside (0, 1/2]");
    DiscAverager avg(u.grid, {delta}, subdiv);
    MaskedGridFunction out;
    out.f.grid = u.grid;
    out.f.values = avg.average(u.values, 0);
    out.ring_valid.resize(u.grid.n_rho + 1);
    for (int i = 0; i <= u.grid.n_rho; ++i) out.ring_valid[i] = avg.available(i, 0);
    return out;
}

GridFunction hyperbolic_sup_mean(const GridFunction& F, const std::vector<double>& radii, int subdiv) {
    DiscAverager avg(F.grid, radii, subdiv);
    GridFunction out(F.grid);
    out.values = avg.sup_mean(F.values);
    return out;
}

const char* to_string(ReductionReport::Status s) {
    switch (s) {
        case ReductionReport::Status::converged: return "converged";
        case ReductionReport::Status::diverged: return "diverged";
        default: return "max-iterations";
    }
}

ReductionReport reduce(const GridFunction& phi, const DiscAverager& averager, int max_iter, double tol, double cap) {
    if (!(averager.grid() == phi.grid)) throw std::invalid_argument("reduce: averager grid mismatch");
    ReductionReport rep;
    rep.result.grid = phi.grid;
    double cap_abs = cap * std::max(1.0, phi.at_center());
    Eigen::ArrayXXd cur = phi.values;
    rep.trace.push_back(cur(0, 0));
    rep.status = ReductionReport::Status::max_iterations;
    for (int it = 1; it <= max_iter; ++it) {
        Eigen::ArrayXXd next = averager.sup_mean(cur);
        double change = 0.0;
        for (Eigen::Index k = 0; k < cur.size(); ++k) {
            double a = cur.data()[k], b = next.data()[k];
            if (std::isinf(a) || std::isinf(b)) continue;
            double rel = (b - a) / std::max(a, 1e-300);
            if (rel > change) change = rel;
        }
        cur.swap(next);
        rep.trace.push_back(cur(0, 0));
        rep.iterations = it;
        rep.final_max_rel_change = change;
        if (std::isinf(cur(0, 0)) || cur(0, 0) > cap_abs) {
            rep.status = ReductionReport::Status::diverged;
            break;
        }
        if (change < tol) {
            rep.status = ReductionReport::Status::converged;
            break;
        }
    }
    rep.result.values = std::move(cur);
    return rep;
}

ReductionReport reduce(const GridFunction& phi, const ReduceOptions& opt) {
    DiscAverager avg(phi.grid, opt.radii, opt.subdiv, opt.deposit);
    return reduce(phi, avg, opt.max_iter, opt.tol, opt.cap);
}

const char* to_string(MajorantTestResult::Verdict v) {
    switch (v) {
        case MajorantTestResult::Verdict::yes: return "YES";
        case MajorantTestResult::Verdict::no_evidence: return "NO-EVIDENCE";
        default: return "INCONCLUSIVE";
    }
}

MajorantTestResult harmonic_majorant_test(const GridFunction& phi, double C, const ReduceOptions& opt,
                                          const ZeroSet* witness_zeros, double witness_delta) {
    MajorantTestResult res;
    res.envelope = log_lipschitz_envelope(phi, C);
    res.reduction = reduce(res.envelope, opt);
    switch (res.reduction.status) {
        case ReductionReport::Status::converged:
            res.verdict = MajorantTestResult::Verdict::yes;
            break;
        case ReductionReport::Status::diverged:
            res.verdict = MajorantTestResult::Verdict::no_evidence;
            break;
        default:
            res.verdict = MajorantTestResult::Verdict::inconclusive;
            break;
    }
    if (res.verdict == MajorantTestResult::Verdict::yes && witness_zeros) {
        res.witness = build_harmonic_majorant(*witness_zeros, BoundaryDensity{}, witness_delta, phi.grid,
                                              &res.witness_report);
    }
    return res;
}

double invariant_mean_at(const std::function<double(Complex)>& u, Complex z, double delta, int n_radial,
                         int n_angular) {
    if (!(delta > 0.0)) throw std::domain_error("invariant_mean_at: delta <= 0");
    require_interior(z, Domain::disk, "invariant_mean_at");
    double t = std::tanh(delta);
    double total = 0.0, mass = 0.0;
    for (int j = 0; j < n_radial; ++j) {
        double s_lo = t * j / n_radial, s_hi = t * (j + 1) / n_radial;
        double ring_mass = s_hi * s_hi / (1.0 - s_hi * s_hi) - s_lo * s_lo / (1.0 - s_lo * s_lo);
        double s = 0.5 * (s_lo + s_hi);
        double circ = 0.0;
        for (int k = 0; k < n_angular; ++k) circ += u(mobius_involution(z, std::polar(s, kTwoPi * k / n_angular)));
        total += ring_mass * circ / n_angular;
        mass += ring_mass;
    }
    return total / mass;
}

double log_kernel_disc_mean(double s, double delta) {
    if (!(delta > 0.0)) throw std::domain_error("log_kernel_disc_mean: delta <= 0");
    if (!(s >= 0.0 && s < 1.0)) throw std::domain_error("log_kernel_disc_mean: s outside [0,1)");
    double t = std::tanh(delta);
    if (s >= t) return std::log(1.0 / s);
    double t2 = t * t;
    return std::log(1.0 / t) + (1.0 - t2) / (2.0 * t2) * std::log((1.0 - s * s) / (1.0 - t2));
}

double lemma3_kappa(double delta) {
    if (!(delta > 0.0 && delta <= 0.5)) throw std::domain_error("lemma3_kappa: delta outside (0, 1/2]");
    double k = 1.0 - std::atanh(delta / 4.0) / delta;
    if (!(k > 0.0)) throw std::domain_error("lemma3_kappa: no admissible inclusion constant");
    double s1 = std::sinh(delta), s2 = std::sinh(k * delta);
    return (s1 * s1) / (s2 * s2);
}

}  // namespace majorant
