#include "majorant/grid.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "majorant/parallel.hpp"

namespace majorant {

double DiskGrid::mesh_diameter() const {
    double worst = drho;
    // angular neighbor distance grows with the ring; check the outer rings
    for (int i = std::max(1, n_rho - 2); i <= n_rho; ++i) {
        double d = hyperbolic_distance(point(i, 0), point(i, 1), Domain::disk);
        worst = std::max(worst, d);
    }
    return worst;
}

std::pair<int, int> DiskGrid::nearest(Complex z) const {
    double r = std::abs(z);
    double rho = (r >= 1.0) ? r_max() : std::atanh(r);
    int i = static_cast<int>(std::lround(rho / drho));
    i = std::clamp(i, 0, n_rho);
    if (i == 0) return {0, 0};
    double th = std::arg(z);
    if (th < 0) th += kTwoPi;
    int m = static_cast<int>(std::lround(th / theta_step()));
    m %= n_theta;
    if (m < 0) m += n_theta;
    return {i, m};
}

GridFunction sample_on_grid(const DiskGrid& grid, const std::function<double(Complex)>& f) {
    GridFunction gf(grid);
    double center = f(Complex(0.0, 0.0));
    gf.values.row(0).setConstant(center);
    parallel_for(1, grid.n_rho + 1, [&](long lo, long hi) {
        for (long i = lo; i < hi; ++i)
            for (int m = 0; m < grid.n_theta; ++m)
                gf.values(i, m) = f(grid.point(static_cast<int>(i), m));
    });
    return gf;
}

void save_grid_csv(std::ostream& os, const GridFunction& gf) {
    os << "# drho=" << gf.grid.drho << " n_rho=" << gf.grid.n_rho << " n_theta=" << gf.grid.n_theta << "\n";
    os << "x,y,value\n";
    os.precision(17);
    for (int i = 0; i <= gf.grid.n_rho; ++i)
        for (int m = 0; m < gf.grid.n_theta; ++m) {
            Complex z = gf.grid.point(i, m);
            double v = gf.values(i, m);
            os << z.real() << "," << z.imag() << ",";
            if (std::isinf(v))
                os << "inf";
            else
                os << v;
            os << "\n";
        }
}

GridFunction load_grid_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.empty() || line[0] != '#')
        throw std::runtime_error("load_grid_csv: missing header");
    DiskGrid grid;
    {
        std::istringstream hs(line.substr(1));
        std::string tok;
        bool got_drho = false, got_nrho = false, got_ntheta = false;
        while (hs >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) continue;
            std::string key = tok.substr(0, eq);
            std::string val = tok.substr(eq + 1);
            if (key == "drho") grid.drho = std::stod(val), got_drho = true;
            if (key == "n_rho") grid.n_rho = std::stoi(val), got_nrho = true;
            if (key == "n_theta") grid.n_theta = std::stoi(val), got_ntheta = true;
        }
        if (!got_drho || !got_nrho || !got_ntheta) throw std::runtime_error("load_grid_csv: incomplete header");
    }
    if (!std::getline(is, line) || line.rfind("x,y,value", 0) != 0)
        throw std::runtime_error("load_grid_csv: missing column header");
    GridFunction gf(grid);
    for (int i = 0; i <= grid.n_rho; ++i)
        for (int m = 0; m < grid.n_theta; ++m) {
            if (!std::getline(is, line)) throw std::runtime_error("load_grid_csv: truncated file");
            auto c1 = line.find(',');
            auto c2 = line.find(',', c1 + 1);
            if (c1 == std::string::npos || c2 == std::string::npos)
                throw std::runtime_error("load_grid_csv: bad row");
            std::string v = line.substr(c2 + 1);
            if (v == "inf")
                gf.values(i, m) = std::numeric_limits<double>::infinity();
            else
                gf.values(i, m) = std::stod(v);
        }
    return gf;
}

}  // namespace majorant
