#include "odfmix/grid.hpp"

#include <cmath>
#include <sstream>

#include "odfmix/errors.hpp"
#include "odfmix/sphere.hpp"

namespace odfmix {

namespace {

bool divides(double step, double span) {
    if (!(step > 0.0) || !std::isfinite(step)) return false;
    const double k = span / step;
    return std::fabs(k - std::round(k)) < 1e-9 && k >= 1.0;
}

std::size_t steps(double step, double span) { return static_cast<std::size_t>(std::floor(span / step + 1e-9)); }

}  // namespace

std::vector<std::string> GridSpec::problems() const {
    std::vector<std::string> out;
    if (!divides(resolution_deg, 360.0)) {
        std::ostringstream m;
        m << "grid resolution " << resolution_deg << " does not divide 360 degrees";
        out.push_back(m.str());
    }
    if (kind == Kind::PoleFigure && poles.empty()) out.push_back("pole figure needs at least one pole direction");
    for (std::size_t i = 0; i < poles.size(); ++i) {
        const auto& p = poles[i];
        const double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        if (!(n > 0.0) || !std::isfinite(n)) {
            std::ostringstream m;
            m << "pole direction " << i + 1 << " must be a finite nonzero vector";
            out.push_back(m.str());
        }
    }
    return out;
}

std::vector<EulerAngles> euler_grid(double resolution_deg) {
    if (!divides(resolution_deg, 360.0)) throw ContractViolation("grid resolution must divide 360 degrees");
    const std::size_t n1 = steps(resolution_deg, 360.0);
    const std::size_t nP = steps(resolution_deg, 180.0) + 1;
    std::vector<EulerAngles> out;
    out.reserve(n1 * nP * n1);
    for (std::size_t a = 0; a < n1; ++a)
        for (std::size_t b = 0; b < nP; ++b)
            for (std::size_t c = 0; c < n1; ++c)
                out.push_back({a * resolution_deg * kDeg, b * resolution_deg * kDeg, c * resolution_deg * kDeg});
    return out;
}

EulerGridValues evaluate_euler_grid(const Odf& odf, double resolution_deg) {
    EulerGridValues v;
    v.angles = euler_grid(resolution_deg);
    std::vector<UnitQuaternion> q(v.angles.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = euler_to_quat(v.angles[i]);
    v.mud.resize(q.size());
    odf.density(q, v.mud);
    for (double& x : v.mud) x *= kSphereArea;
    return v;
}

PoleFigure pole_figure(std::span<const UnitQuaternion> samples, const SymmetryGroup& qc, const SymmetryGroup& qs,
                       const Direction& pole, double resolution_deg, double kappa) {
    if (samples.empty()) throw ContractViolation("pole figure needs orientation samples");
    if (!divides(resolution_deg, 360.0)) throw ContractViolation("grid resolution must divide 360 degrees");
    const double len = std::sqrt(pole[0] * pole[0] + pole[1] * pole[1] + pole[2] * pole[2]);
    if (!(len > 0.0) || !std::isfinite(len)) throw ContractViolation("pole direction must be finite and nonzero");
    const Direction unit{pole[0] / len, pole[1] / len, pole[2] / len};
    // Specimen directions of every symmetric copy of the pole.
    std::vector<Direction> dirs;
    dirs.reserve(samples.size() * qc.size() * qs.size());
    for (const auto& g : samples)
        for (const auto& c : qc.elements()) {
            const Direction h = rotate(c.inverse(), unit);
            const Direction r = rotate(g.inverse(), h);
            for (const auto& s : qs.elements()) dirs.push_back(rotate(s.inverse(), r));
        }
    PoleFigure pf;
    pf.pole = unit;
    const std::size_t na = steps(resolution_deg, 360.0);
    const std::size_t np = steps(resolution_deg, 90.0) + 1;
    // ((1 + c) / 2)^kappa integrates to 4 pi / (kappa + 1) over S^2; the
    // antipodal average keeps the total, and uniform is 1 / (4 pi).
    const double scale = (kappa + 1.0) / static_cast<double>(dirs.size());
    for (std::size_t a = 0; a < na; ++a)
        for (std::size_t p = 0; p < np; ++p) {
            pf.azimuth_deg.push_back(a * resolution_deg);
            pf.polar_deg.push_back(p * resolution_deg);
        }
    pf.mud.resize(pf.azimuth_deg.size());
    const auto cells = static_cast<std::ptrdiff_t>(pf.mud.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < cells; ++i) {
        const double az = pf.azimuth_deg[i] * kDeg, po = pf.polar_deg[i] * kDeg;
        const Direction x{std::sin(po) * std::cos(az), std::sin(po) * std::sin(az), std::cos(po)};
        double s = 0.0;
        for (const auto& r : dirs) {
            const double c = r[0] * x[0] + r[1] * x[1] + r[2] * x[2];
            s += 0.5 * (std::pow(0.5 * (1.0 + c), kappa) + std::pow(0.5 * (1.0 - c), kappa));
        }
        pf.mud[i] = scale * s;
    }
    return pf;
}

}  // namespace odfmix
