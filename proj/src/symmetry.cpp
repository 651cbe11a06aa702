#include "odfmix/symmetry.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace odfmix {

namespace {

constexpr double kTol = 1e-9;

bool contains(const std::vector<UnitQuaternion>& set, const UnitQuaternion& q, bool up_to_sign) {
    for (const auto& e : set) {
        if (up_to_sign ? same_rotation(e, q, kTol) : same_rotation(e, q, kTol) && dot(e, q) > 0.0)
            return true;
    }
    return false;
}

// Flips sign so the first component that is not ~0 is positive.
UnitQuaternion sign_canonical(const UnitQuaternion& q) {
    for (std::size_t i = 0; i < 4; ++i) {
        if (std::fabs(q[i]) > kTol) return q[i] < 0.0 ? -q : q;
    }
    return q;
}

// Breadth-first closure under right multiplication by the generators.
std::vector<UnitQuaternion> close_group(const std::vector<UnitQuaternion>& generators,
                                        bool up_to_sign) {
    std::vector<UnitQuaternion> elements{UnitQuaternion::identity()};
    for (std::size_t head = 0; head < elements.size(); ++head) {
        for (const auto& gen : generators) {
            UnitQuaternion p = elements[head] * gen;
            if (up_to_sign) p = sign_canonical(p);
            if (!contains(elements, p, up_to_sign)) elements.push_back(p);
        }
    }
    return elements;
}

UnitQuaternion about(double x, double y, double z, double degrees) {
    return UnitQuaternion::axis_angle(x, y, z, degrees * 3.14159265358979323846 / 180.0);
}

}  // namespace

SymmetryGroup::SymmetryGroup(std::string name, std::vector<UnitQuaternion> elements)
    : name_(std::move(name)), elements_(std::move(elements)) {
    if (elements_.empty()) throw std::invalid_argument("symmetry group must not be empty");
}

const std::vector<std::string>& symmetry_catalog() {
    static const std::vector<std::string> names{"identity",   "cyclic-2",  "orthorhombic",
                                                "tetragonal", "hexagonal", "cubic-24",
                                                "octahedral-48"};
    return names;
}

SymmetryGroup symmetry_group(std::string_view name) {
    if (name == "identity") return SymmetryGroup{};
    if (name == "cyclic-2") return {"cyclic-2", close_group({about(0, 0, 1, 180)}, true)};
    if (name == "orthorhombic")
        return {"orthorhombic", close_group({about(1, 0, 0, 180), about(0, 1, 0, 180)}, true)};
    if (name == "tetragonal")
        return {"tetragonal", close_group({about(0, 0, 1, 90), about(1, 0, 0, 180)}, true)};
    if (name == "hexagonal")
        return {"hexagonal", close_group({about(0, 0, 1, 60), about(1, 0, 0, 180)}, true)};
    if (name == "cubic-24")
        return {"cubic-24", close_group({about(0, 0, 1, 90), about(1, 1, 1, 120)}, true)};
    if (name == "octahedral-48")
        return {"octahedral-48", close_group({about(0, 0, 1, 90), about(1, 1, 1, 120)}, false)};

    std::string msg = "unknown symmetry group '" + std::string(name) + "'; valid names:";
    for (const auto& n : symmetry_catalog()) msg += " " + n;
    throw CatalogError(msg);
}

GroupCheck check_group(const SymmetryGroup& g, double tol) {
    GroupCheck c;
    for (const auto& e : g.elements()) {
        if (same_rotation(e, UnitQuaternion::identity(), tol) && e.w() > 0.0) c.has_identity = true;
    }
    c.closed = true;
    for (const auto& a : g.elements()) {
        for (const auto& b : g.elements()) {
            const UnitQuaternion p = a * b;
            bool found = false;
            for (const auto& e : g.elements()) {
                if (same_rotation(e, p, tol)) {
                    found = true;
                    break;
                }
            }
            if (!found) c.closed = false;
        }
    }
    c.antipodal_free = true;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = i + 1; j < g.size(); ++j)
            if (same_rotation(g[i], g[j], tol)) c.antipodal_free = false;
    return c;
}

SymmetryGroup load_symmetry_group(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open symmetry file " + path.string());
    std::vector<UnitQuaternion> elements;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ss(line);
        std::vector<double> values;
        double value;
        while (ss >> value) values.push_back(value);
        if (values.size() != 4 || !ss.eof())
            throw ParseError("symmetry file line must hold four numbers", lineno);
        const Vec4 v{values[0], values[1], values[2], values[3]};
        const double norm = std::sqrt(dot(v, v));
        if (std::fabs(norm - 1.0) > 1e-6)
            throw ParseError("symmetry element is not a unit quaternion", lineno);
        elements.push_back(UnitQuaternion::normalize(v));
    }
    if (elements.empty()) throw ParseError("symmetry file holds no elements");
    SymmetryGroup group(path.stem().string(), std::move(elements));
    const GroupCheck check = check_group(group, 1e-6);
    if (!check.has_identity) throw ParseError("symmetry group lacks the identity");
    if (!check.closed) throw ParseError("symmetry elements are not closed under multiplication");
    return group;
}

std::vector<UnitQuaternion> equivalence_class(const UnitQuaternion& g, const SymmetryGroup& qc,
                                              const SymmetryGroup& qs) {
    std::vector<UnitQuaternion> out;
    out.reserve(qc.size() * qs.size());
    for (const auto& c : qc.elements()) {
        const UnitQuaternion cg = c * g;
        for (const auto& s : qs.elements()) out.push_back(cg * s);
    }
    return out;
}

UnitQuaternion canonicalize(const UnitQuaternion& g, const SymmetryGroup& qc,
                            const SymmetryGroup& qs) {
    constexpr double tie = 1e-12;
    auto better = [&](const UnitQuaternion& a, const UnitQuaternion& b) {
        for (std::size_t i = 0; i < 4; ++i) {
            if (a[i] > b[i] + tie) return true;
            if (a[i] < b[i] - tie) return false;
        }
        return false;
    };
    bool have = false;
    UnitQuaternion best;
    for (const auto& h : equivalence_class(g, qc, qs)) {
        for (const UnitQuaternion& cand : {h, -h}) {
            if (cand.w() < -tie) continue;
            if (!have || better(cand, best)) {
                best = cand;
                have = true;
            }
        }
    }
    return best;
}

double symmetric_distance(const UnitQuaternion& a, const UnitQuaternion& b,
                          const SymmetryGroup& qc, const SymmetryGroup& qs) {
    double best = 0.0;
    for (const auto& h : equivalence_class(b, qc, qs)) best = std::max(best, std::fabs(dot(a, h)));
    return 2.0 * std::acos(std::min(1.0, best));
}

}  // namespace odfmix
