#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

#include "odfmix/errors.hpp"
#include "odfmix/hash.hpp"
#include "odfmix/rjmcmc.hpp"

namespace odfmix {

namespace {

constexpr std::size_t kRestarts = 10;
constexpr std::size_t kLloydIterations = 100;

double axial_distance(const Vec4& a, const Vec4& b) { return 1.0 - std::fabs(dot(a, b)); }


Vec4 principal_axis(const std::vector<Vec4>& pts, const std::vector<std::size_t>& members) {
    Eigen::Matrix4d S = Eigen::Matrix4d::Zero();
    for (std::size_t i : members) {
        const Eigen::Vector4d x(pts[i][0], pts[i][1], pts[i][2], pts[i][3]);
        S += x * x.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(S);
    const Eigen::Vector4d v = es.eigenvectors().col(3);
    return {v(0), v(1), v(2), v(3)};
}

struct Clustering {
    std::vector<Vec4> centers;
    std::vector<std::size_t> sizes;
    double cost = std::numeric_limits<double>::infinity();
};

// One k-means++ start followed by Lloyd iterations; empty result when a
// cluster empties out.
Clustering lloyd(const std::vector<Vec4>& pts, std::size_t k, Rng& rng) {
    const std::size_t n = pts.size();
    std::vector<Vec4> centers;
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    centers.push_back(pts[first(rng)]);
    std::vector<double> d2(n);
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centers) best = std::min(best, axial_distance(pts[i], c));
            d2[i] = best * best;
            total += d2[i];
        }
        if (!(total > 0.0)) {
            centers.push_back(centers.front());
            continue;
        }
        std::discrete_distribution<std::size_t> pick(d2.begin(), d2.end());
        centers.push_back(pts[pick(rng)]);
    }

    std::vector<std::size_t> label(n, 0);
    Clustering out;
    for (std::size_t it = 0; it < kLloydIterations; ++it) {
        bool changed = it == 0;
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double bd = axial_distance(pts[i], centers[0]);
            for (std::size_t c = 1; c < k; ++c) {
                const double dd = axial_distance(pts[i], centers[c]);
                if (dd < bd) {
                    bd = dd;
                    best = c;
                }
            }
            changed = changed || label[i] != best;
            label[i] = best;
            cost += bd;
        }
        std::vector<std::vector<std::size_t>> members(k);
        for (std::size_t i = 0; i < n; ++i) members[label[i]].push_back(i);
        for (const auto& m : members)
            if (m.empty()) return {};
        for (std::size_t c = 0; c < k; ++c) centers[c] = principal_axis(pts, members[c]);
        out.cost = cost;
        out.sizes.assign(k, 0);
        for (std::size_t c = 0; c < k; ++c) out.sizes[c] = members[c].size();
        if (!changed) break;
    }
    out.centers = centers;
    return out;
}

}  // namespace

ModalOrientations modal_orientations(const Dataset& data, std::size_t M_max) {
    const std::size_t n = data.size();
    if (M_max < 1) throw ContractViolation("modal_orientations needs M_max >= 1");
    if (n < M_max) throw ContractViolation("modal_orientations needs at least M_max observations");

    std::vector<Vec4> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = canonicalize(data.observations[i], data.qc, data.qs).vec();
    std::sort(pts.begin(), pts.end());
    Rng rng(fnv1a(pts));

    Clustering best;
    for (std::size_t r = 0; r < kRestarts; ++r) {
        Clustering c = lloyd(pts, M_max, rng);
        if (!c.centers.empty() && c.cost < best.cost) best = std::move(c);
    }
    if (best.centers.empty()) {
        // every restart emptied a cluster (many duplicate points): fall back to
        // the leading distinct observations
        best.centers.assign(M_max, pts.front());
        best.sizes.assign(M_max, 0);
        std::size_t k = 0;
        for (std::size_t i = 0; i < n && k < M_max; ++i)
            if (k == 0 || axial_distance(pts[i], best.centers[k - 1]) > 0.0) best.centers[k++] = pts[i];
    }

    std::vector<std::size_t> order(M_max);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return best.sizes[a] > best.sizes[b]; });
    ModalOrientations out;
    for (std::size_t c : order)
        out.g_bar.push_back(canonicalize(UnitQuaternion::normalize(best.centers[c]), data.qc, data.qs));
    return out;
}

}  // namespace odfmix
