#include "odfmix/sphere.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace odfmix {

namespace {
constexpr double kPi = 3.14159265358979323846;

double radical_inverse(std::uint64_t i, std::uint64_t base) {
    double inv = 1.0 / static_cast<double>(base), f = inv, r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}
}  // namespace

GaussRule gauss_legendre(std::size_t n, double a, double b) {
    if (n == 0) throw std::invalid_argument("Gauss-Legendre rule needs at least one node");
    // P_n(x) and P_n'(x) by the three-term recurrence
    auto legendre = [n](double x, double& deriv) {
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
            p0 = p1;
            p1 = p2;
        }
        deriv = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        return p1;
    };
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            const double dx = legendre(x, dp) / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        legendre(x, dp);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = mid - half * x;
        rule.nodes[n - 1 - i] = mid + half * x;
        rule.weights[i] = rule.weights[n - 1 - i] = half * w;
    }
    return rule;
}

double hopf_quadrature(const std::function<double(const Vec4&)>& f, std::size_t nodes) {
    const GaussRule t = gauss_legendre(nodes, 0.0, 0.5 * kPi);
    const GaussRule p = gauss_legendre(nodes, 0.0, 2.0 * kPi);
    std::vector<double> cp(nodes), sp(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        cp[i] = std::cos(p.nodes[i]);
        sp[i] = std::sin(p.nodes[i]);
    }
    double total = 0.0;
    for (std::size_t a = 0; a < nodes; ++a) {
        const double ct = std::cos(t.nodes[a]), st = std::sin(t.nodes[a]);
        double inner = 0.0;
        for (std::size_t b = 0; b < nodes; ++b) {
            double row = 0.0;
            for (std::size_t c = 0; c < nodes; ++c)
                row += p.weights[c] * f(Vec4{ct * cp[b], ct * sp[b], st * cp[c], st * sp[c]});
            inner += p.weights[b] * row;
        }
        total += t.weights[a] * ct * st * inner;
    }
    return total;
}

Vec4 cube_to_sphere(double u1, double u2, double u3) {
    const double r1 = std::sqrt(1.0 - u1), r2 = std::sqrt(u1);
    const double a = 2.0 * kPi * u2, b = 2.0 * kPi * u3;
    return {r1 * std::sin(a), r1 * std::cos(a), r2 * std::sin(b), r2 * std::cos(b)};
}

Estimate qmc_integrate(const std::function<double(const Vec4&)>& f, std::size_t points,
                       std::size_t replicates, std::uint64_t seed) {
    if (points == 0 || replicates < 2)
        throw std::invalid_argument("QMC needs points > 0 and at least two replicates");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> means(replicates);
    for (std::size_t r = 0; r < replicates; ++r) {
        const double s1 = unif(rng), s2 = unif(rng), s3 = unif(rng);
        double sum = 0.0;
        for (std::size_t i = 0; i < points; ++i) {
            const auto idx = static_cast<std::uint64_t>(i + 1);
            const double u1 = std::fmod(radical_inverse(idx, 2) + s1, 1.0);
            const double u2 = std::fmod(radical_inverse(idx, 3) + s2, 1.0);
            const double u3 = std::fmod(radical_inverse(idx, 5) + s3, 1.0);
            sum += f(cube_to_sphere(u1, u2, u3));
        }
        means[r] = kSphereArea * sum / static_cast<double>(points);
    }
    const double mean = std::accumulate(means.begin(), means.end(), 0.0) / replicates;
    double var = 0.0;
    for (double m : means) var += (m - mean) * (m - mean);
    var /= static_cast<double>(replicates - 1);
    return {mean, std::sqrt(var / static_cast<double>(replicates))};
}

}  // namespace odfmix
