#include "odfmix/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "odfmix/errors.hpp"
#include "odfmix/hash.hpp"
#include "odfmix/symmetry.hpp"

namespace odfmix {

namespace {

// Power sums below this are recomputed in the log domain. Terms dropped by the
// kernels are below e^-70 each, so above it the dropped mass is negligible.
constexpr double kUnderflow = 1e-12;
constexpr double kFallbackKappa = 20.0;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

kernels::ClassPoints class_points(std::span<const UnitQuaternion> pts, const SymmetryGroup& qc,
                                  const SymmetryGroup& qs) {
    kernels::ClassPoints cp;
    cp.points = pts.size();
    cp.members = qc.size() * qs.size();
    cp.data.reserve(cp.points * cp.members);
    for (const auto& g : pts)
        for (const auto& h : equivalence_class(g, qc, qs)) cp.data.push_back(h.vec());
    return cp;
}

// log sum over members of [from, to) of |h . q|^(2 kappa).
double log_power_sum(const kernels::ClassPoints& cp, std::size_t from, std::size_t to, const Vec4& q,
                     double kappa) {
    if (kappa == 0.0) return std::log(static_cast<double>(to - from));
    double top = kNegInf;
    std::vector<double> terms;
    terms.reserve(to - from);
    for (std::size_t h = from; h < to; ++h) {
        const double d = std::fabs(dot(cp.data[h], q));
        const double t = d > 0.0 ? 2.0 * kappa * std::log(d) : kNegInf;
        terms.push_back(t);
        top = std::max(top, t);
    }
    if (top == kNegInf) return kNegInf;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - top);
    return top + std::log(s);
}

double logsumexp2(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

bool doubling(std::span<const double> k) {
    if (k.empty() || k.size() > 8 || !(k[0] > 0.0)) return false;
    for (std::size_t i = 1; i < k.size(); ++i)
        if (k[i] != 2.0 * k[i - 1]) return false;
    return true;
}

}  // namespace

double dvp_constant(double kappa) {
    return std::exp(std::lgamma(kappa + 2.0) - std::lgamma(kappa + 0.5)) / (2.0 * std::pow(std::numbers::pi, 1.5));
}

KernelSpec KernelSpec::make(double kappa) {
    if (!std::isfinite(kappa) || kappa < 0.0) throw ContractViolation("kernel kappa must be finite and >= 0");
    return {kappa, dvp_constant(kappa)};
}

double dvp_kernel(const UnitQuaternion& g, const UnitQuaternion& center, const KernelSpec& spec,
                  const SymmetryGroup& qc, const SymmetryGroup& qs) {
    double s = 0.0;
    for (const auto& h : equivalence_class(center, qc, qs))
        s += std::pow(std::fabs(dot(h, g)), 2.0 * spec.kappa);
    return spec.constant * s / static_cast<double>(qc.size() * qs.size());
}

KdeEstimator::KdeEstimator(const std::vector<UnitQuaternion>& centers, const SymmetryGroup& qc,
                           const SymmetryGroup& qs, const KernelSpec& spec, bool parallel)
    : spec_(spec), parallel_(parallel) {
    if (centers.empty()) throw ContractViolation("kernel density estimate needs at least one point");
    points_ = class_points(centers, qc, qs);
    log_scale_ = std::log(spec.constant) - std::log(static_cast<double>(points_.points * points_.members));
}

double KdeEstimator::exact_log_sum(const Vec4& q) const {
    return log_power_sum(points_, 0, points_.data.size(), q, spec_.kappa);
}

void KdeEstimator::log_density(std::span<const UnitQuaternion> g, std::span<double> out) const {
    std::vector<Vec4> q(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) q[i] = g[i].vec();
    if (parallel_)
        kernels::omp::kde_power_sums(points_, q, spec_.kappa, out);
    else
        kernels::serial::kde_power_sums(points_, q, spec_.kappa, out);
    for (std::size_t i = 0; i < g.size(); ++i)
        out[i] = log_scale_ + (out[i] >= kUnderflow ? std::log(out[i]) : exact_log_sum(q[i]));
}

void KdeEstimator::density(std::span<const UnitQuaternion> g, std::span<double> out) const {
    log_density(g, out);
    for (double& v : out) v = std::exp(v);
}

double KdeEstimator::log_density(const UnitQuaternion& g) const {
    double out = 0.0;
    log_density(std::span(&g, 1), std::span(&out, 1));
    return out;
}

double KdeEstimator::density(const UnitQuaternion& g) const { return std::exp(log_density(g)); }

const std::vector<double>& bandwidth_grid() {
    static const std::vector<double> grid{2.5, 5.0, 10.0, 20.0, 40.0, 80.0, 160.0};
    return grid;
}

std::vector<double> loo_scores(const Dataset& data, std::span<const double> kappas, bool parallel) {
    const std::size_t n = data.size();
    if (n < 2) throw ContractViolation("leave-one-out scores need at least 2 points");
    for (double k : kappas)
        if (!(k > 0.0) || !std::isfinite(k)) throw ContractViolation("leave-one-out kappas must be positive");
    const auto cp = class_points(data.observations, data.qc, data.qs);
    const std::size_t m = cp.members;

    // Groups of kappas that form doubling ladders share one pass over the data.
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    if (doubling(kappas))
        groups.emplace_back(0, kappas.size());
    else
        for (std::size_t k = 0; k < kappas.size(); ++k) groups.emplace_back(k, 1);

    std::vector<double> scores(kappas.size(), 0.0);
    for (const auto& [first, len] : groups) {
        std::vector<double> sums(n * len);
        if (parallel)
            kernels::omp::loo_power_sums(cp, kappas[first], len, sums);
        else
            kernels::serial::loo_power_sums(cp, kappas[first], len, sums);
        for (std::size_t k = 0; k < len; ++k) {
            const double kappa = kappas[first + k];
            const double log_scale = std::log(dvp_constant(kappa)) - std::log(static_cast<double>((n - 1) * m));
            std::vector<double> terms(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double s = sums[i * len + k];
                double l = 0.0;
                if (s >= kUnderflow) {
                    l = std::log(s);
                } else {
                    const Vec4& p = cp.data[i * m];
                    l = logsumexp2(log_power_sum(cp, 0, i * m, p, kappa),
                                   log_power_sum(cp, (i + 1) * m, n * m, p, kappa));
                }
                terms[i] = log_scale + l;
            }
            scores[first + k] = std::ranges::any_of(terms, [](double t) { return t == kNegInf; })
                                    ? kNegInf
                                    : kernels::pairwise_sum(terms);
        }
    }
    return scores;
}

BandwidthSelection select_bandwidth(const Dataset& data, bool parallel, std::size_t cap) {
    if (data.size() < 10) throw ContractViolation("bandwidth selection needs at least 10 points");
    BandwidthSelection r;
    r.kappas = bandwidth_grid();

    Dataset core = data;
    if (cap >= 2 && data.size() > cap) {
        std::vector<Vec4> raw(data.size());
        for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = data.observations[i].vec();
        std::vector<std::size_t> idx(data.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::mt19937_64 rng(fnv1a(raw));
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(cap);
        std::sort(idx.begin(), idx.end());
        core.observations.clear();
        for (std::size_t i : idx) core.observations.push_back(data.observations[i]);
    }
    r.points_used = core.size();
    r.scores = loo_scores(core, r.kappas, parallel);

    std::size_t best = r.kappas.size();
    for (std::size_t k = 0; k < r.kappas.size(); ++k)
        if (r.scores[k] != kNegInf && (best == r.kappas.size() || r.scores[k] > r.scores[best])) best = k;
    if (best == r.kappas.size()) {
        r.spec = KernelSpec::make(kFallbackKappa);
        r.warning = "every leave-one-out score is -inf; using kappa = 20";
    } else {
        r.spec = KernelSpec::make(r.kappas[best]);
    }
    return r;
}

}  // namespace odfmix
