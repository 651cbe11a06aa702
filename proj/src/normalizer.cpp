#include "odfmix/normalizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "kernel_bodies.hpp"
#include "odfmix/errors.hpp"
#include "odfmix/kernels.hpp"

namespace odfmix {

namespace {

constexpr const char* kTableTag = "odfmix-normalizer-table v1";

void check_range(const Vec4& lambda, double lambda_max) {
    for (int d = 0; d < 4; ++d) {
        const double l = lambda[d];
        if (!std::isfinite(l) || l < 0.0 || l > lambda_max) {
            std::ostringstream msg;
            msg << "lambda" << d + 1 << " = " << l << " outside [0, " << lambda_max << "]";
            throw RangeError(msg.str(), d, l);
        }
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

double f_quadrature(const Vec4& lambda, std::size_t nodes) {
    const kernels::detail::HopfRule rule(nodes);
    return rule.integrate(lambda[0], lambda[1], lambda[2], lambda[3]);
}

Estimate f_oracle(const Vec4& lambda, const OracleBudget& budget, OracleMethod method) {
    check_range(lambda, budget.lambda_max);
    if (method == OracleMethod::Quadrature) {
        const double full = f_quadrature(lambda, budget.quadrature_nodes);
        const double half = f_quadrature(lambda, std::max<std::size_t>(budget.quadrature_nodes / 2, 1));
        return {full, std::fabs(full - half)};
    }
    const Vec4 l = lambda;
    return qmc_integrate(
        [&l](const Vec4& x) {
            return std::exp(-(l[0] * x[0] * x[0] + l[1] * x[1] * x[1] + l[2] * x[2] * x[2] +
                              l[3] * x[3] * x[3]));
        },
        budget.qmc_points, budget.qmc_replicates, budget.seed);
}

NormalizerTable::NormalizerTable(double lambda_max, std::size_t nodes, std::vector<double> values,
                                 std::string provenance)
    : lambda_max_(lambda_max), nodes_(nodes), values_(std::move(values)),
      provenance_(std::move(provenance)) {
    if (!(lambda_max > 0.0) || nodes < 2)
        throw std::invalid_argument("normalizer table needs lambda_max > 0 and at least 2 nodes");
    if (values_.size() != nodes * nodes * nodes)
        throw std::invalid_argument("normalizer table value count does not match nodes^3");
    log_values_.resize(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] > 0.0) || !std::isfinite(values_[i]))
            throw std::invalid_argument("normalizer table values must be finite and positive");
        log_values_[i] = std::log(values_[i]);
    }
}

double NormalizerTable::node_coordinate(std::size_t i) const {
    const double u = static_cast<double>(i) / static_cast<double>(nodes_ - 1);
    return lambda_max_ * u * u;
}

double NormalizerTable::log_f(const Vec4& lambda) const {
    check_range(lambda, lambda_max_);
    // F(l + c 1) = exp(-c) F(l): drop the smallest entry to zero, the rest are
    // permutation-symmetric coordinates of the table.
    const auto smallest = std::min_element(lambda.begin(), lambda.end());
    const double shift = *smallest;
    std::array<double, 3> rest{};
    std::size_t k = 0;
    for (auto it = lambda.begin(); it != lambda.end(); ++it)
        if (it != smallest) rest[k++] = *it - shift;

    const double scale = static_cast<double>(nodes_ - 1);
    std::array<std::size_t, 3> idx{};
    std::array<double, 3> frac{};
    for (std::size_t d = 0; d < 3; ++d) {
        const double u = std::sqrt(std::max(rest[d], 0.0) / lambda_max_) * scale;
        const auto i = std::min(static_cast<std::size_t>(u), nodes_ - 2);
        idx[d] = i;
        frac[d] = std::min(u - static_cast<double>(i), 1.0);
    }
    double acc = 0.0;
    for (int corner = 0; corner < 8; ++corner) {
        double w = 1.0;
        std::array<std::size_t, 3> at{};
        for (std::size_t d = 0; d < 3; ++d) {
            const bool up = (corner >> d) & 1;
            w *= up ? frac[d] : 1.0 - frac[d];
            at[d] = idx[d] + (up ? 1 : 0);
        }
        if (w != 0.0) acc += w * log_values_[(at[0] * nodes_ + at[1]) * nodes_ + at[2]];
    }
    return acc - shift;
}

double NormalizerTable::f(const Vec4& lambda) const { return std::exp(log_f(lambda)); }

void NormalizerTable::save(std::ostream& os) const {
    os << kTableTag << '\n'
       << "lambda_max " << format_double(lambda_max_) << '\n'
       << "nodes " << nodes_ << '\n'
       << "spacing squared\n"
       << "oracle " << (provenance_.empty() ? "unspecified" : provenance_) << '\n'
       << "values\n";
    for (double v : values_) os << format_double(v) << '\n';
}

void NormalizerTable::save(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    save(os);
    if (!os) throw IoError("write failed for " + path.string());
}

NormalizerTable NormalizerTable::load(std::istream& is) {
    std::string line;
    std::size_t lineno = 0;
    auto next = [&](const char* what) {
        if (!std::getline(is, line)) throw ParseError(std::string("table truncated before ") + what, lineno);
        ++lineno;
        return line;
    };
    if (next("header") != kTableTag) throw ParseError("not a normalizer table (bad header)", lineno);

    double lambda_max = 0.0;
    std::size_t nodes = 0;
    std::string provenance;
    for (;;) {
        const std::string l = next("values");
        if (l == "values") break;
        std::istringstream ss(l);
        std::string key;
        ss >> key;
        if (key == "lambda_max") {
            if (!(ss >> lambda_max)) throw ParseError("bad lambda_max", lineno);
        } else if (key == "nodes") {
            if (!(ss >> nodes)) throw ParseError("bad nodes", lineno);
        } else if (key == "spacing") {
            std::string kind;
            ss >> kind;
            if (kind != "squared") throw ParseError("unsupported spacing '" + kind + "'", lineno);
        } else if (key == "oracle") {
            std::getline(ss >> std::ws, provenance);
        } else {
            throw ParseError("unknown table field '" + key + "'", lineno);
        }
    }
    if (nodes < 2 || !(lambda_max > 0.0)) throw ParseError("table metadata incomplete", lineno);
    std::vector<double> values(nodes * nodes * nodes);
    for (double& v : values) {
        const std::string l = next("end of values");
        char* end = nullptr;
        v = std::strtod(l.c_str(), &end);
        if (end == l.c_str()) throw ParseError("bad table value '" + l + "'", lineno);
    }
    try {
        return NormalizerTable(lambda_max, nodes, std::move(values), provenance);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), lineno);
    }
}

NormalizerTable NormalizerTable::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open table " + path.string());
    return load(is);
}

NormalizerTable build_table(double lambda_max, std::size_t nodes_per_axis,
                            const TableBuildOptions& options) {
    if (nodes_per_axis < 8) throw std::invalid_argument("build_table needs at least 8 nodes per axis");
    if (!(lambda_max > 0.0)) throw std::invalid_argument("build_table needs lambda_max > 0");
    const std::size_t n = nodes_per_axis;
    auto coord = [&](std::size_t i) {
        const double u = static_cast<double>(i) / static_cast<double>(n - 1);
        return lambda_max * u * u;
    };
    // F is symmetric in its arguments: integrate only i >= j >= k.
    std::vector<std::array<double, 3>> triples;
    std::vector<std::array<std::size_t, 3>> where;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            for (std::size_t k = 0; k <= j; ++k) {
                triples.push_back({coord(i), coord(j), coord(k)});
                where.push_back({i, j, k});
            }
    std::vector<double> unique(triples.size());
    if (options.parallel)
        kernels::omp::normalizer_values(triples, options.quadrature_nodes, unique);
    else
        kernels::serial::normalizer_values(triples, options.quadrature_nodes, unique);

    std::vector<double> values(n * n * n);
    for (std::size_t t = 0; t < where.size(); ++t) {
        std::array<std::size_t, 3> p = where[t];
        std::sort(p.begin(), p.end());
        do {
            values[(p[0] * n + p[1]) * n + p[2]] = unique[t];
        } while (std::next_permutation(p.begin(), p.end()));
    }
    return NormalizerTable(lambda_max, n, std::move(values),
                           "hopf-gauss-legendre nodes=" + std::to_string(options.quadrature_nodes));
}

const NormalizerTable& default_table() {
    static const NormalizerTable table = build_table(kDefaultLambdaMax, kDefaultTableNodes);
    return table;
}

TableReport check_table(const NormalizerTable& table, std::size_t spot_checks, std::uint64_t seed) {
    TableReport r;
    const std::size_t n = table.nodes();
    r.f_zero = table.value_at(0, 0, 0);
    r.f_zero_ok = std::fabs(r.f_zero - kSphereArea) < 1e-6;
    r.positive = std::all_of(table.values().begin(), table.values().end(),
                             [](double v) { return v > 0.0 && std::isfinite(v); });
    r.monotone = true;
    for (std::size_t i = 0; i < n && r.monotone; ++i)
        for (std::size_t j = 0; j < n && r.monotone; ++j)
            for (std::size_t k = 0; k + 1 < n; ++k) {
                if (table.value_at(i, j, k + 1) > table.value_at(i, j, k) ||
                    table.value_at(i, k + 1, j) > table.value_at(i, k, j) ||
                    table.value_at(k + 1, i, j) > table.value_at(k, i, j)) {
                    r.monotone = false;
                    break;
                }
            }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, table.lambda_max());
    for (std::size_t s = 0; s < spot_checks; ++s) {
        std::array<double, 3> l{unif(rng), unif(rng), unif(rng)};
        std::sort(l.begin(), l.end(), std::greater<>());
        const Vec4 lam{l[0], l[1], l[2], 0.0};
        const double exact = f_quadrature(lam, 128);
        r.max_interp_rel_error = std::max(r.max_interp_rel_error, std::fabs(table.f(lam) / exact - 1.0));
    }
    r.spot_checks = spot_checks;
    return r;
}

}  // namespace odfmix
