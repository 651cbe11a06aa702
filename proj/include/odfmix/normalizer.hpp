#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "odfmix/quaternion.hpp"
#include "odfmix/sphere.hpp"

namespace odfmix {

/// Largest scale the default table covers.
inline constexpr double kDefaultLambdaMax = 100.0;
inline constexpr std::size_t kDefaultTableNodes = 32;

enum class OracleMethod { Quadrature, QuasiMonteCarlo };

struct OracleBudget {
    std::size_t quadrature_nodes = 128;  ///< per Hopf coordinate
    std::size_t qmc_points = 1 << 15;    ///< per replicate
    std::size_t qmc_replicates = 32;
    std::uint64_t seed = 7;
    double lambda_max = kDefaultLambdaMax;
};

/// F(lambda) = integral over S^3 of exp(-sum_d lambda_d x_d^2), so F(0) = 2 pi^2.
/// Entries must lie in [0, budget.lambda_max] (RangeError otherwise); they
/// need not be ordered. Quadrature reports |Q(n) - Q(n/2)| as its error.
Estimate f_oracle(const Vec4& lambda, const OracleBudget& budget = {},
                  OracleMethod method = OracleMethod::Quadrature);

/// Quadrature value only, at a fixed node count (used by the table build).
double f_quadrature(const Vec4& lambda, std::size_t nodes);

/// Tensor grid of F over [0, lambda_max]^3 (lambda4 = 0) at nodes
/// lambda = lambda_max * u^2 with u equally spaced on [0, 1]. Lookups
/// interpolate log F trilinearly in u.
class NormalizerTable {
public:
    NormalizerTable() = default;
    NormalizerTable(double lambda_max, std::size_t nodes, std::vector<double> values,
                    std::string provenance = {});

    double lambda_max() const { return lambda_max_; }
    std::size_t nodes() const { return nodes_; }
    const std::vector<double>& values() const { return values_; }
    const std::string& provenance() const { return provenance_; }

    double node_coordinate(std::size_t i) const;
    double value_at(std::size_t i, std::size_t j, std::size_t k) const {
        return values_[(i * nodes_ + j) * nodes_ + k];
    }

    /// log F(lambda). Entries outside [0, lambda_max] raise RangeError naming
    /// the coordinate. A nonzero lambda4 is handled with the shift identity.
    double log_f(const Vec4& lambda) const;
    double f(const Vec4& lambda) const;

    void save(std::ostream& os) const;
    void save(const std::filesystem::path& path) const;
    static NormalizerTable load(std::istream& is);
    static NormalizerTable load(const std::filesystem::path& path);

    bool operator==(const NormalizerTable& o) const {
        return lambda_max_ == o.lambda_max_ && nodes_ == o.nodes_ && values_ == o.values_;
    }

private:
    double lambda_max_ = 0.0;
    std::size_t nodes_ = 0;
    std::vector<double> values_;
    std::vector<double> log_values_;
    std::string provenance_;
};

struct TableBuildOptions {
    std::size_t quadrature_nodes = 96;
    bool parallel = true;
};

/// Requires nodes_per_axis >= 8.
NormalizerTable build_table(double lambda_max = kDefaultLambdaMax,
                            std::size_t nodes_per_axis = kDefaultTableNodes,
                            const TableBuildOptions& options = {});

/// Process-wide default table (lambda_max 100, 32 nodes), built on first use.
const NormalizerTable& default_table();

struct TableReport {
    double f_zero = 0.0;
    bool f_zero_ok = false;
    bool positive = false;
    bool monotone = false;
    double max_interp_rel_error = 0.0;  ///< over the spot checks
    std::size_t spot_checks = 0;
    bool ok() const { return f_zero_ok && positive && monotone; }
};

/// Checks F(0) = 2 pi^2 (1e-6), positivity and monotonicity; optionally
/// compares `spot_checks` random ordered points against the oracle.
TableReport check_table(const NormalizerTable& table, std::size_t spot_checks = 0,
                        std::uint64_t seed = 11);

}  // namespace odfmix
