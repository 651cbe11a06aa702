#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "odfmix/rjmcmc.hpp"

namespace odfmix {

/// Monte Carlo summaries over the saved states. Within a state, components
/// are ranked by decreasing lambda1 (most concentrated first), so slot k of
/// the conditional means is the k-th most concentrated component.
struct PosteriorSummary {
    std::size_t records = 0;
    std::vector<double> p_M;  ///< entry M - 1: P(M | g)
    std::size_t modal_M = 0;
    std::vector<double> mean_alpha;  ///< E[alpha | g, M = modal_M] by rank
    std::vector<Vec4> mean_lambda;
    /// Axial mean of v1 per rank, each draw first moved to the symmetric copy
    /// closest to the first draw.
    std::vector<UnitQuaternion> mean_v1;
    TraceRecord map;
};

/// Throws ContractViolation for an empty trace.
PosteriorSummary summarize(const ChainTrace& trace, std::size_t M_max, const SymmetryGroup& qc,
                           const SymmetryGroup& qs);

/// Components of a state reordered by decreasing lambda1 (stable).
std::vector<std::size_t> rank_by_concentration(const MixtureState& s);

std::string summary_json(const PosteriorSummary& s);

/// report.json, posterior_M.csv, and per-rank histograms of alpha and lambda1
/// at the modal M (hist_alpha.csv, hist_lambda1.csv). Returns the file names.
std::vector<std::string> write_report(const std::filesystem::path& dir, const ChainTrace& trace,
                                      const PosteriorSummary& s, std::size_t bins = 20);

}  // namespace odfmix
