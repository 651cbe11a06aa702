#include "odfmix/report.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "json_state.hpp"
#include "odfmix/errors.hpp"
#include "odfmix/io.hpp"
#include "odfmix/predict.hpp"

namespace odfmix {

using detail::json;

std::vector<std::size_t> rank_by_concentration(const MixtureState& s) {
    std::vector<std::size_t> idx(s.M());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return s.components[a].lambda()[0] > s.components[b].lambda()[0];
    });
    return idx;
}

PosteriorSummary summarize(const ChainTrace& trace, std::size_t M_max, const SymmetryGroup& qc,
                           const SymmetryGroup& qs) {
    if (trace.records.empty()) throw ContractViolation("posterior summary needs a non-empty trace");
    PosteriorSummary s;
    s.records = trace.records.size();
    std::size_t top = M_max;
    for (const auto& r : trace.records) top = std::max(top, r.state.M());
    std::vector<std::size_t> counts(top, 0);
    for (const auto& r : trace.records) ++counts[r.state.M() - 1];
    s.p_M.resize(top);
    for (std::size_t m = 0; m < top; ++m) s.p_M[m] = static_cast<double>(counts[m]) / static_cast<double>(s.records);
    s.modal_M = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin()) + 1;

    const std::size_t M = s.modal_M;
    s.mean_alpha.assign(M, 0.0);
    s.mean_lambda.assign(M, Vec4{});
    std::vector<Eigen::Matrix4d> scatter(M, Eigen::Matrix4d::Zero());
    std::vector<std::optional<UnitQuaternion>> ref(M);
    std::size_t n = 0;
    for (const auto& r : trace.records) {
        if (r.state.M() != M) continue;
        ++n;
        const auto order = rank_by_concentration(r.state);
        for (std::size_t k = 0; k < M; ++k) {
            const auto& comp = r.state.components[order[k]];
            s.mean_alpha[k] += r.state.alpha[order[k]];
            for (int d = 0; d < 4; ++d) s.mean_lambda[k][d] += comp.lambda()[d];
            UnitQuaternion v = comp.v1();
            if (!ref[k]) {
                ref[k] = v;
            } else {
                double best = -1.0;
                UnitQuaternion pick = v;
                for (const auto& a : qc.elements())
                    for (const auto& b : qs.elements()) {
                        const auto cand = a * v * b;
                        const double c = std::fabs(dot(cand, *ref[k]));
                        if (c > best) best = c, pick = cand;
                    }
                v = pick;
            }
            const Eigen::Vector4d x(v.w(), v.x(), v.y(), v.z());
            scatter[k] += x * x.transpose();
        }
    }
    for (std::size_t k = 0; k < M; ++k) {
        s.mean_alpha[k] /= static_cast<double>(n);
        for (int d = 0; d < 4; ++d) s.mean_lambda[k][d] /= static_cast<double>(n);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(scatter[k]);
        const Eigen::Vector4d e = es.eigenvectors().col(3);
        s.mean_v1.push_back(UnitQuaternion::normalize(e(0), e(1), e(2), e(3)));
    }
    s.map = map_estimate(trace);
    return s;
}

std::string summary_json(const PosteriorSummary& s) {
    json pm = json::object();
    for (std::size_t m = 0; m < s.p_M.size(); ++m) pm[std::to_string(m + 1)] = s.p_M[m];
    json lam = json::array(), v1 = json::array();
    for (const auto& l : s.mean_lambda) lam.push_back(detail::vec_json(l));
    for (const auto& v : s.mean_v1) v1.push_back(detail::vec_json(v.vec()));
    const json j{{"records", s.records},
                 {"p_M", pm},
                 {"modal_M", s.modal_M},
                 {"conditional_on_modal_M",
                  {{"ranking", "decreasing lambda1"}, {"mean_alpha", s.mean_alpha}, {"mean_lambda", lam}, {"mean_v1", v1}}},
                 {"map",
                  {{"iter", s.map.iter}, {"log_posterior", s.map.log_posterior}, {"state", detail::state_json(s.map.state)}}}};
    return j.dump(2) + "\n";
}

namespace {

void histogram_csv(const std::filesystem::path& path, const std::vector<std::vector<double>>& per_rank, std::size_t bins,
                   double lo, double hi) {
    std::string out = "rank,bin_low,bin_high,count\n";
    const double w = (hi - lo) / static_cast<double>(bins);
    for (std::size_t k = 0; k < per_rank.size(); ++k) {
        std::vector<std::size_t> c(bins, 0);
        for (double x : per_rank[k]) {
            auto b = static_cast<std::size_t>(std::max(0.0, std::floor((x - lo) / w)));
            ++c[std::min(b, bins - 1)];
        }
        for (std::size_t b = 0; b < bins; ++b)
            out += std::to_string(k + 1) + "," + format_double(lo + b * w) + "," + format_double(lo + (b + 1) * w) +
                   "," + std::to_string(c[b]) + "\n";
    }
    write_file(path, out);
}

}  // namespace

std::vector<std::string> write_report(const std::filesystem::path& dir, const ChainTrace& trace,
                                      const PosteriorSummary& s, std::size_t bins) {
    write_file(dir / "report.json", summary_json(s));
    std::string pm = "M,probability\n";
    for (std::size_t m = 0; m < s.p_M.size(); ++m) pm += std::to_string(m + 1) + "," + format_double(s.p_M[m]) + "\n";
    write_file(dir / "posterior_M.csv", pm);

    std::vector<std::vector<double>> alpha(s.modal_M), lambda1(s.modal_M);
    double lmax = 0.0;
    for (const auto& r : trace.records) {
        if (r.state.M() != s.modal_M) continue;
        const auto order = rank_by_concentration(r.state);
        for (std::size_t k = 0; k < s.modal_M; ++k) {
            alpha[k].push_back(r.state.alpha[order[k]]);
            lambda1[k].push_back(r.state.components[order[k]].lambda()[0]);
            lmax = std::max(lmax, lambda1[k].back());
        }
    }
    histogram_csv(dir / "hist_alpha.csv", alpha, bins, 0.0, 1.0);
    histogram_csv(dir / "hist_lambda1.csv", lambda1, bins, 0.0, lmax > 0.0 ? lmax : 1.0);
    return {"report.json", "posterior_M.csv", "hist_alpha.csv", "hist_lambda1.csv"};
}

}  // namespace odfmix
