#include "odfmix/rjmcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "odfmix/errors.hpp"
#include "odfmix/sphere.hpp"

namespace odfmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogUniform = -std::log(kSphereArea);

// Quaternion unit k: right-multiplying v1 by k gives the frame's fourth column.
const UnitQuaternion kUnitK = UnitQuaternion::normalize(0, 0, 0, 1);
constexpr double kBirthSpread = 0.1;    // ACG minor-axis standard deviation
constexpr double kNearUniformMean = 0.5;

double reflect_unit(double x) {
    double r = std::fmod(x, 2.0);
    if (r < 0.0) r += 2.0;
    return r > 1.0 ? 2.0 - r : r;
}

double log_mix2(double a, double b) {
    const double mx = std::max(a, b);
    if (mx == kNegInf) return mx;
    return mx + std::log(std::exp(a - mx) + std::exp(b - mx));
}

std::array<double, 3> ordered_exponential(double mean, Rng& rng) {
    std::exponential_distribution<double> e(1.0 / mean);
    std::array<double, 3> l{e(rng), e(rng), e(rng)};
    std::sort(l.begin(), l.end(), std::greater<>());
    return l;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL));
}

void SamplerConfig::validate() const {
    std::vector<std::string> bad;
    if (!(burn_in < n_iters || (n_iters == 0 && burn_in == 0))) bad.push_back("burn_in must be below n_iters");
    if (thin < 1) bad.push_back("thin must be at least 1");
    if (!(b > 0.0) || !std::isfinite(b)) bad.push_back("b must be positive");
    if (!(c > 0.0) || !std::isfinite(c)) bad.push_back("c must be positive");
    if (!(d > 0.0) || !std::isfinite(d)) bad.push_back("d must be positive");
    if (adapt_window < 1) bad.push_back("adapt_window must be at least 1");
    if (!(target_rate > 0.0 && target_rate < 1.0)) bad.push_back("target_rate must lie in (0, 1)");
    if (max_retries < 1) bad.push_back("max_retries must be at least 1");
    if (!bad.empty()) {
        std::string msg = "invalid sampler configuration:";
        for (const auto& s : bad) msg += " " + s + ";";
        throw ContractViolation(msg);
    }
}

TransitionMatrix::TransitionMatrix(std::size_t M_max) : M_max_(M_max), p_(M_max * M_max, 0.0) {
    if (M_max < 1) throw ContractViolation("transition matrix needs M_max >= 1");
    auto set = [&](std::size_t i, std::size_t j, double v) { p_[(i - 1) * M_max + (j - 1)] = v; };
    if (M_max == 1) {
        set(1, 1, 1.0);
        return;
    }
    for (std::size_t i = 1; i <= M_max; ++i) {
        set(i, i, 0.7);
        if (i == 1)
            set(1, 2, 0.3);
        else if (i == M_max)
            set(i, i - 1, 0.3);
        else {
            set(i, i - 1, 0.15);
            set(i, i + 1, 0.15);
        }
    }
}

double TransitionMatrix::at(std::size_t from, std::size_t to) const {
    if (from < 1 || from > M_max_ || to < 1 || to > M_max_) return 0.0;
    return p_[(from - 1) * M_max_ + (to - 1)];
}

std::size_t TransitionMatrix::propose(std::size_t from, Rng& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    double acc = 0.0;
    for (std::size_t to = 1; to <= M_max_; ++to) {
        acc += at(from, to);
        if (u < acc) return to;
    }
    return from;
}

TransitionMatrix default_transition_matrix(std::size_t M_max) { return TransitionMatrix(M_max); }

DeathResult death_map(const MixtureState& state) {
    if (state.M() < 2 || state.free_count() < 1)
        throw ContractViolation("death_map needs at least two components, one of them free");
    std::size_t r = state.M();
    for (std::size_t m = 0; m < state.M(); ++m)
        if (state.is_free(m) && (r == state.M() || state.alpha[m] < state.alpha[r])) r = m;
    const double w = state.alpha[r];
    MixtureState out;
    out.forced_uniform = state.forced_uniform;
    const double share = w / static_cast<double>(state.M() - 1);
    for (std::size_t m = 0; m < state.M(); ++m) {
        if (m == r) continue;
        out.alpha.push_back(std::min(state.alpha[m] + share, 1.0));
        out.components.push_back(state.components[m]);
    }
    return {std::move(out), r};
}

MixtureState birth_map(const MixtureState& state, const ModalOrientations& modes, double u) {
    const std::size_t M = state.M();
    if (M >= modes.g_bar.size()) throw ContractViolation("birth_map called at M = M_max");
    std::vector<double> s(M);
    std::partial_sum(state.alpha.begin(), state.alpha.end(), s.begin());
    s.push_back(u);
    std::sort(s.begin(), s.end());
    std::vector<double> w(M + 1);
    w[0] = s[0];
    for (std::size_t i = 1; i <= M; ++i) w[i] = s[i] - s[i - 1];
    // the smallest weight moves to the new (last) slot, the rest keep order
    const auto smallest = std::min_element(w.begin(), w.end()) - w.begin();
    std::rotate(w.begin() + smallest, w.begin() + smallest + 1, w.end());

    const BinghamComponent born({0, 0, 0, 0}, modes.g_bar[M]);
    MixtureState out;
    out.forced_uniform = state.forced_uniform;
    if (!state.forced_uniform) {
        out.alpha = w;
        out.components = state.components;
        out.components.push_back(born);
        return out;
    }
    // keep the forced uniform component last
    for (std::size_t m = 0; m + 1 < M; ++m) {
        out.alpha.push_back(w[m]);
        out.components.push_back(state.components[m]);
    }
    out.alpha.push_back(w[M]);
    out.components.push_back(born);
    out.alpha.push_back(w[M - 1]);
    out.components.push_back(state.components.back());
    return out;
}

double birth_weight_bound(const MixtureState& state) {
    const double M = static_cast<double>(state.M());
    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < state.M(); ++m)
        bound = std::min(bound, state.is_free(m) ? M / (M + 1.0) * state.alpha[m] : M * state.alpha[m]);
    return std::min(bound, 1.0);
}

MixtureState birth_insert(const MixtureState& state, double w, const BinghamComponent& comp) {
    const double share = w / static_cast<double>(state.M());
    MixtureState out;
    out.forced_uniform = state.forced_uniform;
    const std::size_t pos = state.free_count();
    for (std::size_t m = 0; m <= state.M(); ++m) {
        if (m == pos) {
            out.alpha.push_back(w);
            out.components.push_back(comp);
        }
        if (m < state.M()) {
            out.alpha.push_back(std::max(state.alpha[m] - share, 0.0));
            out.components.push_back(state.components[m]);
        }
    }
    return out;
}

ComponentProposal::ComponentProposal(const ModalOrientations& modes, const Hyperparams& h) : mu_(h.mu) {
    for (const auto& g : modes.g_bar) centers_.push_back(g * kUnitK);
    if (centers_.empty()) centers_.push_back(kUnitK);
}

BinghamComponent ComponentProposal::sample(Rng& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (unif(rng) < 0.5) {
        const auto l = ordered_exponential(mu_, rng);
        return BinghamComponent({l[0], l[1], l[2], 0.0}, sample_uniform(rng));
    }
    const auto l = ordered_exponential(kNearUniformMean, rng);
    std::uniform_int_distribution<std::size_t> pick(0, centers_.size() - 1);
    const Vec4& c = centers_[pick(rng)].vec();
    std::normal_distribution<double> normal(0.0, 1.0);
    for (;;) {
        Vec4 z{normal(rng), normal(rng), normal(rng), normal(rng)};
        const double along = dot(z, c);
        Vec4 y;
        for (int i = 0; i < 4; ++i) y[i] = along * c[i] + kBirthSpread * (z[i] - along * c[i]);
        if (dot(y, y) > 1e-300) return BinghamComponent({l[0], l[1], l[2], 0.0}, UnitQuaternion::normalize(y));
    }
}

double ComponentProposal::log_density(const BinghamComponent& comp) const {
    const Vec4& l = comp.lambda();
    const Vec4& x = comp.V()[0];
    const double s2 = kBirthSpread * kBirthSpread;
    // ACG with covariance c c^T + s2 (I - c c^T), averaged over the centers
    double acg = 0.0;
    for (const auto& c : centers_) {
        const double t = dot(x, c.vec());
        const double q = t * t + (1.0 - t * t) / s2;
        acg += 1.0 / (kSphereArea * s2 * kBirthSpread * q * q);
    }
    acg /= static_cast<double>(centers_.size());
    const double from_prior = std::log(0.5) + log_ordered_exponential(l, mu_) + kLogUniform;
    const double local = std::log(0.5) + log_ordered_exponential(l, kNearUniformMean) + std::log(acg);
    return log_mix2(from_prior, local);
}

double dimension_log_acceptance(double log_post_cur, double log_post_can, const TransitionMatrix& P,
                                std::size_t M_cur, std::size_t M_can, double temperature,
                                double log_proposal_correction) {
    return temperature * (log_post_can - log_post_cur) + std::log(P.at(M_can, M_cur)) -
           std::log(P.at(M_cur, M_can)) + log_proposal_correction;
}

double accept_dimension(const Dataset& data, const MixtureState& cur, const MixtureState& can,
                        const Hyperparams& h, const NormalizerTable& table, const TransitionMatrix& P) {
    const double la = dimension_log_acceptance(log_posterior(data, cur, h, table),
                                               log_posterior(data, can, h, table), P, cur.M(), can.M(), 1.0);
    return la >= 0.0 ? 1.0 : std::exp(la);
}

double accept_within(const Dataset& data, const MixtureState& cur, const MixtureState& can,
                     const Hyperparams& h, const NormalizerTable& table) {
    if (cur.M() != can.M()) throw ContractViolation("accept_within needs equal dimensions");
    const double la = log_posterior(data, can, h, table) - log_posterior(data, cur, h, table);
    return la >= 0.0 ? 1.0 : std::exp(la);
}

std::optional<std::vector<double>> propose_weights_literal(const std::vector<double>& alpha, double b,
                                                           WeightsNormalization norm, Rng& rng,
                                                           std::size_t max_retries) {
    const std::size_t M = alpha.size();
    if (M == 1) return std::vector<double>{1.0};
    std::vector<double> cum(M);
    std::partial_sum(alpha.begin(), alpha.end(), cum.begin());
    std::normal_distribution<double> normal(0.0, std::sqrt(b));
    std::vector<double> s(M), out(M);
    for (std::size_t attempt = 0; attempt < max_retries; ++attempt) {
        for (std::size_t i = 0; i < M; ++i) s[i] = cum[i] + normal(rng);
        const double scale = norm == WeightsNormalization::Cumulative
                                 ? s[M - 1]
                                 : std::accumulate(s.begin(), s.end(), 0.0);
        if (!(std::fabs(scale) > 0.0)) continue;
        for (double& v : s) v /= scale;
        out[0] = s[0];
        for (std::size_t i = 1; i < M; ++i) out[i] = s[i] - s[i - 1];
        if (*std::min_element(out.begin(), out.end()) < 0.0) continue;
        const double total = std::accumulate(out.begin(), out.end(), 0.0);
        if (!(total > 0.0)) continue;
        for (double& v : out) v /= total;
        return out;
    }
    return std::nullopt;
}

std::vector<double> propose_weights_reflected(const std::vector<double>& alpha, double b, Rng& rng) {
    const std::size_t M = alpha.size();
    if (M == 1) return {1.0};
    std::normal_distribution<double> normal(0.0, std::sqrt(b));
    std::vector<double> cum(M - 1);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < M; ++i) {
        acc += alpha[i];
        cum[i] = reflect_unit(acc + normal(rng));
    }
    std::sort(cum.begin(), cum.end());
    std::vector<double> out(M);
    double prev = 0.0;
    for (std::size_t i = 0; i + 1 < M; ++i) {
        out[i] = cum[i] - prev;
        prev = cum[i];
    }
    out[M - 1] = 1.0 - prev;
    return out;
}

UnitQuaternion random_rotation_near_identity(double d, Rng& rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(d));
    for (;;) {
        const Vec4 v{1.0 + normal(rng), normal(rng), normal(rng), normal(rng)};
        if (dot(v, v) > 1e-300) return UnitQuaternion::normalize(v);
    }
}

BinghamComponent propose_orientation(const BinghamComponent& comp, double d, Rng& rng) {
    return BinghamComponent(comp.lambda(), comp.v1() * random_rotation_near_identity(d, rng));
}

std::optional<BinghamComponent> propose_scales_literal(const BinghamComponent& comp, double c, Rng& rng,
                                                       std::size_t max_retries) {
    std::normal_distribution<double> normal(0.0, std::sqrt(c));
    const Vec4& l = comp.lambda();
    for (std::size_t attempt = 0; attempt < max_retries; ++attempt) {
        const Vec4 p{l[0] + normal(rng), l[1] + normal(rng), l[2] + normal(rng), 0.0};
        if (p[0] >= p[1] && p[1] >= p[2] && p[2] >= 0.0) return BinghamComponent(p, comp.V());
    }
    return std::nullopt;
}

BinghamComponent propose_scales_reflected(const BinghamComponent& comp, double c, Rng& rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(c));
    const Vec4& l = comp.lambda();
    std::array<double, 3> p{std::fabs(l[0] + normal(rng)), std::fabs(l[1] + normal(rng)),
                            std::fabs(l[2] + normal(rng))};
    std::sort(p.begin(), p.end(), std::greater<>());
    return BinghamComponent({p[0], p[1], p[2], 0.0}, comp.V());
}

// ---------------------------------------------------------------------------

Chain::Chain(const LikelihoodEvaluator* likelihood, const Hyperparams& h, const SamplerConfig& config,
             const ModalOrientations& modes, double temperature, Rng rng)
    : lik_(config.likelihood ? likelihood : nullptr), h_(h), cfg_(config), modes_(modes),
      P_(h.M_max), birth_proposal_(modes, h), temperature_(temperature), rng_(std::move(rng)) {
    if (config.likelihood && likelihood == nullptr)
        throw ContractViolation("chain needs a likelihood evaluator unless the likelihood is disabled");
    if (modes_.g_bar.empty()) throw ContractViolation("chain needs at least one modal orientation");
    if (!(temperature > 0.0 && temperature <= 1.0)) throw ContractViolation("temperature must lie in (0, 1]");
    state_ = MixtureState::uniform(modes_.g_bar[0], cfg_.forced_uniform);
    cols_.resize(1);
    column(state_.components[0], cols_[0]);
    log_lik_ = mixture_loglik(cols_, state_.alpha);
    log_prior_ = log_prior(state_, h_);
    tuning_.b = cfg_.b;
    tuning_.c.assign(h_.M_max, cfg_.c);
    tuning_.d.assign(h_.M_max, cfg_.d);
    win_c_prop_.assign(h_.M_max, 0);
    win_c_acc_.assign(h_.M_max, 0);
    win_d_prop_.assign(h_.M_max, 0);
    win_d_acc_.assign(h_.M_max, 0);
}

void Chain::column(const BinghamComponent& comp, std::vector<double>& out) const {
    if (lik_) lik_->column(comp, out);
    else out.clear();
}

double Chain::mixture_loglik(const std::vector<std::vector<double>>& cols,
                             const std::vector<double>& alpha) const {
    if (!lik_) return 0.0;
    std::vector<const std::vector<double>*> ptrs;
    ptrs.reserve(cols.size());
    for (const auto& c : cols) ptrs.push_back(&c);
    return lik_->combine(ptrs, alpha);
}

bool Chain::in_range(const BinghamComponent& comp) const {
    const double lmax = lik_ ? lik_->table().lambda_max() : kDefaultLambdaMax;
    return comp.lambda()[0] <= lmax;
}

bool Chain::accept(double log_ratio) {
    const double u = unif_(rng_);
    return std::log(u) < log_ratio;
}

double Chain::recompute_log_posterior() const {
    const double ll = lik_ ? lik_->loglik(state_) : 0.0;
    return ll + log_prior(state_, h_);
}

void Chain::swap_state(Chain& other) {
    std::swap(state_, other.state_);
    std::swap(cols_, other.cols_);
    std::swap(log_lik_, other.log_lik_);
    std::swap(log_prior_, other.log_prior_);
}

MoveRecord Chain::step() {
    ++iter_;
    MoveRecord rec = cfg_.moves == MoveSet::Corrected ? step_corrected() : step_literal();
    if (adapting_ && iter_ % cfg_.adapt_window == 0) adapt();
    return rec;
}

bool Chain::try_birth_corrected() {
    ++counts_.births;
    const std::size_t M = state_.M();
    const double w_max = birth_weight_bound(state_);
    const double w = w_max * unif_(rng_);
    const BinghamComponent comp = birth_proposal_.sample(rng_);
    if (!(w_max > 0.0) || !in_range(comp)) return false;

    MixtureState can = birth_insert(state_, w, comp);
    const std::size_t pos = state_.free_count();
    std::vector<std::vector<double>> cols = cols_;
    std::vector<double> fresh;
    column(comp, fresh);
    cols.insert(cols.begin() + static_cast<std::ptrdiff_t>(pos), std::move(fresh));
    const double ll = mixture_loglik(cols, can.alpha);
    const double lp = log_prior(can, h_);
    const double correction = std::log(static_cast<double>(can.free_count())) + std::log(w_max) -
                              birth_proposal_.log_density(comp);
    const double la = dimension_log_acceptance(log_lik_ + log_prior_, ll + lp, P_, M, M + 1, temperature_,
                                               correction);
    if (!accept(la)) return false;
    state_ = std::move(can);
    cols_ = std::move(cols);
    log_lik_ = ll;
    log_prior_ = lp;
    ++counts_.births_accepted;
    return true;
}

bool Chain::try_death_corrected() {
    ++counts_.deaths;
    const std::size_t M = state_.M();
    DeathResult dr = death_map(state_);
    std::vector<std::vector<double>> cols = cols_;
    if (!cols.empty()) cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(dr.removed));
    const double ll = mixture_loglik(cols, dr.state.alpha);
    const double lp = log_prior(dr.state, h_);
    const double correction = -std::log(static_cast<double>(state_.free_count())) -
                              std::log(birth_weight_bound(dr.state)) +
                              birth_proposal_.log_density(state_.components[dr.removed]);
    const double la = dimension_log_acceptance(log_lik_ + log_prior_, ll + lp, P_, M, M - 1, temperature_,
                                               correction);
    if (!accept(la)) return false;
    state_ = std::move(dr.state);
    cols_ = std::move(cols);
    log_lik_ = ll;
    log_prior_ = lp;
    ++counts_.deaths_accepted;
    return true;
}

bool Chain::try_dimension_literal(std::size_t M_can) {
    const std::size_t M = state_.M();
    MixtureState can;
    std::vector<std::vector<double>> cols;
    if (M_can < M) {
        ++counts_.deaths;
        DeathResult dr = death_map(state_);
        can = std::move(dr.state);
        cols = cols_;
        if (!cols.empty()) cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(dr.removed));
    } else {
        ++counts_.births;
        can = birth_map(state_, modes_, unif_(rng_));
        cols.resize(can.M());
        for (std::size_t m = 0; m < can.M(); ++m) column(can.components[m], cols[m]);
    }
    const double ll = mixture_loglik(cols, can.alpha);
    const double lp = log_prior(can, h_);
    const double la = dimension_log_acceptance(log_lik_ + log_prior_, ll + lp, P_, M, M_can, temperature_);
    if (!accept(la)) return false;
    state_ = std::move(can);
    cols_ = std::move(cols);
    log_lik_ = ll;
    log_prior_ = lp;
    ++(M_can < M ? counts_.deaths_accepted : counts_.births_accepted);
    return true;
}

MoveRecord Chain::step_corrected() {
    MoveRecord rec;
    const std::size_t M = state_.M();
    const std::size_t M_can = P_.propose(M, rng_);
    if (M_can == M + 1) {
        rec.dimension = 1;
        rec.dimension_accepted = try_birth_corrected();
    } else if (M_can + 1 == M) {
        rec.dimension = -1;
        rec.dimension_accepted = try_death_corrected();
    }

    // weights
    if (state_.M() >= 2) {
        ++counts_.weights;
        ++win_w_prop_;
        std::vector<double> alpha = propose_weights_reflected(state_.alpha, tuning_.b, rng_);
        MixtureState can = state_;
        can.alpha = alpha;
        const double ll = mixture_loglik(cols_, alpha);
        const double lp = log_prior(can, h_);
        if (accept(temperature_ * (ll + lp - log_lik_ - log_prior_))) {
            state_.alpha = std::move(alpha);
            log_lik_ = ll;
            log_prior_ = lp;
            rec.weights_accepted = true;
            ++counts_.weights_accepted;
            ++win_w_acc_;
        }
    }

    std::vector<double> fresh;
    for (std::size_t m = 0; m < state_.M(); ++m) {
        if (!state_.is_free(m)) continue;
        // orientation
        {
            ++counts_.orientations;
            ++win_d_prop_[m];
            const BinghamComponent comp = propose_orientation(state_.components[m], tuning_.d[m], rng_);
            column(comp, fresh);
            std::swap(cols_[m], fresh);
            const double ll = lik_ ? mixture_loglik(cols_, state_.alpha) : 0.0;
            if (accept(temperature_ * (ll - log_lik_))) {
                state_.components[m] = comp;
                log_lik_ = ll;
                ++rec.orientation_accepted;
                ++counts_.orientations_accepted;
                ++win_d_acc_[m];
            } else {
                std::swap(cols_[m], fresh);
            }
        }
        // scales
        {
            ++counts_.scales;
            ++win_c_prop_[m];
            const BinghamComponent comp = propose_scales_reflected(state_.components[m], tuning_.c[m], rng_);
            if (!in_range(comp)) continue;
            MixtureState can = state_;
            can.components[m] = comp;
            const double lp = log_prior(can, h_);
            column(comp, fresh);
            std::swap(cols_[m], fresh);
            const double ll = lik_ ? mixture_loglik(cols_, state_.alpha) : 0.0;
            if (accept(temperature_ * (ll + lp - log_lik_ - log_prior_))) {
                state_.components[m] = comp;
                log_lik_ = ll;
                log_prior_ = lp;
                ++rec.scales_accepted;
                ++counts_.scales_accepted;
                ++win_c_acc_[m];
            } else {
                std::swap(cols_[m], fresh);
            }
        }
    }
    return rec;
}

MoveRecord Chain::step_literal() {
    MoveRecord rec;
    const std::size_t M = state_.M();
    const std::size_t M_can = P_.propose(M, rng_);
    if (M_can != M) {
        rec.dimension = M_can > M ? 1 : -1;
        rec.dimension_accepted = try_dimension_literal(M_can);
    }

    // one joint proposal of weights, orientations and scales
    ++win_w_prop_;
    ++counts_.weights;
    bool exhausted = false;
    MixtureState can = state_;
    if (auto a = propose_weights_literal(state_.alpha, tuning_.b, cfg_.weights_normalization, rng_,
                                         cfg_.max_retries))
        can.alpha = std::move(*a);
    else
        exhausted = true;
    for (std::size_t m = 0; m < can.M(); ++m) {
        if (!can.is_free(m)) continue;
        const BinghamComponent rotated = propose_orientation(can.components[m], tuning_.d[m], rng_);
        if (auto scaled = propose_scales_literal(rotated, tuning_.c[m], rng_, cfg_.max_retries))
            can.components[m] = *scaled;
        else
            exhausted = true;
    }
    bool ok = !exhausted;
    for (const auto& comp : can.components) ok = ok && in_range(comp);
    if (ok) {
        std::vector<std::vector<double>> cols(can.M());
        for (std::size_t m = 0; m < can.M(); ++m) {
            if (can.is_free(m)) column(can.components[m], cols[m]);
            else cols[m] = cols_[m];
        }
        const double ll = mixture_loglik(cols, can.alpha);
        const double lp = log_prior(can, h_);
        if (accept(temperature_ * (ll + lp - log_lik_ - log_prior_))) {
            state_ = std::move(can);
            cols_ = std::move(cols);
            log_lik_ = ll;
            log_prior_ = lp;
            rec.weights_accepted = true;
            rec.orientation_accepted = rec.scales_accepted = state_.free_count();
            ++counts_.weights_accepted;
            ++win_w_acc_;
        }
    }
    return rec;
}

void Chain::adapt() {
    auto factor = [&](std::size_t acc, std::size_t prop) {
        const double rate = static_cast<double>(acc) / static_cast<double>(prop);
        return std::exp(cfg_.adapt_gain * (rate - cfg_.target_rate));
    };
    if (cfg_.moves == MoveSet::Literal) {
        if (win_w_prop_ > 0) {
            const double f = factor(win_w_acc_, win_w_prop_);
            tuning_.b *= f;
            for (double& c : tuning_.c) c *= f;
            for (double& d : tuning_.d) d *= f;
        }
    } else {
        if (win_w_prop_ > 0) tuning_.b *= factor(win_w_acc_, win_w_prop_);
        for (std::size_t m = 0; m < h_.M_max; ++m) {
            if (win_c_prop_[m] > 0) tuning_.c[m] *= factor(win_c_acc_[m], win_c_prop_[m]);
            if (win_d_prop_[m] > 0) tuning_.d[m] *= factor(win_d_acc_[m], win_d_prop_[m]);
        }
    }
    // keep the weight step meaningful on the unit simplex
    tuning_.b = std::min(tuning_.b, 1.0);
    for (double& d : tuning_.d) d = std::min(d, 100.0);
    win_w_prop_ = win_w_acc_ = 0;
    std::fill(win_c_prop_.begin(), win_c_prop_.end(), 0);
    std::fill(win_c_acc_.begin(), win_c_acc_.end(), 0);
    std::fill(win_d_prop_.begin(), win_d_prop_.end(), 0);
    std::fill(win_d_acc_.begin(), win_d_acc_.end(), 0);
    history_.push_back({iter_, tuning_});
}

ChainTrace run(const Dataset& data, const Hyperparams& h, const SamplerConfig& config,
               const NormalizerTable& table, const SaveCallback& on_save) {
    config.validate();
    h.validate();
    const ModalOrientations modes = modal_orientations(data, h.M_max);
    std::optional<LikelihoodEvaluator> lik;
    if (config.likelihood) lik.emplace(data, table, config.parallel);
    Chain chain(lik ? &*lik : nullptr, h, config, modes, 1.0, Rng(derive_seed(config.seed, 0)));
    chain.set_adapting(config.adapt && config.burn_in > 0);

    ChainTrace trace;
    trace.initial = chain.state();
    for (std::size_t it = 1; it <= config.n_iters; ++it) {
        const MoveRecord mv = chain.step();
        if (it == config.burn_in) chain.set_adapting(false);
        if (it > config.burn_in && (it - config.burn_in) % config.thin == 0) {
            chain.state().validate(h.M_max);
            TraceRecord rec{it, chain.state(), chain.log_posterior(), mv};
            if (on_save) on_save(rec);
            trace.records.push_back(std::move(rec));
        }
    }
    trace.adaptation = chain.adaptation_history();
    trace.final_tuning = chain.tuning();
    return trace;
}

}  // namespace odfmix
