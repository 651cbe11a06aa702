// odfmix command-line interface.
//
// Exit codes: 0 success, 1 a check failed, 2 invalid configuration or
// arguments, 3 unreadable or malformed input / unwritable output, 4 value out
// of the supported range, 5 internal error, 6 input violates a precondition
// (e.g. fewer observations than components).

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "odfmix/config.hpp"
#include "odfmix/errors.hpp"
#include "odfmix/grid.hpp"
#include "odfmix/io.hpp"
#include "odfmix/kde.hpp"
#include "odfmix/predict.hpp"
#include "odfmix/report.hpp"
#include "odfmix/synthetic.hpp"
#include "odfmix/tempering.hpp"

namespace fs = std::filesystem;
using namespace odfmix;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kConfig = 2, kIo = 3, kRange = 4, kInternal = 5, kPrecondition = 6 };

constexpr std::size_t kPoleSamples = 10000;

// Flags shared by every command; each overrides the config file.
struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> iters, burnin, mmax;
    std::string temps;
    bool force_uniform = false;
    std::string swap_rule, weights_normalization, out, data, format, crystal, specimen, table;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON run config")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "Random seed");
    cmd->add_option("--iters", o.iters, "Sampler iterations");
    cmd->add_option("--burnin", o.burnin, "Burn-in iterations");
    cmd->add_option("--mmax", o.mmax, "Maximum number of components");
    cmd->add_option("--temps", o.temps, "Comma-separated temperature ladder, starting at 1");
    cmd->add_flag("--force-uniform", o.force_uniform, "Keep a uniform component in every state");
    cmd->add_option("--swap-rule", o.swap_rule, "corrected | literal");
    cmd->add_option("--weights-normalization", o.weights_normalization, "cumulative | literal");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--data", o.data, "Orientation data file");
    cmd->add_option("--format", o.format, "quaternion-csv | euler-csv");
    cmd->add_option("--crystal", o.crystal, "Crystal symmetry (catalog name or file)");
    cmd->add_option("--specimen", o.specimen, "Specimen symmetry (catalog name or file)");
    cmd->add_option("--table", o.table, "Normalizer table file");
}

std::vector<double> parse_list(const std::string& s, std::vector<std::string>& problems, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size() && item.find_first_not_of(" ", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            problems.push_back(std::string(what) + ": '" + item + "' is not a number");
        }
    }
    return out;
}

using Adjust = std::function<void(RunConfig&, std::vector<std::string>&)>;

// Config file (or defaults) with the flags applied, validated for `cmd`.
// `adjust` applies command-specific flags and may add problems.
RunConfig effective_config(const Overrides& o, Command cmd, const Adjust& adjust = {}) {
    RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
    std::vector<std::string> problems;
    if (o.seed) c.seed = *o.seed;
    if (o.iters) c.sampler.n_iters = *o.iters;
    if (o.burnin) c.sampler.burn_in = *o.burnin;
    if (o.mmax) c.hyper.M_max = *o.mmax;
    if (!o.temps.empty()) c.ladder = parse_list(o.temps, problems, "--temps");
    if (o.force_uniform) c.sampler.forced_uniform = true;
    if (!o.swap_rule.empty()) {
        if (o.swap_rule == "corrected") c.swap_rule = SwapRule::Corrected;
        else if (o.swap_rule == "literal") c.swap_rule = SwapRule::Literal;
        else problems.push_back("--swap-rule: '" + o.swap_rule + "' is not corrected | literal");
    }
    if (!o.weights_normalization.empty()) {
        if (o.weights_normalization == "cumulative") c.sampler.weights_normalization = WeightsNormalization::Cumulative;
        else if (o.weights_normalization == "literal") c.sampler.weights_normalization = WeightsNormalization::Literal;
        else problems.push_back("--weights-normalization: '" + o.weights_normalization + "' is not cumulative | literal");
    }
    if (!o.out.empty()) c.out = o.out;
    if (!o.data.empty()) c.data = o.data;
    if (!o.format.empty()) {
        try {
            c.format = parse_csv_format(o.format);
        } catch (const ParseError& e) {
            problems.push_back(std::string("--format: ") + e.what());
        }
    }
    if (!o.crystal.empty()) c.crystal = o.crystal;
    if (!o.specimen.empty()) c.specimen = o.specimen;
    if (!o.table.empty()) c.table = o.table;
    if (adjust) adjust(c, problems);
    c.sampler.seed = c.seed.value_or(0);
    for (auto& p : config_problems(c, cmd)) problems.push_back(std::move(p));
    if (!problems.empty()) throw ConfigError(problems);
    return c;
}

struct Context {
    RunConfig cfg;
    std::optional<NormalizerTable> loaded;
    const NormalizerTable& table() {
        if (cfg.table) {
            if (!loaded) loaded = NormalizerTable::load(*cfg.table);
            return *loaded;
        }
        return default_table();
    }
    SymmetryGroup qc() const { return resolve_group(cfg.crystal); }
    SymmetryGroup qs() const { return resolve_group(cfg.specimen); }
    Dataset data() const { return ingest(cfg.data, cfg.format, qc(), qs()); }
};

void prepare_out(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

void write_manifest(const Context& ctx, const std::string& command, std::vector<std::string> outputs,
                    std::vector<std::pair<std::string, std::string>> extra = {},
                    const std::string& provenance = {}) {
    Manifest m{command, &ctx.cfg, std::move(outputs), provenance, std::move(extra)};
    const std::string name = "manifest-" + command + ".json";
    write_file(ctx.cfg.out / name, manifest_json(m));
}

std::string tuning_json(const Tuning& t) {
    std::ostringstream s;
    s << "{\"b\": " << format_double(t.b) << ", \"c\": [";
    for (std::size_t i = 0; i < t.c.size(); ++i) s << (i ? ", " : "") << format_double(t.c[i]);
    s << "], \"d\": [";
    for (std::size_t i = 0; i < t.d.size(); ++i) s << (i ? ", " : "") << format_double(t.d[i]);
    s << "]}";
    return s.str();
}

std::string selection_json(const BandwidthSelection& sel) {
    std::ostringstream s;
    s << "{\n  \"kappa\": " << format_double(sel.spec.kappa) << ",\n  \"constant\": " << format_double(sel.spec.constant)
      << ",\n  \"points_used\": " << sel.points_used << ",\n  \"grid\": [";
    for (std::size_t i = 0; i < sel.kappas.size(); ++i) s << (i ? ", " : "") << format_double(sel.kappas[i]);
    s << "],\n  \"loo_scores\": [";
    for (std::size_t i = 0; i < sel.scores.size(); ++i)
        s << (i ? ", " : "") << (std::isfinite(sel.scores[i]) ? format_double(sel.scores[i]) : "null");
    s << "],\n  \"warning\": " << (sel.warning ? "\"" + *sel.warning + "\"" : "null") << "\n}\n";
    return s.str();
}

// Writes the grid (Euler or pole figures) of `odf`; pole figures project
// `samples`. Returns the file names.
std::vector<std::string> export_grid(const Context& ctx, const std::string& stem, const Odf& odf,
                                     const std::vector<UnitQuaternion>& samples) {
    const auto& g = ctx.cfg.grid;
    std::vector<std::string> files;
    if (g.kind == GridSpec::Kind::EulerGrid) {
        const std::string name = stem + "_grid.csv";
        write_euler_grid(ctx.cfg.out / name, evaluate_euler_grid(odf, g.resolution_deg));
        files.push_back(name);
    } else {
        const auto qc = ctx.qc(), qs = ctx.qs();
        for (std::size_t i = 0; i < g.poles.size(); ++i) {
            const std::string name = stem + "_pole" + std::to_string(i + 1) + ".csv";
            write_pole_figure(ctx.cfg.out / name, pole_figure(samples, qc, qs, g.poles[i], g.resolution_deg));
            files.push_back(name);
        }
    }
    return files;
}

int cmd_fit(const Overrides& o, bool tempered) {
    Context ctx{effective_config(o, tempered ? Command::PtFit : Command::Fit), {}};
    const auto data = ctx.data();
    const auto& table = ctx.table();
    prepare_out(ctx.cfg.out);
    TraceWriter writer(ctx.cfg.out / "trace.ndjson");
    const auto save = [&](const TraceRecord& r) { writer.write(r); };
    std::vector<std::string> outputs{"trace.ndjson"};
    std::vector<std::pair<std::string, std::string>> extra;
    if (!tempered) {
        const auto trace = run(data, ctx.cfg.hyper, ctx.cfg.sampler, table, save);
        extra.emplace_back("final_tuning", tuning_json(trace.final_tuning));
    } else {
        const auto r = run_pt(data, ctx.cfg.hyper, ctx.cfg.sampler, TemperatureLadder(ctx.cfg.ladder), ctx.cfg.swap_rule,
                              table, save);
        std::string swaps = "pair,T_cold,T_hot,proposed,accepted,rate\n";
        for (std::size_t t = 0; t < r.swaps.size(); ++t)
            swaps += std::to_string(t + 1) + "," + format_double(ctx.cfg.ladder[t]) + "," +
                     format_double(ctx.cfg.ladder[t + 1]) + "," + std::to_string(r.swaps[t].proposed) + "," +
                     std::to_string(r.swaps[t].accepted) + "," + format_double(r.swaps[t].rate()) + "\n";
        write_file(ctx.cfg.out / "swaps.csv", swaps);
        std::string rungs = "rung,T,births,births_accepted,deaths,deaths_accepted,weights,weights_accepted,"
                            "orientations,orientations_accepted,scales,scales_accepted\n";
        for (std::size_t t = 0; t < r.rungs.size(); ++t) {
            const auto& c = r.rungs[t].counts;
            rungs += std::to_string(t + 1) + "," + format_double(r.rungs[t].temperature);
            for (std::size_t v : {c.births, c.births_accepted, c.deaths, c.deaths_accepted, c.weights,
                                  c.weights_accepted, c.orientations, c.orientations_accepted, c.scales,
                                  c.scales_accepted})
                rungs += "," + std::to_string(v);
            rungs += "\n";
        }
        write_file(ctx.cfg.out / "rungs.csv", rungs);
        outputs.insert(outputs.end(), {"swaps.csv", "rungs.csv"});
        extra.emplace_back("final_tuning", tuning_json(r.trace.final_tuning));
    }
    extra.emplace_back("records", std::to_string(writer.written()));
    extra.emplace_back("observations", std::to_string(data.size()));
    write_manifest(ctx, tempered ? "pt-fit" : "fit", outputs, extra, table.provenance());
    std::cout << (tempered ? "pt-fit" : "fit") << ": " << writer.written() << " records -> "
              << (ctx.cfg.out / "trace.ndjson").string() << "\n";
    return kOk;
}

fs::path trace_path(const Context& ctx, const std::string& flag) {
    return flag.empty() ? ctx.cfg.out / "trace.ndjson" : fs::path(flag);
}

int cmd_ppd(const Overrides& o, const std::string& trace_flag, std::optional<std::size_t> draws_flag,
            std::optional<double> kappa_flag, std::optional<double> resolution) {
    Context ctx{effective_config(o, Command::Ppd, [&](RunConfig& c, std::vector<std::string>&) {
                    if (kappa_flag) c.kappa = *kappa_flag;
                    if (resolution) c.grid.resolution_deg = *resolution;
                    if (draws_flag) c.ppd_draws = *draws_flag;
                }),
                {}};
    std::size_t n_new = ctx.cfg.ppd_draws;
    if (n_new == 0) {
        if (ctx.cfg.data.empty()) throw ConfigError({"ppd.draws: required when no data file gives the default 10 n"});
        n_new = 10 * ctx.data().size();
    }
    const auto trace = read_trace(trace_path(ctx, trace_flag));
    const auto qc = ctx.qc(), qs = ctx.qs();
    prepare_out(ctx.cfg.out);
    const auto draws = ppd_sample(trace, qc, qs, n_new, *ctx.cfg.seed);
    write_quaternions(ctx.cfg.out / "ppd_draws.csv", draws);
    const auto dens = ppd_density(draws, qc, qs, {ctx.cfg.kappa});
    write_file(ctx.cfg.out / "ppd_bandwidth.json", selection_json(dens.selection));
    auto outputs = export_grid(ctx, "ppd", dens.estimator, draws);
    outputs.insert(outputs.begin(), {"ppd_draws.csv", "ppd_bandwidth.json"});
    write_manifest(ctx, "ppd", outputs, {{"draws", std::to_string(n_new)}});
    std::cout << "ppd: " << n_new << " draws, kappa = " << dens.selection.spec.kappa << "\n";
    if (dens.selection.warning) std::cerr << "warning: " << *dens.selection.warning << "\n";
    return kOk;
}

int cmd_kde(const Overrides& o, std::optional<double> kappa_flag, std::optional<double> resolution) {
    Context ctx{effective_config(o, Command::Kde, [&](RunConfig& c, std::vector<std::string>&) {
                    if (kappa_flag) c.kappa = *kappa_flag;
                    if (resolution) c.grid.resolution_deg = *resolution;
                }),
                {}};
    const auto data = ctx.data();
    prepare_out(ctx.cfg.out);
    BandwidthSelection sel;
    if (ctx.cfg.kappa) {
        sel.spec = KernelSpec::make(*ctx.cfg.kappa);
        sel.points_used = data.size();
    } else {
        sel = select_bandwidth(data);
    }
    write_file(ctx.cfg.out / "kde_bandwidth.json", selection_json(sel));
    const KdeEstimator est(data, sel.spec);
    auto outputs = export_grid(ctx, "kde", est, data.observations);
    outputs.insert(outputs.begin(), "kde_bandwidth.json");
    write_manifest(ctx, "kde", outputs);
    std::cout << "kde: kappa = " << sel.spec.kappa << "\n";
    if (sel.warning) std::cerr << "warning: " << *sel.warning << "\n";
    return kOk;
}

int cmd_simulate(const Overrides& o, std::optional<std::string> generator, std::optional<std::size_t> n) {
    Context ctx{effective_config(o, Command::Simulate, [&](RunConfig& c, std::vector<std::string>& problems) {
                    if (generator) c.generator = *generator;
                    if (n) c.simulate_n = *n;
                    if (c.generator != "santafe" && c.generator != "sbm")
                        problems.push_back("--generator: '" + c.generator + "' is not santafe | sbm");
                }),
                {}};
    prepare_out(ctx.cfg.out);
    const auto sim = ctx.cfg.generator == "santafe"
                         ? santafe_generate(ctx.cfg.simulate_n, *ctx.cfg.seed)
                         : sbm_generate(ctx.cfg.simulate_n, *ctx.cfg.simulate_state, ctx.qc(), ctx.qs(), *ctx.cfg.seed);
    write_quaternions(ctx.cfg.out / "data.csv", sim.data.observations);
    write_ground_truth(ctx.cfg.out / "truth.json", sim.truth);
    std::string labels = "label\n";
    for (auto l : sim.labels) labels += std::to_string(l) + "\n";
    write_file(ctx.cfg.out / "labels.csv", labels);
    write_manifest(ctx, "simulate", {"data.csv", "truth.json", "labels.csv"});
    std::cout << "simulate: " << sim.data.size() << " orientations (" << ctx.cfg.generator << ", " << sim.truth.qc
              << " x " << sim.truth.qs << ")\n";
    return kOk;
}

int cmd_table_build(const fs::path& file, double lambda_max, std::size_t nodes) {
    const auto t = build_table(lambda_max, nodes);
    if (file.has_parent_path()) prepare_out(file.parent_path());
    t.save(file);
    std::cout << "table: " << nodes << "^3 nodes up to lambda = " << lambda_max << " -> " << file.string() << "\n";
    return kOk;
}

int cmd_table_check(const std::string& file, std::size_t spot_checks) {
    std::optional<NormalizerTable> loaded;
    if (!file.empty()) loaded = NormalizerTable::load(fs::path(file));
    const NormalizerTable& t = loaded ? *loaded : default_table();
    const auto r = check_table(t, spot_checks);
    std::printf("F(0) = %.15g (expected 2 pi^2 = %.15g): %s\n", r.f_zero, kSphereArea, r.f_zero_ok ? "ok" : "FAIL");
    std::printf("values positive: %s\nmonotone along axes: %s\n", r.positive ? "ok" : "FAIL", r.monotone ? "ok" : "FAIL");
    if (r.spot_checks) std::printf("max interpolation error over %zu spot checks: %.3g\n", r.spot_checks, r.max_interp_rel_error);
    return r.f_zero_ok && r.positive && r.monotone ? kOk : kCheckFailed;
}

int cmd_export(const Overrides& o, const std::string& source, const std::string& trace_flag,
               const std::string& draws_file, const std::string& kind, std::optional<double> resolution,
               const std::vector<std::vector<double>>& poles, std::optional<double> kappa_flag) {
    Context ctx{effective_config(o, Command::Export, [&](RunConfig& c, std::vector<std::string>& problems) {
                    if (kappa_flag) c.kappa = *kappa_flag;
                    if (!kind.empty()) {
                        if (kind == "euler-grid") c.grid.kind = GridSpec::Kind::EulerGrid;
                        else if (kind == "pole-figure") c.grid.kind = GridSpec::Kind::PoleFigure;
                        else problems.push_back("--kind: '" + kind + "' is not euler-grid | pole-figure");
                    }
                    if (resolution) c.grid.resolution_deg = *resolution;
                    if (!poles.empty()) {
                        c.grid.poles.clear();
                        for (const auto& p : poles) {
                            if (p.size() != 3) problems.push_back("--pole: expected three components x,y,z");
                            else c.grid.poles.push_back({p[0], p[1], p[2]});
                        }
                    }
                    if (source != "map" && source != "ppd" && source != "kde")
                        problems.push_back("--source: '" + source + "' is not map | ppd | kde");
                    if (source == "kde" && c.data.empty()) problems.push_back("data: required for --source kde");
                }),
                {}};

    const auto qc = ctx.qc(), qs = ctx.qs();
    prepare_out(ctx.cfg.out);
    std::vector<std::string> outputs;
    if (source == "map") {
        const auto trace = read_trace(trace_path(ctx, trace_flag));
        const auto& best = map_estimate(trace);
        const MixtureOdf odf(best.state, qc, qs, ctx.table());
        std::vector<UnitQuaternion> samples;
        if (ctx.cfg.grid.kind == GridSpec::Kind::PoleFigure)
            samples = sbm_generate(kPoleSamples, best.state, qc, qs, *ctx.cfg.seed).data.observations;
        outputs = export_grid(ctx, "map", odf, samples);
    } else if (source == "ppd") {
        const fs::path f = draws_file.empty() ? ctx.cfg.out / "ppd_draws.csv" : fs::path(draws_file);
        const auto draws = read_orientations(f, CsvFormat::Quaternion);
        if (draws.empty()) throw ParseError(f.string() + ": no draws");
        const auto dens = ppd_density(draws, qc, qs, {ctx.cfg.kappa});
        outputs = export_grid(ctx, "ppd", dens.estimator, draws);
    } else {
        const auto data = ctx.data();
        const auto spec = ctx.cfg.kappa ? KernelSpec::make(*ctx.cfg.kappa) : select_bandwidth(data).spec;
        outputs = export_grid(ctx, "kde", KdeEstimator(data, spec), data.observations);
    }
    write_manifest(ctx, "export", outputs, {{"source", "\"" + source + "\""}});
    for (const auto& f : outputs) std::cout << "export: " << (ctx.cfg.out / f).string() << "\n";
    return kOk;
}

int cmd_report(const Overrides& o, const std::string& trace_flag) {
    Context ctx{effective_config(o, Command::Report), {}};
    const auto trace = read_trace(trace_path(ctx, trace_flag));
    const auto s = summarize(trace, ctx.cfg.hyper.M_max, ctx.qc(), ctx.qs());
    prepare_out(ctx.cfg.out);
    const auto outputs = write_report(ctx.cfg.out, trace, s);
    write_manifest(ctx, "report", outputs);
    for (std::size_t m = 0; m < s.p_M.size(); ++m)
        std::printf("P(M=%zu|g) = %.4f%s\n", m + 1, s.p_M[m], m + 1 == s.modal_M ? "  (modal)" : "");
    for (std::size_t k = 0; k < s.mean_alpha.size(); ++k)
        std::printf("E[alpha_%zu | g, M=%zu] = %.4f  E[lambda] = (%.2f, %.2f, %.2f)\n", k + 1, s.modal_M,
                    s.mean_alpha[k], s.mean_lambda[k][0], s.mean_lambda[k][1], s.mean_lambda[k][2]);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian symmetric Bingham mixture ODF estimation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ODFMIX_VERSION);

    Overrides fit_o, pt_o, ppd_o, kde_o, sim_o, exp_o, rep_o;
    auto* fit = app.add_subcommand("fit", "Reversible-jump MCMC fit of a symmetric Bingham mixture");
    add_common(fit, fit_o);
    auto* pt = app.add_subcommand("pt-fit", "Parallel-tempering fit over a temperature ladder");
    add_common(pt, pt_o);

    std::string ppd_trace;
    std::optional<std::size_t> ppd_draws;
    std::optional<double> ppd_kappa, ppd_res;
    auto* ppd = app.add_subcommand("ppd", "Posterior predictive draws and their kernel density estimate");
    add_common(ppd, ppd_o);
    ppd->add_option("--trace", ppd_trace, "Trace file (default OUT/trace.ndjson)");
    ppd->add_option("--draws", ppd_draws, "Number of draws (default 10 n)");
    ppd->add_option("--kappa", ppd_kappa, "Fixed kernel concentration (default: cross-validated)");
    ppd->add_option("--resolution", ppd_res, "Grid resolution in degrees");

    std::optional<double> kde_kappa, kde_res;
    auto* kde = app.add_subcommand("kde", "Kernel density estimate of the data");
    add_common(kde, kde_o);
    kde->add_option("--kappa", kde_kappa, "Fixed kernel concentration (default: cross-validated)");
    kde->add_option("--resolution", kde_res, "Grid resolution in degrees");

    std::optional<std::string> sim_gen;
    std::optional<std::size_t> sim_n;
    auto* sim = app.add_subcommand("simulate", "Synthetic orientation data with ground truth");
    add_common(sim, sim_o);
    sim->add_option("--generator", sim_gen, "santafe | sbm");
    sim->add_option("--n", sim_n, "Number of orientations");

    auto* table = app.add_subcommand("table", "Normalizer table tools");
    table->require_subcommand(1);
    std::string build_file = "normalizer.table";
    double build_lmax = kDefaultLambdaMax;
    std::size_t build_nodes = kDefaultTableNodes;
    auto* tbuild = table->add_subcommand("build", "Tabulate the normalizer by quadrature");
    tbuild->add_option("--file", build_file, "Output table file");
    tbuild->add_option("--lambda-max", build_lmax, "Largest scale tabulated")->check(CLI::PositiveNumber);
    tbuild->add_option("--nodes", build_nodes, "Nodes per axis (>= 8)")->check(CLI::Range(8, 256));
    std::string check_file;
    std::size_t spot_checks = 20;
    auto* tcheck = table->add_subcommand("check", "Check a table (default: the built-in one)");
    tcheck->add_option("--file", check_file, "Table file")->check(CLI::ExistingFile);
    tcheck->add_option("--spot-checks", spot_checks, "Random points compared with quadrature");

    std::string exp_source = "map", exp_trace, exp_draws, exp_kind;
    std::optional<double> exp_res, exp_kappa;
    std::vector<std::vector<double>> exp_poles;
    auto* exp = app.add_subcommand("export", "Grid or pole-figure export of a fitted or estimated ODF");
    add_common(exp, exp_o);
    exp->add_option("--source", exp_source, "map | ppd | kde");
    exp->add_option("--trace", exp_trace, "Trace file for --source map");
    exp->add_option("--draws-file", exp_draws, "Draws for --source ppd (default OUT/ppd_draws.csv)");
    exp->add_option("--kind", exp_kind, "euler-grid | pole-figure");
    exp->add_option("--resolution", exp_res, "Grid resolution in degrees");
    exp->add_option("--pole", exp_poles, "Crystal direction x,y,z (repeatable)")->delimiter(',')->expected(3)->allow_extra_args(false);
    exp->add_option("--kappa", exp_kappa, "Fixed kernel concentration for ppd / kde sources");

    std::string rep_trace;
    auto* rep = app.add_subcommand("report", "Posterior summaries of a trace");
    add_common(rep, rep_o);
    rep->add_option("--trace", rep_trace, "Trace file (default OUT/trace.ndjson)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (fit->parsed()) return cmd_fit(fit_o, false);
        if (pt->parsed()) return cmd_fit(pt_o, true);
        if (ppd->parsed()) return cmd_ppd(ppd_o, ppd_trace, ppd_draws, ppd_kappa, ppd_res);
        if (kde->parsed()) return cmd_kde(kde_o, kde_kappa, kde_res);
        if (sim->parsed()) return cmd_simulate(sim_o, sim_gen, sim_n);
        if (tbuild->parsed()) return cmd_table_build(build_file, build_lmax, build_nodes);
        if (tcheck->parsed()) return cmd_table_check(check_file, spot_checks);
        if (exp->parsed())
            return cmd_export(exp_o, exp_source, exp_trace, exp_draws, exp_kind, exp_res, exp_poles, exp_kappa);
        if (rep->parsed()) return cmd_report(rep_o, rep_trace);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const RangeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRange;
    } catch (const ContractViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kPrecondition;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kInternal;
}
