#include "odfmix/config.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "json_state.hpp"
#include "odfmix/errors.hpp"
#include "odfmix/hash.hpp"

#include <Eigen/Core>

namespace odfmix {

using detail::json;

namespace {

// Reads known keys of one JSON object, recording type errors and unknown keys.
class Reader {
public:
    Reader(const json& obj, std::string prefix, std::vector<std::string>& problems, std::set<std::string> allowed)
        : obj_(obj), prefix_(std::move(prefix)), problems_(problems) {
        if (!obj_.is_object()) {
            problem("", "expected an object");
            return;
        }
        for (const auto& [k, v] : obj_.items())
            if (!allowed.count(k)) problem(k, "unknown key");
    }

    const json* find(const char* key) const {
        if (!obj_.is_object() || !obj_.contains(key) || obj_.at(key).is_null()) return nullptr;
        return &obj_.at(key);
    }

    void number(const char* key, double& out) {
        if (const json* v = find(key)) {
            if (v->is_number()) out = v->get<double>();
            else problem(key, "expected a number");
        }
    }
    void number(const char* key, std::optional<double>& out) {
        if (const json* v = find(key)) {
            if (v->is_number()) out = v->get<double>();
            else problem(key, "expected a number");
        }
    }
    void count(const char* key, std::size_t& out) {
        if (const json* v = find(key)) {
            if (v->is_number_unsigned()) out = v->get<std::size_t>();
            else problem(key, "expected a non-negative integer");
        }
    }
    void flag(const char* key, bool& out) {
        if (const json* v = find(key)) {
            if (v->is_boolean()) out = v->get<bool>();
            else problem(key, "expected true or false");
        }
    }
    void text(const char* key, std::string& out) {
        if (const json* v = find(key)) {
            if (v->is_string()) out = v->get<std::string>();
            else problem(key, "expected a string");
        }
    }
    template <class F>
    void choice(const char* key, const std::vector<std::string>& names, F&& set) {
        std::string s;
        if (!find(key)) return;
        if (!find(key)->is_string()) {
            problem(key, "expected a string");
            return;
        }
        s = find(key)->get<std::string>();
        for (std::size_t i = 0; i < names.size(); ++i)
            if (s == names[i]) {
                set(i);
                return;
            }
        std::string all;
        for (const auto& n : names) all += (all.empty() ? "" : " | ") + n;
        problem(key, "'" + s + "' is not one of " + all);
    }

    void problem(const std::string& key, const std::string& what) {
        std::string path = prefix_;
        if (!key.empty()) path += (path.empty() ? "" : ".") + key;
        problems_.push_back((path.empty() ? "config" : path) + ": " + what);
    }

    std::string path(const char* key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

private:
    const json& obj_;
    std::string prefix_;
    std::vector<std::string>& problems_;
};

const std::vector<std::string> kGridKinds{"euler-grid", "pole-figure"};
const std::vector<std::string> kGenerators{"santafe", "sbm"};

bool readable(const std::filesystem::path& p) {
    std::error_code ec;
    return std::filesystem::is_regular_file(p, ec);
}

std::string fmt(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

}  // namespace

RunConfig parse_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
    }
    std::vector<std::string> problems;
    RunConfig c;
    Reader top(j, "", problems,
               {"data", "format", "crystal", "specimen", "seed", "forced_uniform", "hyperparams", "sampler", "ladder",
                "swap_rule", "table", "out", "ppd", "kde", "grid", "simulate"});
    std::string path;
    top.text("data", path);
    c.data = path;
    top.choice("format", {"quaternion-csv", "euler-csv"},
               [&](std::size_t i) { c.format = i == 0 ? CsvFormat::Quaternion : CsvFormat::Euler; });
    top.text("crystal", c.crystal);
    top.text("specimen", c.specimen);
    if (const json* s = top.find("seed")) {
        if (s->is_number_unsigned()) c.seed = s->get<std::uint64_t>();
        else top.problem("seed", "expected a non-negative integer");
    }
    top.flag("forced_uniform", c.sampler.forced_uniform);
    if (const json* t = top.find("table")) {
        if (t->is_string()) c.table = t->get<std::string>();
        else top.problem("table", "expected a string");
    }
    path = c.out.string();
    top.text("out", path);
    c.out = path;
    top.choice("swap_rule", {"corrected", "literal"},
               [&](std::size_t i) { c.swap_rule = i == 0 ? SwapRule::Corrected : SwapRule::Literal; });
    if (const json* l = top.find("ladder")) {
        if (l->is_array() && std::all_of(l->begin(), l->end(), [](const json& x) { return x.is_number(); }))
            c.ladder = l->get<std::vector<double>>();
        else
            top.problem("ladder", "expected an array of numbers");
    }

    if (const json* h = top.find("hyperparams")) {
        Reader r(*h, "hyperparams", problems, {"mu", "beta", "nu", "m_max"});
        r.number("mu", c.hyper.mu);
        r.number("beta", c.hyper.beta);
        r.number("nu", c.hyper.nu);
        r.count("m_max", c.hyper.M_max);
    }
    if (const json* s = top.find("sampler")) {
        Reader r(*s, "sampler", problems,
                 {"iterations", "burn_in", "thin", "b", "c", "d", "adapt", "adapt_window", "adapt_gain", "target_rate",
                  "likelihood", "moves", "weights_normalization", "max_retries", "parallel"});
        auto& sc = c.sampler;
        r.count("iterations", sc.n_iters);
        r.count("burn_in", sc.burn_in);
        r.count("thin", sc.thin);
        r.number("b", sc.b);
        r.number("c", sc.c);
        r.number("d", sc.d);
        r.flag("adapt", sc.adapt);
        r.count("adapt_window", sc.adapt_window);
        r.number("adapt_gain", sc.adapt_gain);
        r.number("target_rate", sc.target_rate);
        r.flag("likelihood", sc.likelihood);
        r.choice("moves", {"corrected", "literal"},
                 [&](std::size_t i) { sc.moves = i == 0 ? MoveSet::Corrected : MoveSet::Literal; });
        r.choice("weights_normalization", {"cumulative", "literal"}, [&](std::size_t i) {
            sc.weights_normalization = i == 0 ? WeightsNormalization::Cumulative : WeightsNormalization::Literal;
        });
        r.count("max_retries", sc.max_retries);
        r.flag("parallel", sc.parallel);
    }
    if (const json* p = top.find("ppd")) {
        Reader r(*p, "ppd", problems, {"draws"});
        r.count("draws", c.ppd_draws);
    }
    if (const json* k = top.find("kde")) {
        Reader r(*k, "kde", problems, {"kappa"});
        r.number("kappa", c.kappa);
    }
    if (const json* g = top.find("grid")) {
        Reader r(*g, "grid", problems, {"kind", "resolution", "poles"});
        r.choice("kind", kGridKinds, [&](std::size_t i) {
            c.grid.kind = i == 0 ? GridSpec::Kind::EulerGrid : GridSpec::Kind::PoleFigure;
        });
        r.number("resolution", c.grid.resolution_deg);
        if (const json* poles = r.find("poles")) {
            bool ok = poles->is_array();
            if (ok)
                for (const auto& p : *poles) {
                    ok = ok && p.is_array() && p.size() == 3 &&
                         std::all_of(p.begin(), p.end(), [](const json& x) { return x.is_number(); });
                    if (ok) c.grid.poles.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
                }
            if (!ok) r.problem("poles", "expected an array of [x, y, z] directions");
        }
    }
    if (const json* s = top.find("simulate")) {
        Reader r(*s, "simulate", problems, {"generator", "n", "state"});
        r.choice("generator", kGenerators, [&](std::size_t i) { c.generator = kGenerators[i]; });
        r.count("n", c.simulate_n);
        if (const json* st = r.find("state")) {
            try {
                c.simulate_state = detail::json_state(*st);
            } catch (const std::exception& e) {
                r.problem("state", e.what());
            }
        }
    }
    c.sampler.seed = c.seed.value_or(0);
    if (!problems.empty()) throw ConfigError(problems);
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const IoError& e) {
        throw ConfigError({e.what()});
    }
    return parse_config(text);
}

SymmetryGroup resolve_group(const std::string& name) {
    const auto& cat = symmetry_catalog();
    if (std::find(cat.begin(), cat.end(), name) != cat.end()) return symmetry_group(name);
    if (readable(name)) return load_symmetry_group(name);
    throw CatalogError("unknown symmetry group '" + name + "' (not in the catalog and not a readable file)");
}

std::vector<std::string> config_problems(const RunConfig& c, Command cmd) {
    std::vector<std::string> p;
    const bool sampling = cmd == Command::Fit || cmd == Command::PtFit;
    const bool needs_seed = sampling || cmd == Command::Ppd || cmd == Command::Simulate || cmd == Command::Export;
    if (needs_seed && !c.seed) p.push_back("seed: required (set it in the config or with --seed)");

    if (sampling || cmd == Command::Kde) {
        if (c.data.empty()) p.push_back("data: required");
        else if (!readable(c.data)) p.push_back("data: cannot read '" + c.data.string() + "'");
    }
    if (cmd != Command::Simulate && cmd != Command::Table) {
        for (const auto* g : {&c.crystal, &c.specimen}) {
            try {
                resolve_group(*g);
            } catch (const std::exception& e) {
                p.push_back(std::string(g == &c.crystal ? "crystal" : "specimen") + ": " + e.what());
            }
        }
    }
    if (c.table && cmd != Command::Table && !readable(*c.table))
        p.push_back("table: cannot read '" + c.table->string() + "'");
    if (c.out.empty()) p.push_back("out: must name a directory");

    const auto& h = c.hyper;
    auto positive = [&](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) p.push_back(std::string(name) + ": must be positive, got " + fmt(v));
    };
    positive(h.mu, "hyperparams.mu");
    positive(h.beta, "hyperparams.beta");
    positive(h.nu, "hyperparams.nu");
    if (h.M_max < 1) p.push_back("hyperparams.m_max: must be at least 1");

    const auto& s = c.sampler;
    if (sampling) {
        if (s.n_iters < 1) p.push_back("sampler.iterations: must be at least 1");
        if (s.burn_in >= s.n_iters && s.n_iters > 0) p.push_back("sampler.burn_in: must be below sampler.iterations");
        if (s.thin < 1) p.push_back("sampler.thin: must be at least 1");
        positive(s.b, "sampler.b");
        positive(s.c, "sampler.c");
        positive(s.d, "sampler.d");
        if (s.adapt_window < 1) p.push_back("sampler.adapt_window: must be at least 1");
        if (!(s.adapt_gain >= 0.0) || !std::isfinite(s.adapt_gain)) p.push_back("sampler.adapt_gain: must be >= 0");
        if (!(s.target_rate > 0.0 && s.target_rate < 1.0)) p.push_back("sampler.target_rate: must lie in (0, 1)");
        if (s.max_retries < 1) p.push_back("sampler.max_retries: must be at least 1");
    }
    if (cmd == Command::PtFit) {
        if (c.ladder.empty()) p.push_back("ladder: must not be empty");
        else if (c.ladder.front() != 1.0) p.push_back("ladder: must start at exactly 1");
        for (std::size_t t = 0; t < c.ladder.size(); ++t) {
            if (!(c.ladder[t] > 0.0 && c.ladder[t] <= 1.0))
                p.push_back("ladder[" + std::to_string(t) + "]: must lie in (0, 1]");
            if (t > 0 && !(c.ladder[t] < c.ladder[t - 1]))
                p.push_back("ladder[" + std::to_string(t) + "]: must be below the previous temperature");
        }
    }
    if (c.kappa && (!(*c.kappa >= 0.0) || !std::isfinite(*c.kappa)))
        p.push_back("kde.kappa: must be finite and >= 0");
    if (cmd == Command::Export || cmd == Command::Kde || cmd == Command::Ppd)
        for (const auto& g : c.grid.problems()) p.push_back("grid: " + g);
    if (cmd == Command::Simulate) {
        if (c.simulate_n < 1) p.push_back("simulate.n: must be at least 1");
        if (c.generator == "sbm") {
            if (!c.simulate_state) {
                p.push_back("simulate.state: required for the sbm generator");
            } else {
                try {
                    c.simulate_state->validate(std::max<std::size_t>(c.simulate_state->M(), 1));
                } catch (const std::exception& e) {
                    p.push_back(std::string("simulate.state: ") + e.what());
                }
            }
            for (const auto* g : {&c.crystal, &c.specimen}) {
                try {
                    resolve_group(*g);
                } catch (const std::exception& e) {
                    p.push_back(std::string(g == &c.crystal ? "crystal" : "specimen") + ": " + e.what());
                }
            }
        }
    }
    return p;
}

void validate_config(const RunConfig& c, Command command) {
    auto p = config_problems(c, command);
    if (!p.empty()) throw ConfigError(std::move(p));
}

namespace {

json config_to_json(const RunConfig& c) {
    const auto& s = c.sampler;
    json poles = json::array();
    for (const auto& d : c.grid.poles) poles.push_back({d[0], d[1], d[2]});
    json j{{"data", c.data.string()},
           {"format", std::string(to_string(c.format))},
           {"crystal", c.crystal},
           {"specimen", c.specimen},
           {"seed", c.seed ? json(*c.seed) : json(nullptr)},
           {"forced_uniform", s.forced_uniform},
           {"hyperparams", {{"mu", c.hyper.mu}, {"beta", c.hyper.beta}, {"nu", c.hyper.nu}, {"m_max", c.hyper.M_max}}},
           {"sampler",
            {{"iterations", s.n_iters},
             {"burn_in", s.burn_in},
             {"thin", s.thin},
             {"b", s.b},
             {"c", s.c},
             {"d", s.d},
             {"adapt", s.adapt},
             {"adapt_window", s.adapt_window},
             {"adapt_gain", s.adapt_gain},
             {"target_rate", s.target_rate},
             {"likelihood", s.likelihood},
             {"moves", s.moves == MoveSet::Corrected ? "corrected" : "literal"},
             {"weights_normalization",
              s.weights_normalization == WeightsNormalization::Cumulative ? "cumulative" : "literal"},
             {"max_retries", s.max_retries},
             {"parallel", s.parallel}}},
           {"ladder", c.ladder},
           {"swap_rule", c.swap_rule == SwapRule::Corrected ? "corrected" : "literal"},
           {"table", c.table ? json(c.table->string()) : json(nullptr)},
           {"out", c.out.string()},
           {"ppd", {{"draws", c.ppd_draws}}},
           {"kde", {{"kappa", c.kappa ? json(*c.kappa) : json(nullptr)}}},
           {"grid",
            {{"kind", c.grid.kind == GridSpec::Kind::EulerGrid ? "euler-grid" : "pole-figure"},
             {"resolution", c.grid.resolution_deg},
             {"poles", poles}}},
           {"simulate",
            {{"generator", c.generator},
             {"n", c.simulate_n},
             {"state", c.simulate_state ? detail::state_json(*c.simulate_state) : json(nullptr)}}}};
    return j;
}

}  // namespace

std::string canonical_config_json(const RunConfig& c) { return config_to_json(c).dump(2); }

std::uint64_t config_hash(const RunConfig& c) { return fnv1a(canonical_config_json(c)); }

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string manifest_json(const Manifest& m) {
    json j{{"tool", "odfmix"},
           {"command", m.command},
           {"versions",
            {{"odfmix", ODFMIX_VERSION},
             {"compiler", __VERSION__},
             {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                           std::to_string(EIGEN_MINOR_VERSION)},
             {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                   std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                   std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}},
           {"outputs", m.outputs}};
    if (m.config) {
        j["config"] = config_to_json(*m.config);
        j["config_hash"] = hex64(config_hash(*m.config));
        j["seed"] = m.config->seed ? json(*m.config->seed) : json(nullptr);
    }
    if (!m.table_provenance.empty()) j["table"] = m.table_provenance;
    for (const auto& [k, v] : m.extra) j[k] = json::parse(v);
    return j.dump(2) + "\n";
}

}  // namespace odfmix
