#include "odfmix/io.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json_state.hpp"
#include "odfmix/errors.hpp"
#include "odfmix/euler.hpp"

namespace odfmix {

using detail::json;

namespace {

constexpr double kUnitTolerance = 1e-3;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(trim(cur));
    return out;
}

bool parse_number(const std::string& s, double& v) {
    if (s.empty()) return false;
    const char* b = s.data();
    const char* e = b + s.size();
    if (*b == '+') ++b;
    const auto r = std::from_chars(b, e, v);
    return r.ec == std::errc() && r.ptr == e && std::isfinite(v);
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    return os;
}

void check_written(const std::ofstream& os, const std::filesystem::path& path) {
    if (!os) throw IoError("write failed for " + path.string());
}

json parse_json(std::string_view text, const std::string& what, std::size_t lineno = 0) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(what + ": " + e.what(), lineno);
    }
}

}  // namespace

CsvFormat parse_csv_format(std::string_view name) {
    if (name == "quaternion-csv") return CsvFormat::Quaternion;
    if (name == "euler-csv") return CsvFormat::Euler;
    throw ParseError("unknown data format '" + std::string(name) + "' (quaternion-csv or euler-csv)");
}

std::string_view to_string(CsvFormat f) { return f == CsvFormat::Quaternion ? "quaternion-csv" : "euler-csv"; }

std::vector<UnitQuaternion> read_orientations(std::istream& is, CsvFormat format) {
    const std::size_t cols = format == CsvFormat::Quaternion ? 4 : 3;
    std::vector<UnitQuaternion> out;
    std::string line;
    std::size_t lineno = 0;
    bool seen_row = false;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto fields = split_fields(t);
        std::array<double, 4> v{};
        bool numeric = fields.size() == cols;
        for (std::size_t c = 0; numeric && c < cols; ++c) numeric = parse_number(fields[c], v[c]);
        if (!numeric) {
            double dummy = 0.0;
            const bool header = !seen_row && !fields.empty() && !parse_number(fields[0], dummy);
            seen_row = true;
            if (header) continue;
            std::ostringstream m;
            m << "line " << lineno << ": expected " << cols << " numeric fields, got '" << t << "'";
            throw ParseError(m.str(), lineno);
        }
        seen_row = true;
        if (format == CsvFormat::Quaternion) {
            const double norm = std::sqrt(dot(v, v));
            if (!(std::fabs(norm - 1.0) <= kUnitTolerance)) {
                std::ostringstream m;
                m << "line " << lineno << ": quaternion norm " << norm << " is not within 1e-3 of 1";
                throw ParseError(m.str(), lineno);
            }
            out.push_back(UnitQuaternion::normalize(v));
        } else {
            out.push_back(euler_to_quat({v[0] * kDeg, v[1] * kDeg, v[2] * kDeg}));
        }
    }
    if (is.bad()) throw IoError("read error");
    return out;
}

std::vector<UnitQuaternion> read_orientations(const std::filesystem::path& path, CsvFormat format) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path.string());
    try {
        return read_orientations(is, format);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.line());
    }
}

Dataset ingest(const std::filesystem::path& path, CsvFormat format, const SymmetryGroup& qc,
               const SymmetryGroup& qs) {
    Dataset d{read_orientations(path, format), qc, qs, path.string() + " (" + std::string(to_string(format)) + ")"};
    if (d.observations.empty()) throw ParseError(path.string() + ": no orientations");
    return d;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_quaternions(std::ostream& os, std::span<const UnitQuaternion> q) {
    os << "w,x,y,z\n";
    for (const auto& g : q)
        os << format_double(g.w()) << ',' << format_double(g.x()) << ',' << format_double(g.y()) << ','
           << format_double(g.z()) << '\n';
}

void write_quaternions(const std::filesystem::path& path, std::span<const UnitQuaternion> q) {
    auto os = open_out(path);
    write_quaternions(os, q);
    check_written(os, path);
}

void write_euler_grid(const std::filesystem::path& path, const EulerGridValues& v) {
    auto os = open_out(path);
    os << "phi1,Phi,phi2,value\n";
    char buf[128];
    for (std::size_t i = 0; i < v.angles.size(); ++i) {
        const auto& e = v.angles[i];
        std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6g,", e.phi1 / kDeg, e.Phi / kDeg, e.phi2 / kDeg);
        os << buf << format_double(v.mud[i]) << '\n';
    }
    check_written(os, path);
}

void write_pole_figure(const std::filesystem::path& path, const PoleFigure& pf) {
    auto os = open_out(path);
    os << "azimuth,polar,value\n";
    char buf[96];
    for (std::size_t i = 0; i < pf.mud.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.6g,%.6g,", pf.azimuth_deg[i], pf.polar_deg[i]);
        os << buf << format_double(pf.mud[i]) << '\n';
    }
    check_written(os, path);
}

std::string ground_truth_json(const GroundTruth& t) {
    json j{{"generator", t.generator},
           {"seed", t.seed},
           {"n", t.n},
           {"crystal", t.qc},
           {"specimen", t.qs},
           {"weights", t.weights},
           {"kappa", t.kappa},
           {"center", detail::vec_json(t.center.vec())}};
    if (t.state) j["state"] = detail::state_json(*t.state);
    return j.dump(2) + "\n";
}

GroundTruth parse_ground_truth(std::string_view text) {
    const json j = parse_json(text, "ground truth");
    try {
        GroundTruth t;
        t.generator = j.at("generator").get<std::string>();
        t.seed = j.at("seed").get<std::uint64_t>();
        t.n = j.at("n").get<std::size_t>();
        t.qc = j.at("crystal").get<std::string>();
        t.qs = j.at("specimen").get<std::string>();
        t.weights = j.at("weights").get<std::vector<double>>();
        t.kappa = j.at("kappa").get<double>();
        t.center = UnitQuaternion::normalize(detail::json_vec(j.at("center")));
        if (j.contains("state")) t.state = detail::json_state(j.at("state"));
        return t;
    } catch (const json::exception& e) {
        throw ParseError(std::string("ground truth: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("ground truth: ") + e.what());
    }
}

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& t) {
    write_file(path, ground_truth_json(t));
}

GroundTruth read_ground_truth(const std::filesystem::path& path) { return parse_ground_truth(read_file(path)); }

std::string trace_record_json(const TraceRecord& r) {
    const json j{{"iter", r.iter},
                 {"log_posterior", r.log_posterior},
                 {"M", r.state.M()},
                 {"state", detail::state_json(r.state)},
                 {"moves",
                  {{"dimension", r.moves.dimension},
                   {"dimension_accepted", r.moves.dimension_accepted},
                   {"weights_accepted", r.moves.weights_accepted},
                   {"orientation_accepted", r.moves.orientation_accepted},
                   {"scales_accepted", r.moves.scales_accepted}}}};
    return j.dump();
}

TraceRecord parse_trace_record(std::string_view line, std::size_t lineno) {
    const json j = parse_json(line, "trace record", lineno);
    try {
        TraceRecord r;
        r.iter = j.at("iter").get<std::size_t>();
        r.log_posterior = j.at("log_posterior").get<double>();
        r.state = detail::json_state(j.at("state"));
        const auto& m = j.at("moves");
        r.moves.dimension = m.at("dimension").get<int>();
        r.moves.dimension_accepted = m.at("dimension_accepted").get<bool>();
        r.moves.weights_accepted = m.at("weights_accepted").get<bool>();
        r.moves.orientation_accepted = m.at("orientation_accepted").get<std::size_t>();
        r.moves.scales_accepted = m.at("scales_accepted").get<std::size_t>();
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("trace record: ") + e.what(), lineno);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("trace record: ") + e.what(), lineno);
    }
}

TraceWriter::TraceWriter(const std::filesystem::path& path) : path_(path), os_(open_out(path)) {}

void TraceWriter::write(const TraceRecord& r) {
    os_ << trace_record_json(r) << '\n';
    os_.flush();
    check_written(os_, path_);
    ++written_;
}

ChainTrace read_trace(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open trace " + path.string());
    ChainTrace t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        t.records.push_back(parse_trace_record(line, lineno));
    }
    if (!t.records.empty()) t.initial = t.records.front().state;
    return t;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    if (is.bad()) throw IoError("read error on " + path.string());
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    auto os = open_out(path);
    os << content;
    check_written(os, path);
}

}  // namespace odfmix
