#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "odfmix/grid.hpp"
#include "odfmix/rjmcmc.hpp"
#include "odfmix/synthetic.hpp"

namespace odfmix {

/// quaternion-csv: w,x,y,z per row. euler-csv: Bunge phi1,Phi,phi2 in degrees.
/// An optional header row and '#' comment lines are skipped.
enum class CsvFormat { Quaternion, Euler };

/// Throws ParseError for anything but "quaternion-csv" / "euler-csv".
CsvFormat parse_csv_format(std::string_view name);
std::string_view to_string(CsvFormat f);

/// Quaternion rows within 1e-3 of unit length are normalized, others
/// rejected. Errors carry the 1-based line number.
std::vector<UnitQuaternion> read_orientations(std::istream& is, CsvFormat format);
std::vector<UnitQuaternion> read_orientations(const std::filesystem::path& path, CsvFormat format);

Dataset ingest(const std::filesystem::path& path, CsvFormat format, const SymmetryGroup& qc,
               const SymmetryGroup& qs);

/// %.17g, so reading back is exact.
std::string format_double(double v);

void write_quaternions(std::ostream& os, std::span<const UnitQuaternion> q);
void write_quaternions(const std::filesystem::path& path, std::span<const UnitQuaternion> q);

/// phi1,Phi,phi2 (degrees),value with value in multiples of uniform.
void write_euler_grid(const std::filesystem::path& path, const EulerGridValues& v);
/// azimuth,polar (degrees),value.
void write_pole_figure(const std::filesystem::path& path, const PoleFigure& pf);

std::string ground_truth_json(const GroundTruth& t);
GroundTruth parse_ground_truth(std::string_view json);
void write_ground_truth(const std::filesystem::path& path, const GroundTruth& t);
GroundTruth read_ground_truth(const std::filesystem::path& path);

/// One trace record as a single line of JSON (no newline).
std::string trace_record_json(const TraceRecord& r);
TraceRecord parse_trace_record(std::string_view line, std::size_t lineno = 0);

/// Appends records as newline-delimited JSON, flushing after each one.
class TraceWriter {
public:
    explicit TraceWriter(const std::filesystem::path& path);
    void write(const TraceRecord& r);
    std::size_t written() const { return written_; }

private:
    std::filesystem::path path_;
    std::ofstream os_;
    std::size_t written_ = 0;
};

/// Reads a trace written by TraceWriter (records only).
ChainTrace read_trace(const std::filesystem::path& path);

/// Whole file as a string. Throws IoError.
std::string read_file(const std::filesystem::path& path);
/// Truncates and writes. Throws IoError.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace odfmix
