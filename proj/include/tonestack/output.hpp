#pragma once

#include "tonestack/response.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tonestack::output {

inline constexpr std::string_view kCsvHeader = "frequency_hz,vout_re,vout_im,magnitude_db,phase_deg";

struct CsvRow {
    double frequency_hz = 0.0;
    double vout_re = 0.0;
    double vout_im = 0.0;
    double magnitude_db = 0.0;
    double phase_deg = 0.0;

    friend bool operator==(const CsvRow&, const CsvRow&) = default;
};

std::vector<CsvRow> to_rows(const ResponseCurve& curve);

/// Header plus one row per point; numbers in shortest round-trip form.
std::string to_csv(const ResponseCurve& curve);

/// Inverse of to_csv. Throws std::runtime_error on a malformed table.
std::vector<CsvRow> read_csv(std::string_view text);

struct PlotSeries {
    std::string label;
    std::vector<double> frequency_hz;
    std::vector<double> magnitude_db;
};

PlotSeries to_series(const ResponseCurve& curve, std::string label);

struct PlotOptions {
    std::string title = "Modelled Response";
    double f_min = 20.0;
    double f_max = 24000.0;
    double db_max = 1.0;
};

/// Self-contained semilog plot: log frequency on x, dB on y, one polyline
/// per series plus a legend. Points outside [f_min, f_max] are not drawn.
std::string render_svg(std::span<const PlotSeries> series, const PlotOptions& options = {});

/// Writes `contents` to a sibling temporary file, then renames it over
/// `path`. Throws std::filesystem::filesystem_error / std::system_error
/// carrying the OS error text.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace tonestack::output
