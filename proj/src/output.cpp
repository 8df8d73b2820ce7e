#include "tonestack/output.hpp"

#include "tonestack/netlist.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <unistd.h>

namespace tonestack::output {

namespace {

std::string escape_xml(std::string_view text) {
    std::string out;
    for (const char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

std::string frequency_label(double f) {
    if (f >= 1000.0) return netlist::format_shortest(f / 1000.0) + "k";
    return netlist::format_shortest(f);
}

// Evenly spread hues, fixed saturation/lightness.
std::string series_colour(std::size_t i, std::size_t n) {
    const double hue = 360.0 * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(n, 1));
    return "hsl(" + fixed(hue, 0) + ",70%,42%)";
}

}  // namespace

std::vector<CsvRow> to_rows(const ResponseCurve& curve) {
    std::vector<CsvRow> rows;
    rows.reserve(curve.points.size());
    for (const auto& p : curve.points) {
        rows.push_back({p.frequency, p.vout.real(), p.vout.imag(), p.magnitude_db, p.phase_deg});
    }
    return rows;
}

std::string to_csv(const ResponseCurve& curve) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : to_rows(curve)) {
        for (const double v : {r.frequency_hz, r.vout_re, r.vout_im, r.magnitude_db}) {
            out += netlist::format_shortest(v);
            out += ',';
        }
        out += netlist::format_shortest(r.phase_deg);
        out += '\n';
    }
    return out;
}

std::vector<CsvRow> read_csv(std::string_view text) {
    std::vector<CsvRow> rows;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        if (line_no == 1) {
            if (line != kCsvHeader) throw std::runtime_error("unexpected CSV header");
            continue;
        }
        if (line.empty()) continue;

        double fields[5];
        std::size_t k = 0;
        while (k < 5) {
            const auto comma = line.find(',');
            const auto field = line.substr(0, comma);
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), fields[k]);
            if (ec != std::errc{} || ptr != field.data() + field.size()) {
                throw std::runtime_error("malformed CSV number on line " + std::to_string(line_no));
            }
            ++k;
            if (comma == std::string_view::npos) break;
            line.remove_prefix(comma + 1);
        }
        if (k != 5) throw std::runtime_error("expected 5 CSV fields on line " + std::to_string(line_no));
        rows.push_back({fields[0], fields[1], fields[2], fields[3], fields[4]});
    }
    if (line_no == 0) throw std::runtime_error("empty CSV");
    return rows;
}

PlotSeries to_series(const ResponseCurve& curve, std::string label) {
    PlotSeries s{std::move(label), {}, {}};
    for (const auto& p : curve.points) {
        s.frequency_hz.push_back(p.frequency);
        s.magnitude_db.push_back(p.magnitude_db);
    }
    return s;
}

std::string render_svg(std::span<const PlotSeries> series, const PlotOptions& options) {
    constexpr double kWidth = 860.0;
    constexpr double kHeight = 520.0;
    constexpr double kLeft = 70.0;
    constexpr double kRight = 170.0;  // legend column
    constexpr double kTop = 50.0;
    constexpr double kBottom = 60.0;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;

    const double lx0 = std::log10(options.f_min);
    const double lx1 = std::log10(options.f_max);

    double db_min = std::numeric_limits<double>::infinity();
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.frequency_hz.size(); ++i) {
            const double f = s.frequency_hz[i];
            const double db = s.magnitude_db[i];
            if (f >= options.f_min && f <= options.f_max && std::isfinite(db)) db_min = std::min(db_min, db);
        }
    }
    const double y_top = options.db_max;
    double y_bottom = std::isfinite(db_min) ? std::floor(db_min / 10.0) * 10.0 : y_top - 10.0;
    if (y_bottom > y_top - 10.0) y_bottom = std::floor((y_top - 10.0) / 10.0) * 10.0;

    const auto px = [&](double f) { return kLeft + (std::log10(f) - lx0) / (lx1 - lx0) * plot_w; };
    const auto py = [&](double db) {
        const double clamped = std::clamp(db, y_bottom, y_top);
        return kTop + (y_top - clamped) / (y_top - y_bottom) * plot_h;
    };

    std::ostringstream svg;
    svg << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << kWidth << R"(" height=")" << kHeight
        << R"(" viewBox="0 0 )" << kWidth << ' ' << kHeight << R"(" font-family="sans-serif" font-size="12">)"
        << '\n';
    svg << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n';
    svg << R"(<text x=")" << kLeft + plot_w / 2 << R"(" y="28" text-anchor="middle" font-size="16">)"
        << escape_xml(options.title) << "</text>\n";

    // Frequency grid: every 1-2-...-9 x 10^k inside the window, labels on decades and the window ends.
    svg << R"(<g stroke="#dddddd" stroke-width="1">)" << '\n';
    for (int decade = static_cast<int>(std::floor(lx0)); decade <= static_cast<int>(std::ceil(lx1)); ++decade) {
        for (int mult = 1; mult <= 9; ++mult) {
            const double f = mult * std::pow(10.0, decade);
            if (f < options.f_min || f > options.f_max) continue;
            svg << R"(<line x1=")" << fixed(px(f), 2) << R"(" y1=")" << kTop << R"(" x2=")" << fixed(px(f), 2)
                << R"(" y2=")" << kTop + plot_h << R"("/>)" << '\n';
        }
    }
    const double y_step = (y_top - y_bottom) > 60.0 ? 20.0 : ((y_top - y_bottom) > 20.0 ? 10.0 : 5.0);
    for (double db = std::ceil(y_bottom / y_step) * y_step; db <= y_top; db += y_step) {
        svg << R"(<line x1=")" << kLeft << R"(" y1=")" << fixed(py(db), 2) << R"(" x2=")" << kLeft + plot_w
            << R"(" y2=")" << fixed(py(db), 2) << R"("/>)" << '\n';
    }
    svg << "</g>\n";

    svg << R"(<g fill="#333333">)" << '\n';
    std::vector<double> ticks{options.f_min};
    for (int decade = static_cast<int>(std::ceil(lx0)); decade <= static_cast<int>(std::floor(lx1)); ++decade) {
        const double f = std::pow(10.0, decade);
        if (f > options.f_min * 1.2 && f < options.f_max / 1.2) ticks.push_back(f);
    }
    ticks.push_back(options.f_max);
    for (const double f : ticks) {
        svg << R"(<text x=")" << fixed(px(f), 2) << R"(" y=")" << kTop + plot_h + 18
            << R"(" text-anchor="middle">)" << frequency_label(f) << "</text>\n";
    }
    for (double db = std::ceil(y_bottom / y_step) * y_step; db <= y_top; db += y_step) {
        svg << R"(<text x=")" << kLeft - 8 << R"(" y=")" << fixed(py(db) + 4, 2) << R"(" text-anchor="end">)"
            << netlist::format_shortest(db) << "</text>\n";
    }
    svg << R"(<text x=")" << kLeft + plot_w / 2 << R"(" y=")" << kHeight - 18
        << R"(" text-anchor="middle">Hz</text>)" << '\n';
    svg << R"(<text x="18" y=")" << kTop + plot_h / 2 << R"(" text-anchor="middle" transform="rotate(-90 18 )"
        << kTop + plot_h / 2 << R"lit()">dB</text>)lit" << '\n';
    svg << "</g>\n";
    svg << R"(<rect x=")" << kLeft << R"(" y=")" << kTop << R"(" width=")" << plot_w << R"(" height=")" << plot_h
        << R"(" fill="none" stroke="#333333"/>)" << '\n';

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const std::string colour = series_colour(k, series.size());
        svg << R"(<polyline fill="none" stroke-width="1.5" stroke=")" << colour << R"(" points=")";
        bool first = true;
        for (std::size_t i = 0; i < s.frequency_hz.size(); ++i) {
            const double f = s.frequency_hz[i];
            if (f < options.f_min || f > options.f_max || !std::isfinite(s.magnitude_db[i])) continue;
            if (!first) svg << ' ';
            svg << fixed(px(f), 2) << ',' << fixed(py(s.magnitude_db[i]), 2);
            first = false;
        }
        svg << R"("/>)" << '\n';

        const double ly = kTop + 10.0 + 18.0 * static_cast<double>(k);
        const double lx = kLeft + plot_w + 15.0;
        svg << R"(<line x1=")" << lx << R"(" y1=")" << ly << R"(" x2=")" << lx + 24 << R"(" y2=")" << ly
            << R"(" stroke-width="2" stroke=")" << colour << R"("/>)" << '\n';
        svg << R"(<text x=")" << lx + 30 << R"(" y=")" << ly + 4 << R"(">)" << escape_xml(s.label) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    static std::atomic<unsigned> counter{0};
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::system_error(errno, std::generic_category(), "cannot open " + tmp.string());
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            const int err = errno;
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw std::system_error(err, std::generic_category(), "cannot write " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        throw std::filesystem::filesystem_error("cannot rename into place", tmp, path, ec);
    }
}

}  // namespace tonestack::output
