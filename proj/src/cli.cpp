#include "tonestack/cli.hpp"

#include "tonestack/errors.hpp"
#include "tonestack/netlist.hpp"
#include "tonestack/oracle.hpp"
#include "tonestack/output.hpp"
#include "tonestack/response.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <system_error>

namespace tonestack::cli {

namespace {

namespace fs = std::filesystem;

/// Input problem already rendered for the user.
struct InputError {
    std::string message;
};

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
};

netlist::ConfigDocument load_config(const CommonArgs& args) {
    netlist::ConfigDocument doc;
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path, std::ios::binary);
        if (!in) {
            throw InputError{"cannot read config '" + args.config_path + "': " +
                             std::error_code(errno, std::generic_category()).message()};
        }
        std::ostringstream text;
        text << in.rdbuf();
        try {
            doc = netlist::parse(text.str());
        } catch (const netlist::ParseFailure& e) {
            throw InputError{e.error().render(args.config_path)};
        }
    }
    for (std::size_t i = 0; i < args.overrides.size(); ++i) {
        try {
            netlist::apply_override(doc, args.overrides[i]);
        } catch (const netlist::ParseFailure& e) {
            throw InputError{e.error().render("--set[" + std::to_string(i + 1) + "] '" + args.overrides[i] + "'")};
        }
    }
    return doc;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("config", args.config_path, "Tone stack configuration file (defaults used when omitted)");
    cmd->add_option("-s,--set", args.overrides, "Override a config key, e.g. --set vin=10 (repeatable)");
}

void write_output(const fs::path& path, std::string_view contents) {
    try {
        output::write_file_atomic(path, contents);
    } catch (const std::system_error& e) {
        throw InputError{e.what()};
    }
}

std::string position_label(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", value);
    return buf;
}

int cmd_response(const CommonArgs& common, const std::string& out_path, const std::string& svg_path,
                 std::ostream& out) {
    const auto doc = load_config(common);
    const auto curve = frequency_response(doc.components, doc.controls, doc.grid.grid(), doc.vin,
                                          doc.model_options(), doc.mode);
    const std::string csv = output::to_csv(curve);
    if (out_path.empty() || out_path == "-") {
        out << csv;
    } else {
        write_output(out_path, csv);
    }
    if (!svg_path.empty()) {
        const std::string label = "t=" + position_label(doc.controls.treble()) + " m=" +
                                  position_label(doc.controls.mid()) + " b=" + position_label(doc.controls.bass());
        const std::vector<output::PlotSeries> series{output::to_series(curve, label)};
        write_output(svg_path, output::render_svg(series));
    }
    return kSuccess;
}

int cmd_sweep(const CommonArgs& common, const std::string& control_name, std::optional<double> step_arg,
              const std::string& out_dir, std::ostream& out) {
    auto doc = load_config(common);

    std::optional<Control> control;
    if (!control_name.empty()) {
        static const std::map<std::string, Control> kNames{
            {"bass", Control::Bass}, {"mid", Control::Mid}, {"treble", Control::Treble}};
        control = kNames.at(control_name);  // CLI11 has already checked the choice
    } else if (doc.sweep) {
        control = doc.sweep->control;
    }
    if (!control) {
        throw InputError{"no sweep control: pass --control or set 'sweep' in the config"};
    }
    const double step = step_arg ? *step_arg : (doc.sweep ? doc.sweep->step : 0.1);

    std::vector<double> positions;
    try {
        positions = sweep_positions(step);
    } catch (const DomainError& e) {
        throw InputError{e.what()};
    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw InputError{"cannot create output directory '" + out_dir + "': " + ec.message()};
    }

    const auto grid = doc.grid.grid();
    const auto options = doc.model_options();
    std::vector<std::future<ResponseCurve>> pending;
    for (const double position : positions) {
        pending.push_back(std::async(std::launch::async, [&, position] {
            return frequency_response(doc.components, with_control(doc.controls, *control, position), grid, doc.vin,
                                      options, doc.mode);
        }));
    }
    std::vector<ResponseCurve> curves;
    for (auto& f : pending) curves.push_back(f.get());

    const std::string name(to_string(*control));
    std::vector<output::PlotSeries> series;
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const std::string label = position_label(positions[i]);
        const fs::path file = fs::path(out_dir) / (name + "_" + label + ".csv");
        write_output(file, output::to_csv(curves[i]));
        out << file.string() << '\n';
        series.push_back(output::to_series(curves[i], name + " = " + label));
    }
    output::PlotOptions plot;
    plot.title = "Modelled response, " + name + " swept";
    const fs::path svg = fs::path(out_dir) / (name + "_sweep.svg");
    write_output(svg, output::render_svg(series, plot));
    out << svg.string() << '\n';
    return kSuccess;
}

int cmd_compare(const CommonArgs& common, int density, double tolerance, std::ostream& out) {
    const auto doc = load_config(common);
    if (density < 1) {
        throw InputError{"--grid-density must be at least 1"};
    }
    if (!(tolerance >= 0.0)) {
        throw InputError{"--tolerance must be non-negative"};
    }

    std::vector<double> positions;
    if (density == 1) {
        positions.push_back(-1.0);  // use the config's own setting
    } else {
        for (int k = 0; k < density; ++k) positions.push_back(static_cast<double>(k) / (density - 1));
    }

    // The comparison is always physical phasor output; loading and taper follow the config.
    auto options = doc.model_options();
    options.convention = SignConvention::Physical;
    const auto grid = doc.grid.grid();

    struct Worst {
        double deviation = -1.0;
        double frequency = 0.0;
        ControlSettings controls;
    } worst;

    out << std::setprecision(3);
    for (const double t : positions) {
        for (const double m : positions) {
            for (const double b : positions) {
                const ControlSettings controls = density == 1 ? doc.controls : ControlSettings(t, m, b);
                double setting_max = -1.0;
                double setting_f = 0.0;
                for (const double f : grid.points()) {
                    const Complex mesh =
                        evaluate(doc.components, controls, f, doc.vin, options, OutputMode::ComplexSum).vout;
                    const Complex nodal = oracle::nodal_response(doc.components, controls, f, doc.vin, options);
                    const double denom = std::abs(nodal);
                    const double dev = denom > 0.0 ? std::abs(mesh - nodal) / denom
                                                   : (std::abs(mesh) == 0.0 ? 0.0 : HUGE_VAL);
                    if (dev > setting_max) {
                        setting_max = dev;
                        setting_f = f;
                    }
                }
                out << "t=" << position_label(controls.treble()) << " m=" << position_label(controls.mid())
                    << " b=" << position_label(controls.bass()) << " max_rel_dev=" << std::scientific << setting_max
                    << " at f=" << std::defaultfloat << setting_f << " Hz\n";
                if (setting_max > worst.deviation) worst = {setting_max, setting_f, controls};
            }
        }
    }

    const auto describe = [&] {
        std::ostringstream s;
        s << std::setprecision(3) << std::scientific << worst.deviation << std::defaultfloat
          << " at (f=" << worst.frequency << " Hz, t=" << worst.controls.treble() << ", m=" << worst.controls.mid()
          << ", b=" << worst.controls.bass() << ")";
        return s.str();
    };
    if (worst.deviation > tolerance) {
        out << "FAIL: max relative deviation " << describe() << " exceeds tolerance " << tolerance << '\n';
        return kComparisonFailure;
    }
    out << "OK: max relative deviation " << describe() << " within tolerance " << tolerance << '\n';
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fender 5F6-A tone stack frequency-response tool", "tonestack"};
    app.require_subcommand(1);

    CommonArgs response_args;
    std::string response_out;
    std::string response_svg;
    auto* response = app.add_subcommand("response", "Frequency response of a single control setting as CSV");
    add_common(response, response_args);
    response->add_option("-o,--out", response_out, "CSV output path ('-' or omitted: stdout)");
    response->add_option("--svg", response_svg, "Also write an SVG plot here");

    CommonArgs sweep_args;
    std::string sweep_control;
    std::optional<double> sweep_step;
    std::string sweep_dir;
    auto* sweep = app.add_subcommand("sweep", "Sweep one control from 0 to 1, one CSV per position plus an SVG");
    add_common(sweep, sweep_args);
    sweep->add_option("--control", sweep_control, "Control to sweep")
        ->check(CLI::IsMember({"bass", "mid", "treble"}));
    sweep->add_option("--step", sweep_step, "Position step in (0, 1]");
    sweep->add_option("-o,--out-dir", sweep_dir, "Output directory")->required();

    CommonArgs compare_args;
    int density = 5;
    double tolerance = 1e-6;
    auto* compare = app.add_subcommand("compare", "Check the mesh solution against the nodal-analysis oracle");
    add_common(compare, compare_args);
    compare->add_option("--grid-density", density, "Control positions per axis (N gives N^3 settings)")
        ->capture_default_str();
    compare->add_option("--tolerance", tolerance, "Maximum allowed relative deviation")->capture_default_str();

    std::vector<std::string> argv_rest(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(argv_rest.begin(), argv_rest.end());
    try {
        app.parse(argv_rest);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }

    try {
        if (*response) return cmd_response(response_args, response_out, response_svg, out);
        if (*sweep) return cmd_sweep(sweep_args, sweep_control, sweep_step, sweep_dir, out);
        if (*compare) return cmd_compare(compare_args, density, tolerance, out);
    } catch (const InputError& e) {
        err << "error: " << e.message << '\n';
        return kInputError;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}

}  // namespace tonestack::cli
