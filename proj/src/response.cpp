#include "tonestack/response.hpp"

#include "tonestack/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace tonestack {

std::string_view to_string(Control control) noexcept {
    switch (control) {
        case Control::Bass:
            return "bass";
        case Control::Mid:
            return "mid";
        case Control::Treble:
            return "treble";
    }
    return "unknown";
}

FrequencyGrid::FrequencyGrid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.empty()) {
        throw DomainError("frequency grid is empty");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const double f = points_[i];
        if (!(std::isfinite(f) && f > 0.0)) {
            throw DomainError("frequency grid point " + std::to_string(i) + " is not positive and finite");
        }
        if (i > 0 && !(f > points_[i - 1])) {
            throw DomainError("frequency grid is not strictly increasing at index " + std::to_string(i));
        }
    }
}

FrequencyGrid log_grid(double exp_min, double exp_max, std::size_t n) {
    if (!(std::isfinite(exp_min) && std::isfinite(exp_max) && exp_min < exp_max)) {
        throw DomainError("log grid requires finite exponents with exp_min < exp_max");
    }
    if (n < 2) {
        throw DomainError("log grid requires at least 2 points");
    }
    const double span = exp_max - exp_min;
    const double last = static_cast<double>(n - 1);
    std::vector<double> points(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        points[i] = std::pow(10.0, exp_min + static_cast<double>(i) * span / last);
    }
    points[n - 1] = std::pow(10.0, exp_max);
    return FrequencyGrid(std::move(points));
}

Complex output_voltage(const LoopCurrents& currents, const WiperResistances& wipers, OutputMode mode) {
    const double lower = wipers.rb1 + wipers.rm1;
    if (mode == OutputMode::MagnitudeSum) {
        return {wipers.rm2 * std::abs(currents.i1) + wipers.rt2 * std::abs(currents.i2) +
                    lower * std::abs(currents.i3),
                0.0};
    }
    return wipers.rm2 * currents.i1 + wipers.rt2 * currents.i2 + lower * currents.i3;
}

Complex output_impedance(const MeshSystem& system, const WiperResistances& wipers) {
    // The injected current runs wiper -> Rt2 -> Rb1 -> Rm1 -> Rm2 -> ground,
    // sharing Rm2 with loop 1, Rt2 with loop 2 and Rb1 + Rm1 with loop 3.
    const linalg::ComplexVector shared{wipers.rm2, wipers.rt2, wipers.rb1 + wipers.rm1};
    linalg::ComplexVector rhs(3);
    for (std::size_t k = 0; k < 3; ++k) rhs[k] = -shared[k];
    const LoopCurrents loops = solve_mesh(MeshSystem{system.z, rhs, system.frequency});
    const Complex injected = 1.0;
    return shared[0] * (loops.i1 + injected) + shared[1] * (loops.i2 + injected) +
           shared[2] * (loops.i3 + injected);
}

double to_db(Complex vout, double vin) { return 20.0 * std::log10(std::abs(vout) / std::abs(vin)); }

double phase_degrees(Complex vout) {
    double deg = std::arg(vout) * 180.0 / std::numbers::pi;
    if (deg <= -180.0) deg += 360.0;
    return deg;
}

ResponsePoint evaluate(const ToneStackComponents& components, const ControlSettings& controls, double frequency,
                       double vin, const ModelOptions& options, OutputMode mode) {
    const MeshSystem system = build_mesh_system(components, controls, frequency, vin, options);
    const WiperResistances wipers = wiper_resistances(components, controls, options.bass_taper);
    Complex vout = output_voltage(solve_mesh(system), wipers, mode);

    if (options.loading.loaded()) {
        const double load = options.loading.load_resistance;
        const Complex divider = load / (load + output_impedance(system, wipers));
        vout *= mode == OutputMode::ComplexSum ? divider : Complex(std::abs(divider));
    }

    return {
        .frequency = frequency,
        .vout = vout,
        .magnitude_db = to_db(vout, vin),
        .phase_deg = mode == OutputMode::ComplexSum ? phase_degrees(vout) : 0.0,
    };
}

ResponseCurve frequency_response(const ToneStackComponents& components, const ControlSettings& controls,
                                 const FrequencyGrid& grid, double vin, const ModelOptions& options,
                                 OutputMode mode) {
    ResponseCurve curve{controls, vin, options.convention, mode, {}};
    curve.points.reserve(grid.size());
    for (const double f : grid.points()) {
        curve.points.push_back(evaluate(components, controls, f, vin, options, mode));
    }
    return curve;
}

ResponseCurve frequency_response(const ToneStackComponents& components, const ControlSettings& controls,
                                 const FrequencyGrid& grid, double vin, SignConvention convention,
                                 OutputMode mode) {
    return frequency_response(components, controls, grid, vin, ModelOptions{.convention = convention}, mode);
}

std::vector<double> sweep_positions(double step) {
    if (!(step > 0.0 && step <= 1.0)) {
        throw DomainError("sweep step must satisfy 0 < step <= 1");
    }
    // Tolerate representation error in steps such as 0.1 so that 1/step
    // lands on the intended count.
    const auto intervals = static_cast<std::size_t>(std::ceil(1.0 / step - 1e-9));
    std::vector<double> positions;
    positions.reserve(intervals + 1);
    for (std::size_t k = 0; k < intervals; ++k) {
        positions.push_back(static_cast<double>(k) * step);
    }
    positions.push_back(1.0);
    return positions;
}

ControlSettings with_control(const ControlSettings& fixed, Control which, double position) {
    switch (which) {
        case Control::Bass:
            return {fixed.treble(), fixed.mid(), position};
        case Control::Mid:
            return {fixed.treble(), position, fixed.bass()};
        case Control::Treble:
            return {position, fixed.mid(), fixed.bass()};
    }
    return fixed;
}

std::vector<ResponseCurve> parameter_sweep(const ToneStackComponents& components, Control which,
                                           const ControlSettings& fixed, double step, const FrequencyGrid& grid,
                                           double vin, const ModelOptions& options, OutputMode mode) {
    std::vector<ResponseCurve> curves;
    for (const double position : sweep_positions(step)) {
        curves.push_back(frequency_response(components, with_control(fixed, which, position), grid, vin, options, mode));
    }
    return curves;
}

std::optional<double> scoop_depth(const ResponseCurve& curve, double f_lo, double f_hi) {
    const auto& pts = curve.points;
    std::optional<double> best;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        const double f = pts[i].frequency;
        if (f < f_lo || f > f_hi) continue;
        const double db = pts[i].magnitude_db;
        if (!(db <= pts[i - 1].magnitude_db && db <= pts[i + 1].magnitude_db)) continue;

        double left = pts[0].magnitude_db;
        for (std::size_t k = 0; k < i; ++k) left = std::max(left, pts[k].magnitude_db);
        double right = pts[i + 1].magnitude_db;
        for (std::size_t k = i + 1; k < pts.size(); ++k) right = std::max(right, pts[k].magnitude_db);

        const double depth = std::min(left, right) - db;
        if (!best || depth > *best) best = depth;
    }
    return best;
}

}  // namespace tonestack
