#pragma once

#include "tonestack/circuit_model.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace tonestack {

enum class OutputMode {
    ComplexSum,    ///< phasor sum of the branch voltages below the treble wiper
    MagnitudeSum,  ///< sum of branch-voltage magnitudes (reference script); phase discarded
};

enum class Control { Bass, Mid, Treble };

std::string_view to_string(Control control) noexcept;

/// Strictly increasing list of positive frequencies in Hz.
class FrequencyGrid {
public:
    FrequencyGrid() = default;
    /// Throws DomainError unless the points are finite, positive and strictly increasing.
    explicit FrequencyGrid(std::vector<double> points);

    [[nodiscard]] std::span<const double> points() const noexcept { return points_; }
    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    double operator[](std::size_t i) const { return points_[i]; }

private:
    std::vector<double> points_;
};

/// n points from 10^exp_min to 10^exp_max, evenly spaced in the exponent
/// (same construction as MATLAB/numpy logspace; the last exponent is exact).
FrequencyGrid log_grid(double exp_min, double exp_max, std::size_t n);

struct ResponsePoint {
    double frequency = 0.0;   ///< Hz
    Complex vout;             ///< V
    double magnitude_db = 0.0;
    double phase_deg = 0.0;   ///< in (-180, 180]; always 0 in MagnitudeSum mode

    friend bool operator==(const ResponsePoint&, const ResponsePoint&) = default;
};

struct ResponseCurve {
    ControlSettings controls;
    double vin = 5.0;
    SignConvention convention = SignConvention::Physical;
    OutputMode mode = OutputMode::ComplexSum;
    std::vector<ResponsePoint> points;

    /// False for MagnitudeSum curves, whose phase column is identically zero.
    [[nodiscard]] bool phase_defined() const noexcept { return mode == OutputMode::ComplexSum; }
};

/// Voltage at the treble wiper:
///   ComplexSum:   rm2*I1 + rt2*I2 + (rb1 + rm1)*I3
///   MagnitudeSum: rm2*|I1| + rt2*|I2| + (rb1 + rm1)*|I3|  (as a real-valued complex)
Complex output_voltage(const LoopCurrents& currents, const WiperResistances& wipers, OutputMode mode);

/// Thevenin impedance seen from the treble wiper to ground with the input
/// source shorted, computed on the same three-loop system (a unit test
/// current injected along the output branch path).
Complex output_impedance(const MeshSystem& system, const WiperResistances& wipers);

/// 20*log10(|vout| / |vin|)
double to_db(Complex vout, double vin);

/// Angle of vout in degrees, mapped into (-180, 180].
double phase_degrees(Complex vout);

ResponsePoint evaluate(const ToneStackComponents& components, const ControlSettings& controls, double frequency,
                       double vin, const ModelOptions& options, OutputMode mode);

/// Build, solve and measure every grid frequency in order. NumericalError
/// (including SingularMatrix) propagates with the offending frequency.
ResponseCurve frequency_response(const ToneStackComponents& components, const ControlSettings& controls,
                                 const FrequencyGrid& grid, double vin, const ModelOptions& options,
                                 OutputMode mode = OutputMode::ComplexSum);

ResponseCurve frequency_response(const ToneStackComponents& components, const ControlSettings& controls,
                                 const FrequencyGrid& grid, double vin, SignConvention convention,
                                 OutputMode mode = OutputMode::ComplexSum);

/// Control positions 0, step, 2*step, ... with the last one clamped to 1.
/// Throws DomainError unless 0 < step <= 1.
std::vector<double> sweep_positions(double step);

ControlSettings with_control(const ControlSettings& fixed, Control which, double position);

std::vector<ResponseCurve> parameter_sweep(const ToneStackComponents& components, Control which,
                                           const ControlSettings& fixed, double step, const FrequencyGrid& grid,
                                           double vin, const ModelOptions& options,
                                           OutputMode mode = OutputMode::ComplexSum);

/// Depth in dB of the deepest interior local minimum of magnitude_db whose
/// frequency lies in [f_lo, f_hi], measured against the lower of the two
/// maxima on either side of it. nullopt when there is no such minimum.
std::optional<double> scoop_depth(const ResponseCurve& curve, double f_lo, double f_hi);

}  // namespace tonestack
