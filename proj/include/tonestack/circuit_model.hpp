#pragma once

// Circuit domain types for the Fender 5F6-A (Bassman) tone stack and the
// per-frequency three-loop mesh impedance system.
//
// Loop layout (all loops share one orientation, so every mutual term is
// negative):
//   loop 1: Vin -> R1 -> C3 -> Rm2 (mid wiper to ground) -> back to Vin
//   loop 2: C1 -> Rt (whole treble pot) -> C2 -> R1
//   loop 3: C2 -> Rb1 (bass rheostat) -> Rm1 (mid, bass side) -> C3
// The output is the treble wiper; its voltage to ground is the drop across
// Rt2 + Rb1 + Rm1 + Rm2 along the bottom of the network.

#include "tonestack/linalg.hpp"

#include <complex>

namespace tonestack {

using Complex = std::complex<double>;

enum class SignConvention {
    Physical,     ///< capacitor impedance -j*Xc everywhere
    PaperScript,  ///< +j*Xc on the diagonal, -j*Xc off it (reference script compatibility)
};

enum class BassTaper {
    Linear,  ///< rb1 = rb * b
    Audio,   ///< rb1 = rb * (10^(2b) - 1) / 99
};

/// Raw component values in ohm / farad. Defaults are the 5F6-A values.
struct ComponentValues {
    double r1 = 56e3;
    double rt = 220e3;
    double rm = 25e3;
    double rb = 1e6;
    double c1 = 220e-12;
    double c2 = 0.022e-6;
    double c3 = 0.022e-6;

    friend bool operator==(const ComponentValues&, const ComponentValues&) = default;
};

/// Validated component set; every value strictly positive and finite.
class ToneStackComponents {
public:
    ToneStackComponents() = default;
    /// Throws DomainError naming the first offending component.
    explicit ToneStackComponents(const ComponentValues& values);

    [[nodiscard]] const ComponentValues& values() const noexcept { return values_; }
    [[nodiscard]] double r1() const noexcept { return values_.r1; }
    [[nodiscard]] double rt() const noexcept { return values_.rt; }
    [[nodiscard]] double rm() const noexcept { return values_.rm; }
    [[nodiscard]] double rb() const noexcept { return values_.rb; }
    [[nodiscard]] double c1() const noexcept { return values_.c1; }
    [[nodiscard]] double c2() const noexcept { return values_.c2; }
    [[nodiscard]] double c3() const noexcept { return values_.c3; }

    friend bool operator==(const ToneStackComponents&, const ToneStackComponents&) = default;

private:
    ComponentValues values_{};
};

/// Wiper positions t (treble), m (mid), b (bass), each in [0, 1].
/// t = 1 is maximum treble cut, m = 1 maximum mid cut, b = 0 maximum bass cut.
/// The default is the reference setting t = 0, m = 0, b = 1.
class ControlSettings {
public:
    ControlSettings() = default;
    /// Throws DomainError if any position lies outside [0, 1] or is NaN.
    ControlSettings(double treble, double mid, double bass);

    [[nodiscard]] double treble() const noexcept { return t_; }
    [[nodiscard]] double mid() const noexcept { return m_; }
    [[nodiscard]] double bass() const noexcept { return b_; }

    friend bool operator==(const ControlSettings&, const ControlSettings&) = default;

private:
    double t_ = 0.0;
    double m_ = 0.0;
    double b_ = 1.0;
};

/// Optional driving-source and output loading. Zero source resistance and no
/// load resistance give the bare network.
struct Loading {
    double source_resistance = 0.0;  ///< series with Vin, ohm
    double load_resistance = 0.0;    ///< wiper to ground, ohm; 0 means unloaded

    [[nodiscard]] bool loaded() const noexcept { return load_resistance > 0.0; }

    /// 1 kOhm cathode-follower source, 1 MOhm phase-splitter load.
    static Loading amplifier_context() noexcept { return {1e3, 1e6}; }

    friend bool operator==(const Loading&, const Loading&) = default;
};

void validate(const Loading& loading);

struct ModelOptions {
    SignConvention convention = SignConvention::Physical;
    BassTaper bass_taper = BassTaper::Linear;
    Loading loading{};

    friend bool operator==(const ModelOptions&, const ModelOptions&) = default;
};

struct WiperResistances {
    double rt1 = 0.0;  ///< treble pot, top to wiper (rt * t)
    double rt2 = 0.0;  ///< treble pot, wiper to bottom (rt * (1 - t))
    double rm1 = 0.0;  ///< mid pot, bass side (rm * m)
    double rm2 = 0.0;  ///< mid pot, ground side (rm * (1 - m))
    double rb1 = 0.0;  ///< bass rheostat (rb * b')
};

/// Rheostat fraction for a bass knob position under the given taper.
double bass_fraction(double bass, BassTaper taper);

WiperResistances wiper_resistances(const ToneStackComponents& components, const ControlSettings& controls,
                                   BassTaper taper = BassTaper::Linear);

/// 1 / (2 pi f C). Throws DomainError for non-positive or non-finite input.
double capacitive_reactance(double frequency, double capacitance);

/// 1 / (j w C) = -j * Xc.
Complex capacitor_impedance(double frequency, double capacitance);

struct MeshSystem {
    linalg::ComplexMatrix z;  ///< 3x3 loop impedance matrix, ohm
    linalg::ComplexVector v;  ///< (Vin, 0, 0)
    double frequency = 0.0;   ///< Hz
};

struct LoopCurrents {
    Complex i1;
    Complex i2;
    Complex i3;

    static LoopCurrents from(const linalg::ComplexVector& solution);
    [[nodiscard]] linalg::ComplexVector as_vector() const { return {i1, i2, i3}; }
};

MeshSystem build_mesh_system(const ToneStackComponents& components, const ControlSettings& controls, double frequency,
                             double vin, SignConvention convention = SignConvention::Physical);

/// As above; a non-zero source resistance adds to the loop 1 self impedance
/// (the source is only in loop 1).
MeshSystem build_mesh_system(const ToneStackComponents& components, const ControlSettings& controls, double frequency,
                             double vin, const ModelOptions& options);

/// Solves the mesh system by elimination; SingularMatrix and NumericalError
/// are rethrown with the system frequency attached.
LoopCurrents solve_mesh(const MeshSystem& system);

}  // namespace tonestack
