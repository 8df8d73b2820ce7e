#include "tonestack/circuit_model.hpp"

#include "tonestack/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace tonestack {

namespace {

void require_positive(double value, const char* name) {
    if (!(std::isfinite(value) && value > 0.0)) {
        throw DomainError(std::string(name) + " must be positive and finite, got " + std::to_string(value));
    }
}

void require_fraction(double value, const char* name) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw DomainError(std::string(name) + " must lie in [0, 1], got " + std::to_string(value));
    }
}

}  // namespace

ToneStackComponents::ToneStackComponents(const ComponentValues& values) : values_(values) {
    require_positive(values.r1, "r1");
    require_positive(values.rt, "rt");
    require_positive(values.rm, "rm");
    require_positive(values.rb, "rb");
    require_positive(values.c1, "c1");
    require_positive(values.c2, "c2");
    require_positive(values.c3, "c3");
}

ControlSettings::ControlSettings(double treble, double mid, double bass) : t_(treble), m_(mid), b_(bass) {
    require_fraction(treble, "treble (t)");
    require_fraction(mid, "mid (m)");
    require_fraction(bass, "bass (b)");
}

void validate(const Loading& loading) {
    if (!(std::isfinite(loading.source_resistance) && loading.source_resistance >= 0.0)) {
        throw DomainError("source resistance must be non-negative and finite");
    }
    if (!(std::isfinite(loading.load_resistance) && loading.load_resistance >= 0.0)) {
        throw DomainError("load resistance must be non-negative and finite (0 = unloaded)");
    }
}

double bass_fraction(double bass, BassTaper taper) {
    switch (taper) {
        case BassTaper::Linear:
            return bass;
        case BassTaper::Audio:
            return (std::pow(10.0, 2.0 * bass) - 1.0) / 99.0;
    }
    return bass;
}

WiperResistances wiper_resistances(const ToneStackComponents& components, const ControlSettings& controls,
                                   BassTaper taper) {
    const double t = controls.treble();
    const double m = controls.mid();
    return {
        .rt1 = components.rt() * t,
        .rt2 = components.rt() * (1.0 - t),
        .rm1 = components.rm() * m,
        .rm2 = components.rm() * (1.0 - m),
        .rb1 = components.rb() * bass_fraction(controls.bass(), taper),
    };
}

double capacitive_reactance(double frequency, double capacitance) {
    require_positive(frequency, "frequency");
    require_positive(capacitance, "capacitance");
    return 1.0 / (2.0 * std::numbers::pi * frequency * capacitance);
}

Complex capacitor_impedance(double frequency, double capacitance) {
    return {0.0, -capacitive_reactance(frequency, capacitance)};
}

LoopCurrents LoopCurrents::from(const linalg::ComplexVector& solution) {
    if (solution.size() != 3) {
        throw DimensionMismatch("loop current vector must have 3 entries");
    }
    return {solution[0], solution[1], solution[2]};
}

MeshSystem build_mesh_system(const ToneStackComponents& components, const ControlSettings& controls, double frequency,
                             double vin, SignConvention convention) {
    return build_mesh_system(components, controls, frequency, vin, ModelOptions{.convention = convention});
}

MeshSystem build_mesh_system(const ToneStackComponents& components, const ControlSettings& controls, double frequency,
                             double vin, const ModelOptions& options) {
    if (!(std::isfinite(vin) && vin != 0.0)) {
        throw DomainError("vin must be finite and nonzero");
    }
    validate(options.loading);

    const double xc1 = capacitive_reactance(frequency, components.c1());
    const double xc2 = capacitive_reactance(frequency, components.c2());
    const double xc3 = capacitive_reactance(frequency, components.c3());
    const WiperResistances w = wiper_resistances(components, controls, options.bass_taper);
    const double r1 = components.r1();

    // Self terms carry +Zc, mutual terms -Zc. Physical: Zc = -j*Xc. The
    // reference script writes +j*Xc on the diagonal and -j*Xc off it, which
    // is the same structure with Zc = +j*Xc.
    const double zc_sign = options.convention == SignConvention::Physical ? -1.0 : 1.0;

    MeshSystem sys{linalg::ComplexMatrix(3), linalg::ComplexVector{vin, 0.0, 0.0}, frequency};
    auto& z = sys.z;
    z(0, 0) = Complex(r1 + w.rm2 + options.loading.source_resistance, zc_sign * xc3);
    z(0, 1) = -r1;
    z(0, 2) = Complex(0.0, -zc_sign * xc3);
    z(1, 0) = -r1;
    z(1, 1) = Complex(w.rt1 + w.rt2 + r1, zc_sign * (xc2 + xc1));
    z(1, 2) = Complex(0.0, -zc_sign * xc2);
    z(2, 0) = Complex(0.0, -zc_sign * xc3);
    z(2, 1) = Complex(0.0, -zc_sign * xc2);
    z(2, 2) = Complex(w.rb1 + w.rm1, zc_sign * (xc2 + xc3));
    return sys;
}

LoopCurrents solve_mesh(const MeshSystem& system) {
    try {
        return LoopCurrents::from(linalg::solve_elimination(system.z, system.v));
    } catch (const SingularMatrix& e) {
        throw SingularMatrix(std::string(e.what()) + " at " + std::to_string(system.frequency) + " Hz",
                             system.frequency);
    } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " at " + std::to_string(system.frequency) + " Hz",
                             system.frequency);
    }
}

}  // namespace tonestack
