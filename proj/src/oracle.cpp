#include "tonestack/oracle.hpp"

#include "tonestack/errors.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>

namespace tonestack::oracle {

namespace {

enum Node : int { kSrc, kIn, kA, kTop, kOut, kBottom, kMidTop, kWiperM, kGround, kNodeCount };

constexpr std::array<const char*, kNodeCount> kNodeNames{"src", "in", "a", "top", "out", "bottom", "mid_top",
                                                         "wiper_m", "ground"};

struct Element {
    int from;
    int to;
    std::optional<Complex> admittance;  // nullopt == ideal short
};

Element resistor(int from, int to, double ohms) {
    if (ohms == 0.0) return {from, to, std::nullopt};
    return {from, to, Complex(1.0 / ohms, 0.0)};
}

Element capacitor(int from, int to, double farads, std::optional<double> frequency) {
    if (!frequency) return {from, to, std::nullopt};
    return {from, to, Complex(0.0, 2.0 * std::numbers::pi * *frequency * farads)};
}

struct Classes {
    std::array<int, kNodeCount> parent{};

    Classes() { std::iota(parent.begin(), parent.end(), 0); }

    int find(int n) {
        while (parent[n] != n) n = parent[n] = parent[parent[n]];
        return n;
    }
    void join(int a, int b) { parent[find(a)] = find(b); }
};

// frequency == nullopt: capacitors shorted.
NodalSystem assemble(const ToneStackComponents& comp, const ControlSettings& controls, std::optional<double> frequency,
                     double vin, const ModelOptions& options) {
    validate(options.loading);
    const double bass = bass_fraction(controls.bass(), options.bass_taper);
    const double t = controls.treble();
    const double m = controls.mid();

    std::vector<Element> elements{
        resistor(kSrc, kIn, options.loading.source_resistance),
        resistor(kIn, kA, comp.r1()),
        capacitor(kIn, kTop, comp.c1(), frequency),
        resistor(kTop, kOut, comp.rt() * t),
        resistor(kOut, kBottom, comp.rt() * (1.0 - t)),
        capacitor(kA, kBottom, comp.c2(), frequency),
        capacitor(kA, kWiperM, comp.c3(), frequency),
        resistor(kBottom, kMidTop, comp.rb() * bass),
        resistor(kMidTop, kWiperM, comp.rm() * m),
        resistor(kWiperM, kGround, comp.rm() * (1.0 - m)),
    };
    if (options.loading.loaded()) {
        elements.push_back(resistor(kOut, kGround, options.loading.load_resistance));
    }

    Classes classes;
    for (const auto& e : elements) {
        if (!e.admittance) classes.join(e.from, e.to);
    }
    const int src = classes.find(kSrc);
    const int gnd = classes.find(kGround);
    if (src == gnd) {
        throw SingularMatrix("source is shorted to ground");
    }

    std::array<int, kNodeCount> index{};
    index.fill(-1);
    NodalSystem sys;
    for (int n = 0; n < kNodeCount; ++n) {
        const int root = classes.find(n);
        if (root == src || root == gnd) continue;
        if (index[root] < 0) {
            index[root] = static_cast<int>(sys.unknowns.size());
            sys.unknowns.emplace_back(kNodeNames[n]);
        } else {
            sys.unknowns[index[root]] += std::string("+") + kNodeNames[n];
        }
    }

    const auto fixed_voltage = [&](int root) -> std::optional<Complex> {
        if (root == src) return Complex(vin, 0.0);
        if (root == gnd) return Complex(0.0, 0.0);
        return std::nullopt;
    };

    const auto n = static_cast<Eigen::Index>(sys.unknowns.size());
    sys.admittance = Eigen::MatrixXcd::Zero(n, n);
    sys.injection = Eigen::VectorXcd::Zero(n);
    for (const auto& e : elements) {
        if (!e.admittance) continue;
        const int p = classes.find(e.from);
        const int q = classes.find(e.to);
        if (p == q) continue;
        const Complex y = *e.admittance;
        const auto vp = fixed_voltage(p);
        const auto vq = fixed_voltage(q);
        if (!vp) sys.admittance(index[p], index[p]) += y;
        if (!vq) sys.admittance(index[q], index[q]) += y;
        if (!vp && !vq) {
            sys.admittance(index[p], index[q]) -= y;
            sys.admittance(index[q], index[p]) -= y;
        } else if (!vp) {
            sys.injection(index[p]) += y * *vq;
        } else if (!vq) {
            sys.injection(index[q]) += y * *vp;
        }
    }

    const int out = classes.find(kOut);
    if (const auto v = fixed_voltage(out)) {
        sys.output_fixed_voltage = *v;
    } else {
        sys.output_index = index[out];
    }
    return sys;
}

}  // namespace

NodalSystem assemble_nodal(const ToneStackComponents& components, const ControlSettings& controls, double frequency,
                           double vin, const ModelOptions& options) {
    if (!(std::isfinite(frequency) && frequency > 0.0)) {
        throw DomainError("frequency must be positive and finite");
    }
    return assemble(components, controls, frequency, vin, options);
}

NodalSystem assemble_shorted(const ToneStackComponents& components, const ControlSettings& controls, double vin,
                             const ModelOptions& options) {
    return assemble(components, controls, std::nullopt, vin, options);
}

Complex solve_output(const NodalSystem& system) {
    if (system.output_index < 0) return system.output_fixed_voltage;
    if (!system.admittance.allFinite() || !system.injection.allFinite()) {
        throw NumericalError("non-finite entry in nodal system");
    }
    const Eigen::FullPivLU<Eigen::MatrixXcd> lu(system.admittance);
    if (!lu.isInvertible()) {
        throw SingularMatrix("nodal admittance matrix is singular");
    }
    const Eigen::VectorXcd voltages = lu.solve(system.injection);
    return voltages(system.output_index);
}

Complex nodal_response(const ToneStackComponents& components, const ControlSettings& controls, double frequency,
                       double vin, const ModelOptions& options) {
    return solve_output(assemble_nodal(components, controls, frequency, vin, options));
}

double hf_limit(const ToneStackComponents& components, const ControlSettings& controls, double vin,
                const ModelOptions& options) {
    return std::abs(solve_output(assemble_shorted(components, controls, vin, options)));
}

ResponseCurve script_replica(const ToneStackComponents& components, const ControlSettings& controls, double vin) {
    const double r1 = components.r1();
    const double rt = components.rt();
    const double rm = components.rm();
    const double rb = components.rb();
    const double c1 = components.c1();
    const double c2 = components.c2();
    const double c3 = components.c3();
    const double t = controls.treble();
    const double m = controls.mid();
    const double b = controls.bass();

    const double rt1 = rt * t;
    const double rt2 = rt * (1 - t);
    const double rm1 = rm * m;
    const double rm2 = rm * (1 - m);
    const double rb1 = rb * b;

    const FrequencyGrid xspace = log_grid(0, 5, 50);
    const double pi = std::numbers::pi;

    ResponseCurve curve{controls, vin, SignConvention::PaperScript, OutputMode::MagnitudeSum, {}};
    for (const double F : xspace.points()) {
        const double Xc1 = 1 / (2 * pi * F * c1);
        const double Xc2 = 1 / (2 * pi * F * c2);
        const double Xc3 = 1 / (2 * pi * F * c3);

        const linalg::ComplexMatrix Y{
            {Complex(r1 + rm2, Xc3), -r1, Complex(0, -Xc3)},
            {-r1, Complex(rt1 + rt2 + r1, Xc2 + Xc1), Complex(0, -Xc2)},
            {Complex(0, -Xc3), Complex(0, -Xc2), Complex(rb1 + rm1, Xc2 + Xc3)},
        };
        const linalg::ComplexVector V{vin, 0, 0};
        linalg::ComplexVector I;
        try {
            I = linalg::multiply(linalg::invert(Y), V);
        } catch (const NumericalError& e) {
            throw NumericalError(std::string(e.what()) + " at " + std::to_string(F) + " Hz", F);
        }

        const double Vrm2 = rm2 * std::abs(I[0]);
        const double Vrt2 = rt2 * std::abs(I[1]);
        const double Vrb_rm1 = (rb1 + rm1) * std::abs(I[2]);
        const double VTotal = Vrm2 + Vrt2 + Vrb_rm1;
        curve.points.push_back({F, Complex(VTotal, 0), 20 * std::log10(VTotal / vin), 0.0});
    }
    return curve;
}

}  // namespace tonestack::oracle
