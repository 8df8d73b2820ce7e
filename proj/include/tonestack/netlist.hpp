#pragma once

// Tone stack configuration files.
//
//   # comment
//   version = 1            (optional, first assignment only)
//   r1 = 56k               resistances accept an optional ohm / Ohm / Ω unit
//   c1 = 220p              capacitances accept an optional F unit
//   t = 0                  wiper positions in [0, 1]
//   vin = 5                volts, optional V unit
//   grid = logspace(0, 5, 50)
//   convention = physical | paper_script
//   mode = complex_sum | magnitude_sum
//   taper = linear | audio
//   load_compat = off | on  (on: 1 kOhm source, 1 MOhm load)
//   sweep = bass, 0.1       (control, step)
//
// Engineering suffixes are case-sensitive: p n u m k M. "m" is milli and
// "M" is mega; "meg" and upper-case K/U/N/P are rejected as ambiguous.
// Missing keys keep their defaults, unknown or repeated keys are errors.

#include "tonestack/circuit_model.hpp"
#include "tonestack/response.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tonestack::netlist {

struct GridSpec {
    double exp_min = 0.0;
    double exp_max = 5.0;
    std::size_t count = 50;

    [[nodiscard]] FrequencyGrid grid() const { return log_grid(exp_min, exp_max, count); }
    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct SweepSpec {
    Control control = Control::Bass;
    double step = 0.1;
    friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct ConfigDocument {
    ToneStackComponents components;
    ControlSettings controls;
    GridSpec grid;
    double vin = 5.0;
    SignConvention convention = SignConvention::Physical;
    OutputMode mode = OutputMode::ComplexSum;
    BassTaper bass_taper = BassTaper::Linear;
    bool load_compat = false;
    std::optional<SweepSpec> sweep;

    [[nodiscard]] ModelOptions model_options() const;
    friend bool operator==(const ConfigDocument&, const ConfigDocument&) = default;
};

/// 1-based line and byte column of the offending token.
struct ParseError {
    std::size_t line = 0;
    std::size_t column = 0;
    std::string message;
    std::string token;

    /// "origin:line:col: message"
    [[nodiscard]] std::string render(std::string_view origin) const;
};

class ParseFailure : public std::runtime_error {
public:
    explicit ParseFailure(ParseError error);
    [[nodiscard]] const ParseError& error() const noexcept { return error_; }

private:
    ParseError error_;
};

/// Throws ParseFailure.
ConfigDocument parse(std::string_view source);

/// Applies one `key=value` assignment on top of an existing document, with
/// the same grammar and checks as a config line (reported as line 1).
/// Throws ParseFailure.
void apply_override(ConfigDocument& doc, std::string_view assignment);

/// Canonical text: fixed key order, every key present, component values and
/// vin with an engineering suffix putting the mantissa in [1, 1000).
/// parse(serialize(doc)) == doc exactly.
std::string serialize(const ConfigDocument& doc);

/// Shortest decimal for `value` using an engineering suffix (p..M) so that
/// the mantissa lies in [1, 1000) whenever the magnitude allows it.
std::string format_engineering(double value);

/// Shortest round-trip decimal.
std::string format_shortest(double value);

}  // namespace tonestack::netlist
