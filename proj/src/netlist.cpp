#include "tonestack/netlist.hpp"

#include "tonestack/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <set>
#include <string>
#include <system_error>
#include <vector>

namespace tonestack::netlist {

namespace {

enum class Quantity { Resistance, Capacitance, Voltage, Fraction, Plain };

struct Suffix {
    char symbol;
    int exponent;
};

constexpr std::array<Suffix, 7> kSuffixes{{
    {'p', -12}, {'n', -9}, {'u', -6}, {'m', -3}, {'\0', 0}, {'k', 3}, {'M', 6},
}};

[[noreturn]] void fail(std::size_t line, std::size_t column, std::string message, std::string_view token) {
    throw ParseFailure(ParseError{line, column, std::move(message), std::string(token)});
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

// Trims whitespace, advancing `column` past anything removed on the left.
std::string_view trim(std::string_view s, std::size_t& column) {
    while (!s.empty() && is_space(s.front())) {
        s.remove_prefix(1);
        ++column;
    }
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
    }
    return true;
}

const char* quantity_name(Quantity q) {
    switch (q) {
        case Quantity::Resistance:
            return "resistance";
        case Quantity::Capacitance:
            return "capacitance";
        case Quantity::Voltage:
            return "voltage";
        case Quantity::Fraction:
            return "control position";
        case Quantity::Plain:
            return "plain number";
    }
    return "value";
}

bool unit_allowed(Quantity q, std::string_view unit) {
    switch (q) {
        case Quantity::Resistance:
            return unit == "ohm" || unit == "Ohm" || unit == "\xCE\xA9";  // U+03A9
        case Quantity::Capacitance:
            return unit == "F";
        case Quantity::Voltage:
            return unit == "V";
        case Quantity::Fraction:
        case Quantity::Plain:
            return false;
    }
    return false;
}

// Re-reads `number` scaled by 10^shift as a single correctly rounded decimal.
double shift_decimal(std::string_view number, int shift, std::size_t line, std::size_t column) {
    std::string_view mantissa = number;
    int exponent = 0;
    if (const auto e = number.find_first_of("eE"); e != std::string_view::npos) {
        mantissa = number.substr(0, e);
        const auto exp_text = number.substr(e + 1);
        const char* begin = exp_text.data();
        if (!exp_text.empty() && exp_text.front() == '+') ++begin;
        const auto [ptr, ec] = std::from_chars(begin, exp_text.data() + exp_text.size(), exponent);
        if (ec != std::errc{} || ptr != exp_text.data() + exp_text.size()) {
            fail(line, column, "exponent out of range", number);
        }
    }
    const std::string scaled = std::string(mantissa) + "e" + std::to_string(exponent + shift);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(scaled.data(), scaled.data() + scaled.size(), value);
    if (ec != std::errc{} || ptr != scaled.data() + scaled.size() || !std::isfinite(value)) {
        fail(line, column, "number out of range", number);
    }
    return value;
}

double parse_number(std::string_view text, std::size_t line, std::size_t column, Quantity q) {
    if (text.empty()) {
        fail(line, column, "missing value", text);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc::result_out_of_range) {
        fail(line, column, "number out of range", text);
    }
    if (ec != std::errc{}) {
        fail(line, column, "malformed number", text);
    }
    const auto consumed = static_cast<std::size_t>(ptr - text.data());
    const std::string_view number = text.substr(0, consumed);
    if (!std::isfinite(value)) {
        fail(line, column, "number must be finite", text);
    }

    std::string_view rest = text.substr(consumed);
    std::size_t rest_column = column + consumed;

    if (starts_with_ci(rest, "meg")) {
        fail(line, rest_column,
             "ambiguous suffix '" + std::string(rest.substr(0, 3)) + "': suffixes are case-sensitive, use M for mega",
             rest);
    }
    if (!rest.empty() && (rest.front() == 'K' || rest.front() == 'U' || rest.front() == 'N' || rest.front() == 'P')) {
        const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(rest.front())));
        fail(line, rest_column,
             std::string("ambiguous suffix '") + rest.front() + "': suffixes are case-sensitive, use " + lower, rest);
    }

    int shift = 0;
    if (!rest.empty() && !unit_allowed(q, rest)) {
        const auto it = std::find_if(kSuffixes.begin(), kSuffixes.end(),
                                     [&](const Suffix& s) { return s.symbol != '\0' && s.symbol == rest.front(); });
        if (it != kSuffixes.end()) {
            if (q == Quantity::Plain) {
                fail(line, rest_column, "suffix not allowed here", rest);
            }
            shift = it->exponent;
            rest.remove_prefix(1);
            ++rest_column;
        }
    }
    if (!rest.empty() && !unit_allowed(q, rest)) {
        if (std::isalpha(static_cast<unsigned char>(rest.front())) || static_cast<unsigned char>(rest.front()) >= 0x80) {
            fail(line, rest_column,
                 "unknown suffix or unit '" + std::string(rest) + "' for " + quantity_name(q), rest);
        }
        fail(line, column, "malformed number", text);
    }

    if (shift != 0) value = shift_decimal(number, shift, line, column);

    switch (q) {
        case Quantity::Resistance:
        case Quantity::Capacitance:
            if (!(value > 0.0)) fail(line, column, std::string(quantity_name(q)) + " must be positive", text);
            break;
        case Quantity::Voltage:
            if (value == 0.0) fail(line, column, "vin must be nonzero", text);
            break;
        case Quantity::Fraction:
            if (!(value >= 0.0 && value <= 1.0)) {
                fail(line, column, "control position out of range [0, 1]", text);
            }
            break;
        case Quantity::Plain:
            break;
    }
    return value;
}

struct Assignment {
    std::string_view key;
    std::string_view value;
    std::size_t line;
    std::size_t key_column;
    std::size_t value_column;
};

template <typename Enum, std::size_t N>
Enum parse_keyword(const Assignment& a, const std::array<std::pair<std::string_view, Enum>, N>& table) {
    for (const auto& [name, e] : table) {
        if (a.value == name) return e;
    }
    std::string expected;
    for (const auto& [name, e] : table) {
        if (!expected.empty()) expected += " | ";
        expected += name;
    }
    fail(a.line, a.value_column, "invalid value for " + std::string(a.key) + ", expected " + expected, a.value);
}

constexpr std::array<std::pair<std::string_view, SignConvention>, 2> kConventions{{
    {"physical", SignConvention::Physical},
    {"paper_script", SignConvention::PaperScript},
}};
constexpr std::array<std::pair<std::string_view, OutputMode>, 2> kModes{{
    {"complex_sum", OutputMode::ComplexSum},
    {"magnitude_sum", OutputMode::MagnitudeSum},
}};
constexpr std::array<std::pair<std::string_view, BassTaper>, 2> kTapers{{
    {"linear", BassTaper::Linear},
    {"audio", BassTaper::Audio},
}};
constexpr std::array<std::pair<std::string_view, bool>, 2> kSwitches{{
    {"off", false},
    {"on", true},
}};
constexpr std::array<std::pair<std::string_view, Control>, 3> kControls{{
    {"bass", Control::Bass},
    {"mid", Control::Mid},
    {"treble", Control::Treble},
}};

template <typename Enum, std::size_t N>
std::string_view keyword_of(Enum e, const std::array<std::pair<std::string_view, Enum>, N>& table) {
    for (const auto& [name, value] : table) {
        if (value == e) return name;
    }
    return "?";
}

// Splits "a, b, c" into trimmed fields with their columns. An empty field
// reports the column of the comma before it so errors stay on the line.
std::vector<std::pair<std::string_view, std::size_t>> split_fields(std::string_view s, std::size_t column) {
    std::vector<std::pair<std::string_view, std::size_t>> fields;
    while (true) {
        const auto comma = s.find(',');
        std::size_t field_column = column;
        const auto field = trim(s.substr(0, comma), field_column);
        if (field.empty() && !fields.empty()) field_column = column - 1;
        fields.emplace_back(field, field_column);
        if (comma == std::string_view::npos) break;
        column += comma + 1;
        s.remove_prefix(comma + 1);
    }
    return fields;
}

GridSpec parse_grid(const Assignment& a) {
    constexpr std::string_view kHead = "logspace";
    std::string_view s = a.value;
    if (s.substr(0, kHead.size()) != kHead) {
        fail(a.line, a.value_column, "expected logspace(exp_min, exp_max, n)", a.value);
    }
    std::size_t column = a.value_column + kHead.size();
    s.remove_prefix(kHead.size());
    s = trim(s, column);
    if (s.empty() || s.front() != '(') {
        fail(a.line, s.empty() ? a.value_column : column, "expected '(' after logspace", a.value);
    }
    if (s.back() != ')') {
        fail(a.line, a.value_column + a.value.size() - 1, "expected ')' closing logspace", a.value);
    }
    const auto fields = split_fields(s.substr(1, s.size() - 2), column + 1);
    if (fields.size() != 3) {
        fail(a.line, column, "logspace takes exactly 3 arguments", s);
    }

    GridSpec spec;
    spec.exp_min = parse_number(fields[0].first, a.line, fields[0].second, Quantity::Plain);
    spec.exp_max = parse_number(fields[1].first, a.line, fields[1].second, Quantity::Plain);

    const auto [count_text, count_column] = fields[2];
    std::size_t count = 0;
    const auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
    if (count_text.empty() || ec != std::errc{} || ptr != count_text.data() + count_text.size()) {
        fail(a.line, count_column, "point count must be a non-negative integer", count_text);
    }
    spec.count = count;

    if (!(spec.exp_min < spec.exp_max)) {
        fail(a.line, fields[1].second, "logspace requires exp_min < exp_max", fields[1].first);
    }
    if (spec.count < 2) {
        fail(a.line, count_column, "logspace requires at least 2 points", count_text);
    }
    try {
        (void)spec.grid();
    } catch (const DomainError& e) {
        fail(a.line, a.value_column, std::string("invalid frequency grid: ") + e.what(), a.value);
    }
    return spec;
}

SweepSpec parse_sweep(const Assignment& a) {
    const auto fields = split_fields(a.value, a.value_column);
    if (fields.size() != 2) {
        fail(a.line, a.value_column, "expected sweep = <bass|mid|treble>, <step>", a.value);
    }
    const Assignment control_part{a.key, fields[0].first, a.line, a.key_column, fields[0].second};
    SweepSpec spec;
    spec.control = parse_keyword(control_part, kControls);
    spec.step = parse_number(fields[1].first, a.line, fields[1].second, Quantity::Fraction);
    if (!(spec.step > 0.0)) {
        fail(a.line, fields[1].second, "sweep step must be positive", fields[1].first);
    }
    return spec;
}

void assign(ConfigDocument& doc, const Assignment& a) {
    ComponentValues comp = doc.components.values();
    double t = doc.controls.treble();
    double m = doc.controls.mid();
    double b = doc.controls.bass();

    const auto number = [&](Quantity q) { return parse_number(a.value, a.line, a.value_column, q); };

    const std::string_view k = a.key;
    if (k == "r1") comp.r1 = number(Quantity::Resistance);
    else if (k == "rt") comp.rt = number(Quantity::Resistance);
    else if (k == "rm") comp.rm = number(Quantity::Resistance);
    else if (k == "rb") comp.rb = number(Quantity::Resistance);
    else if (k == "c1") comp.c1 = number(Quantity::Capacitance);
    else if (k == "c2") comp.c2 = number(Quantity::Capacitance);
    else if (k == "c3") comp.c3 = number(Quantity::Capacitance);
    else if (k == "t") t = number(Quantity::Fraction);
    else if (k == "m") m = number(Quantity::Fraction);
    else if (k == "b") b = number(Quantity::Fraction);
    else if (k == "vin") doc.vin = number(Quantity::Voltage);
    else if (k == "grid") doc.grid = parse_grid(a);
    else if (k == "convention") doc.convention = parse_keyword(a, kConventions);
    else if (k == "mode") doc.mode = parse_keyword(a, kModes);
    else if (k == "taper") doc.bass_taper = parse_keyword(a, kTapers);
    else if (k == "load_compat") doc.load_compat = parse_keyword(a, kSwitches);
    else if (k == "sweep") doc.sweep = parse_sweep(a);
    else fail(a.line, a.key_column, "unknown key '" + std::string(k) + "'", k);

    // Each field was range-checked above, so these cannot throw.
    doc.components = ToneStackComponents(comp);
    doc.controls = ControlSettings(t, m, b);
}

// Splits one physical line into key and value; nullopt for blank/comment lines.
std::optional<Assignment> lex_line(std::string_view text, std::size_t line) {
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    std::size_t column = 1;
    const auto content = trim(text, column);
    if (content.empty()) return std::nullopt;

    const auto eq = content.find('=');
    if (eq == std::string_view::npos) {
        fail(line, column, "expected 'key = value'", content);
    }
    std::size_t key_column = column;
    const auto key = trim(content.substr(0, eq), key_column);
    if (key.empty()) {
        fail(line, column + eq, "missing key before '='", content);
    }
    std::size_t value_column = column + eq + 1;
    const auto value = trim(content.substr(eq + 1), value_column);
    if (value.empty()) {
        fail(line, column + eq, "missing value after '='", content.substr(eq));
    }
    return Assignment{key, value, line, key_column, value_column};
}

}  // namespace

ModelOptions ConfigDocument::model_options() const {
    return {
        .convention = convention,
        .bass_taper = bass_taper,
        .loading = load_compat ? Loading::amplifier_context() : Loading{},
    };
}

std::string ParseError::render(std::string_view origin) const {
    return std::string(origin) + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message;
}

ParseFailure::ParseFailure(ParseError error) : std::runtime_error(error.message), error_(std::move(error)) {}

ConfigDocument parse(std::string_view source) {
    ConfigDocument doc;
    std::set<std::string, std::less<>> seen;
    std::size_t line = 0;
    while (!source.empty() || line == 0) {
        ++line;
        const auto newline = source.find('\n');
        const std::string_view text = source.substr(0, newline);
        source = newline == std::string_view::npos ? std::string_view{} : source.substr(newline + 1);

        const auto a = lex_line(text, line);
        if (!a) continue;

        if (a->key == "version") {
            if (!seen.empty()) {
                fail(line, a->key_column, "version must be the first assignment", a->key);
            }
            if (a->value != "1") {
                fail(line, a->value_column, "unsupported config version '" + std::string(a->value) + "'", a->value);
            }
            seen.emplace("version");
            continue;
        }
        if (seen.contains(a->key)) {
            fail(line, a->key_column, "duplicate key '" + std::string(a->key) + "'", a->key);
        }
        assign(doc, *a);
        seen.emplace(a->key);
    }
    return doc;
}

void apply_override(ConfigDocument& doc, std::string_view assignment) {
    const auto a = lex_line(assignment, 1);
    if (!a) {
        fail(1, 1, "empty override", assignment);
    }
    if (a->key == "version") {
        fail(1, a->key_column, "version cannot be overridden", a->key);
    }
    ConfigDocument updated = doc;
    assign(updated, *a);
    doc = std::move(updated);
}

std::string format_shortest(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

std::string format_engineering(double value) {
    if (value == 0.0 || !std::isfinite(value)) return format_shortest(value);

    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::scientific);
    const std::string_view sci(buf.data(), static_cast<std::size_t>(ptr - buf.data()));

    // sci looks like "-d.ddde+XX"
    const auto e = sci.find('e');
    std::string_view mantissa = sci.substr(0, e);
    int exponent = 0;
    {
        auto exp_text = sci.substr(e + 1);
        if (exp_text.front() == '+') exp_text.remove_prefix(1);
        std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
    }
    std::string sign;
    if (mantissa.front() == '-') {
        sign = "-";
        mantissa.remove_prefix(1);
    }
    std::string digits;
    for (const char c : mantissa) {
        if (c != '.') digits.push_back(c);
    }

    int eng = exponent >= 0 ? (exponent / 3) * 3 : -((-exponent + 2) / 3) * 3;
    eng = std::clamp(eng, -12, 6);
    const auto suffix = std::find_if(kSuffixes.begin(), kSuffixes.end(), [&](const Suffix& s) { return s.exponent == eng; });

    // Number of digits before the decimal point.
    const int point = exponent - eng + 1;
    const int ndigits = static_cast<int>(digits.size());
    std::string out = sign;
    if (point <= 0) {
        out += "0." + std::string(static_cast<std::size_t>(-point), '0') + digits;
    } else if (point >= ndigits) {
        out += digits + std::string(static_cast<std::size_t>(point - ndigits), '0');
    } else {
        out += digits.substr(0, static_cast<std::size_t>(point)) + "." + digits.substr(static_cast<std::size_t>(point));
    }
    if (suffix->symbol != '\0') out.push_back(suffix->symbol);
    return out;
}

std::string serialize(const ConfigDocument& doc) {
    const auto& c = doc.components;
    std::string out;
    const auto line = [&](std::string_view key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    };
    line("version", "1");
    line("r1", format_engineering(c.r1()));
    line("rt", format_engineering(c.rt()));
    line("rm", format_engineering(c.rm()));
    line("rb", format_engineering(c.rb()));
    line("c1", format_engineering(c.c1()));
    line("c2", format_engineering(c.c2()));
    line("c3", format_engineering(c.c3()));
    line("t", format_shortest(doc.controls.treble()));
    line("m", format_shortest(doc.controls.mid()));
    line("b", format_shortest(doc.controls.bass()));
    line("vin", format_engineering(doc.vin));
    line("grid", "logspace(" + format_shortest(doc.grid.exp_min) + ", " + format_shortest(doc.grid.exp_max) + ", " +
                     std::to_string(doc.grid.count) + ")");
    line("convention", std::string(keyword_of(doc.convention, kConventions)));
    line("mode", std::string(keyword_of(doc.mode, kModes)));
    line("taper", std::string(keyword_of(doc.bass_taper, kTapers)));
    line("load_compat", std::string(keyword_of(doc.load_compat, kSwitches)));
    if (doc.sweep) {
        line("sweep", std::string(keyword_of(doc.sweep->control, kControls)) + ", " + format_shortest(doc.sweep->step));
    }
    return out;
}

}  // namespace tonestack::netlist
