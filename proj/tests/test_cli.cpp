#include <catch2/catch_amalgamated.hpp>

#include "tonestack/cli.hpp"
#include "tonestack/netlist.hpp"
#include "tonestack/output.hpp"
#include "tonestack/response.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace tonestack;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "tonestack");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("tonestack-cli-" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path write(const std::string& name, const std::string& text) const {
        const auto p = path_ / name;
        std::ofstream(p) << text;
        return p;
    }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t count_with_extension(const fs::path& dir, const std::string& ext) {
    std::size_t n = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ext) ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("response writes the in-memory curve exactly", "[cli]") {
    const auto r = run({"response"});
    REQUIRE(r.code == cli::kSuccess);
    const auto rows = output::read_csv(r.out);
    CHECK(rows.size() == 50);

    const netlist::ConfigDocument defaults;
    const auto curve = frequency_response(defaults.components, defaults.controls, defaults.grid.grid(), defaults.vin,
                                          defaults.model_options(), defaults.mode);
    CHECK(rows == output::to_rows(curve));
    CHECK(r.out.rfind(std::string(output::kCsvHeader) + "\n", 0) == 0);
}

TEST_CASE("response from a config file with overrides", "[cli]") {
    TempDir dir;
    const auto cfg = dir.write("stack.cfg", "version = 1\nt = 0.5\nm = 0.5\nb = 0.5\ngrid = logspace(1, 4, 31)\n");
    const auto csv = dir.path() / "out.csv";
    const auto svg = dir.path() / "out.svg";

    const auto r = run({"response", cfg.string(), "-o", csv.string(), "--svg", svg.string()});
    REQUIRE(r.code == cli::kSuccess);
    const auto base = output::read_csv(slurp(csv));
    CHECK(base.size() == 31);
    CHECK(slurp(svg).find("<svg") != std::string::npos);

    // vin only scales the output voltage, so the dB column is unchanged
    const auto louder = run({"response", cfg.string(), "--set", "vin=10"});
    REQUIRE(louder.code == cli::kSuccess);
    const auto scaled = output::read_csv(louder.out);
    REQUIRE(scaled.size() == base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(scaled[i].magnitude_db == Catch::Approx(base[i].magnitude_db).margin(1e-12));
        CHECK(scaled[i].vout_re == Catch::Approx(2.0 * base[i].vout_re).epsilon(1e-12));
    }
}

TEST_CASE("response input errors", "[cli][errors]") {
    TempDir dir;
    SECTION("missing config names the path") {
        const auto missing = (dir.path() / "nope.cfg").string();
        const auto r = run({"response", missing});
        CHECK(r.code == cli::kInputError);
        CHECK(r.err.find(missing) != std::string::npos);
    }
    SECTION("parse errors are reported as file:line:col") {
        const auto cfg = dir.write("bad.cfg", "r1 = 56k\nt = 1.5\n");
        const auto r = run({"response", cfg.string()});
        CHECK(r.code == cli::kInputError);
        CHECK(r.err.find(cfg.string() + ":2:5:") != std::string::npos);
    }
    SECTION("bad override") {
        const auto r = run({"response", "--set", "bogus=1"});
        CHECK(r.code == cli::kInputError);
        CHECK(r.err.find("--set") != std::string::npos);
    }
    SECTION("unknown subcommand or flag") {
        CHECK(run({"frobnicate"}).code == cli::kInputError);
        CHECK(run({"response", "--nope"}).code == cli::kInputError);
    }
    SECTION("no subcommand") {
        CHECK(run({}).code == cli::kInputError);
    }
}

TEST_CASE("sweep writes one file per position plus a plot", "[cli]") {
    TempDir dir;
    SECTION("bass in steps of 0.1") {
        const auto out = dir.path() / "bass";
        const auto r = run({"sweep", "--control", "bass", "--step", "0.1", "-o", out.string()});
        REQUIRE(r.code == cli::kSuccess);
        CHECK(count_with_extension(out, ".csv") == 11);
        CHECK(fs::exists(out / "bass_0.00.csv"));
        CHECK(fs::exists(out / "bass_1.00.csv"));
        CHECK(fs::exists(out / "bass_sweep.svg"));
        for (const auto& entry : fs::directory_iterator(out)) {
            if (entry.path().extension() == ".csv") {
                CHECK(output::read_csv(slurp(entry.path())).size() == 50);
            }
        }
    }
    SECTION("step 1 gives the endpoints") {
        const auto out = dir.path() / "mid";
        REQUIRE(run({"sweep", "--control", "mid", "--step", "1", "-o", out.string()}).code == cli::kSuccess);
        CHECK(count_with_extension(out, ".csv") == 2);
    }
    SECTION("control and step from the config") {
        const auto cfg = dir.write("s.cfg", "sweep = treble, 0.25\n");
        const auto out = dir.path() / "cfg";
        REQUIRE(run({"sweep", cfg.string(), "-o", out.string()}).code == cli::kSuccess);
        CHECK(count_with_extension(out, ".csv") == 5);
        CHECK(fs::exists(out / "treble_0.75.csv"));
    }
    SECTION("swept CSV matches a single response at the same position") {
        const auto out = dir.path() / "t";
        REQUIRE(run({"sweep", "--control", "treble", "--step", "0.5", "-o", out.string()}).code == cli::kSuccess);
        const auto single = run({"response", "--set", "t=0.5"});
        REQUIRE(single.code == cli::kSuccess);
        CHECK(slurp(out / "treble_0.50.csv") == single.out);
    }
    SECTION("errors") {
        CHECK(run({"sweep", "-o", (dir.path() / "x").string()}).code == cli::kInputError);
        CHECK(run({"sweep", "--control", "bass", "--step", "0", "-o", (dir.path() / "x").string()}).code ==
              cli::kInputError);
        CHECK(run({"sweep", "--control", "volume", "-o", (dir.path() / "x").string()}).code == cli::kInputError);

        const auto file = dir.write("plain", "not a directory");
        const auto r = run({"sweep", "--control", "bass", "-o", (file / "sub").string()});
        CHECK(r.code == cli::kInputError);
        CHECK(r.err.find("Not a directory") != std::string::npos);
    }
}

TEST_CASE("compare", "[cli]") {
    SECTION("defaults agree") {
        const auto r = run({"compare"});
        CHECK(r.code == cli::kSuccess);
        CHECK(r.out.find("OK") != std::string::npos);
    }
    SECTION("zero tolerance reports the worst point") {
        const auto r = run({"compare", "--grid-density", "2", "--tolerance", "0"});
        CHECK(r.code == cli::kComparisonFailure);
        CHECK(r.out.find("FAIL") != std::string::npos);
    }
    SECTION("malformed config") {
        TempDir dir;
        const auto cfg = dir.write("bad.cfg", "c1 = 22N\n");
        CHECK(run({"compare", cfg.string()}).code == cli::kInputError);
    }
}

TEST_CASE("numerical failure exits with code 2", "[cli][errors]") {
    const auto r = run({"response", "--set", "grid=logspace(-320, -300, 3)"});
    CHECK(r.code == cli::kNumericalFailure);
    CHECK(!r.err.empty());
}
