#include "fairfront/cli.hpp"
#include "fairfront/distributions.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fairfront;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("fairfront_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
    std::string sub(const std::string& name) const { return (path / name).string(); }
};

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

// run the entry point in-process with captured streams
CliResult run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("fairfront");
    for (const std::string& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    std::streambuf* old_out = std::cout.rdbuf(out.rdbuf());
    std::streambuf* old_err = std::cerr.rdbuf(err.rdbuf());
    int code = cli_main(static_cast<int>(argv.size()), argv.data());
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    for (std::string_view line : split(text, '\n'))
        if (!trim(line).empty())
            out.emplace_back(line);
    return out;
}

const std::string kDataDir = FAIRFRONT_TEST_DATA_DIR;

} // namespace

TEST_CASE("argument parsing") {
    SECTION("subcommand and flags") {
        const char* argv[] = {"fairfront", "tradeoff", "--quadratic", "--seed", "3",
                              "--lambdas",  "-1:1:5"};
        cli_detail::Args args = cli_detail::parse_args(7, argv);
        CHECK(args.subcommand == "tradeoff");
        CHECK(args.switches.count("quadratic") == 1);
        CHECK(args.seed() == 3);
        CHECK(args.get("lambdas", "") == "-1:1:5");
    }
    SECTION("rejections") {
        auto parse = [](std::vector<const char*> v) {
            v.insert(v.begin(), "fairfront");
            return cli_detail::parse_args(static_cast<int>(v.size()), v.data());
        };
        CHECK_THROWS_AS(parse({"nope"}), ConfigError);
        CHECK_THROWS_AS(parse({"frontier", "--bogus", "1"}), ConfigError);
        CHECK_THROWS_AS(parse({"frontier", "--taus"}), ConfigError);
        CHECK_THROWS_AS(parse({"frontier", "taus"}), ConfigError);
        // a flag valid for one subcommand is rejected for another
        CHECK_THROWS_AS(parse({"synth", "--taus", "0:1:3"}), ConfigError);
    }
    SECTION("grids") {
        std::vector<double> g = cli_detail::parse_grid("0:0.5:51", "--taus");
        REQUIRE(g.size() == 51);
        CHECK(g.front() == 0.0);
        CHECK(g.back() == 0.5);
        CHECK(cli_detail::parse_grid("2:2:1", "--x") == std::vector<double>{2.0});
        CHECK_THROWS_AS(cli_detail::parse_grid("1:2:1", "--x"), ConfigError);
        CHECK_THROWS_AS(cli_detail::parse_grid("1:2", "--x"), ConfigError);
        CHECK_THROWS_AS(cli_detail::parse_grid("1:2:0", "--x"), ConfigError);
    }
    SECTION("exact decimal levels") {
        auto [p8, q8] = cli_detail::parse_decimal_rational("0.8", "--tau");
        CHECK(p8 == 8);
        CHECK(q8 == 10);
        auto [p1, q1] = cli_detail::parse_decimal_rational("1", "--tau");
        CHECK(p1 == 1);
        CHECK(q1 == 1);
        auto [p, q] = cli_detail::parse_decimal_rational("0.123456789", "--tau");
        CHECK(p == 123456789);
        CHECK(q == 1000000000);
        CHECK_THROWS_AS(cli_detail::parse_decimal_rational("0.1234567891", "--tau"), ConfigError);
        CHECK_THROWS_AS(cli_detail::parse_decimal_rational("-0.5", "--tau"), ConfigError);
        CHECK_THROWS_AS(cli_detail::parse_decimal_rational("0.8e1", "--tau"), ConfigError);
    }
}

TEST_CASE("checksums and manifests") {
    SECTION("fnv1a64 known vectors") {
        CHECK(cli_detail::hex64(cli_detail::fnv1a64("")) == "cbf29ce484222325");
        CHECK(cli_detail::hex64(cli_detail::fnv1a64("a")) == "af63dc4c8601ec8c");
    }
    SECTION("atomic write leaves no temp file") {
        TempDir dir;
        cli_detail::write_atomic(dir.path / "x.csv", "hello\n");
        CHECK(slurp(dir.sub("x.csv")) == "hello\n");
        CHECK(!fs::exists(dir.path / "x.csv.tmp"));
    }
    SECTION("manifest is flat key=value with relative paths only") {
        TempDir dir;
        cli_detail::write_atomic(dir.path / "in.txt", "data");
        cli_detail::Manifest m;
        m.add("subcommand", "synth");
        m.add_input(dir.sub("in.txt"));
        m.write(dir.path / "m.txt");
        std::string text = slurp(dir.sub("m.txt"));
        CHECK_THAT(text, ContainsSubstring("subcommand=synth"));
        CHECK_THAT(text, ContainsSubstring("input.in.txt=fnv1a64:"));
        CHECK(text.find(dir.str()) == std::string::npos);
    }
}

TEST_CASE("exit code mapping") {
    CHECK(exit_code_for(InfeasibleConstraint("x")) == 3);
    CHECK(exit_code_for(UndefinedRatio("x")) == 4);
    CHECK(exit_code_for(DegenerateClass("x")) == 4);
    CHECK(exit_code_for(EmptyChannel("x")) == 4);
    CHECK(exit_code_for(ConfigError("x")) == 2);
    CHECK(exit_code_for(ParseError("x")) == 2);
    CHECK(exit_code_for(IoError("x")) == 2);
}

TEST_CASE("cmd_bounds table") {
    SECTION("defined ratio") {
        CliResult r = run_cli({"bounds", "--fnr", "0.2", "--fpr", "0.4"});
        CHECK(r.code == 0);
        CHECK_THAT(r.out, ContainsSubstring("di=0.5"));
        CHECK_THAT(r.out, ContainsSubstring("ber=0.3"));
        CHECK_THAT(r.out, ContainsSubstring("md=0.4"));
        CHECK_THAT(r.out, ContainsSubstring("identity.ber_from_di_fpr=0.3"));
        CHECK_THAT(r.out, ContainsSubstring("bound.di_le_2ber=pass"));
    }
    SECTION("undefined ratio is reported, not crashed") {
        CliResult r = run_cli({"bounds", "--fnr", "1", "--fpr", "0"});
        CHECK(r.code == 4);
        CHECK_THAT(r.out, ContainsSubstring("di=undefined"));
        CHECK_THAT(r.out, ContainsSubstring("ber=0.5"));
        CHECK_THAT(r.err, ContainsSubstring("code=undefined_ratio"));
    }
    SECTION("bound not applicable above one half") {
        CliResult r = run_cli({"bounds", "--fnr", "0.9", "--fpr", "0.5"});
        CHECK(r.code == 0);
        CHECK_THAT(r.out, ContainsSubstring("bound.di_le_2ber=not-applicable"));
    }
    SECTION("out of range is a config error") {
        CliResult r = run_cli({"bounds", "--fnr", "1.5", "--fpr", "0"});
        CHECK(r.code == 2);
        CHECK_THAT(r.err, ContainsSubstring("level=error code=config_error"));
    }
    SECTION("missing flag") {
        CliResult r = run_cli({"bounds", "--fnr", "0.5"});
        CHECK(r.code == 2);
    }
}

TEST_CASE("cmd_synth determinism") {
    TempDir dir;
    CliResult a = run_cli({"synth", "--n", "40", "--seed", "9", "--out", dir.sub("a")});
    CliResult b = run_cli({"synth", "--n", "40", "--seed", "9", "--out", dir.sub("b")});
    CliResult c = run_cli({"synth", "--n", "40", "--seed", "10", "--out", dir.sub("c")});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    REQUIRE(c.code == 0);
    std::string csv_a = slurp(dir.sub("a") + "/synth.csv");
    CHECK(csv_a == slurp(dir.sub("b") + "/synth.csv"));
    CHECK(csv_a != slurp(dir.sub("c") + "/synth.csv"));
    std::vector<std::string> rows = lines_of(csv_a);
    REQUIRE(rows.size() == 41);
    CHECK(rows[0] == "x1,x2,y,ybar");
    // manifests of identical runs are identical too
    CHECK(slurp(dir.sub("a") + "/synth_manifest.txt") ==
          slurp(dir.sub("b") + "/synth_manifest.txt"));
}

TEST_CASE("cmd_frontier files") {
    TempDir dir;

    SECTION("distribution file input reproduces the worked values") {
        {
            std::ofstream out(dir.sub("dist.csv"));
            write_discrete_joint(out, DiscreteJoint::make({
                                          {1.0 / 3.0, 0.9, 0.9, 0.9},
                                          {1.0 / 3.0, 0.5, 0.1, 0.1},
                                          {1.0 / 3.0, 0.1, 0.9, 0.9},
                                      }));
        }
        CliResult r = run_cli({"frontier", "--dist-file", dir.sub("dist.csv"), "--taus",
                               "0:0.5:11", "--out", dir.sub("out")});
        REQUIRE(r.code == 0);
        std::vector<std::string> rows = lines_of(slurp(dir.sub("out") + "/frontier.csv"));
        REQUIRE(rows.size() == 12);
        CHECK(rows[0] == "tau,F,lambda,status");
        // tau = 0.4 row carries F = 1/12 with a unit multiplier
        std::vector<std::string_view> cells = split(rows[9], ',');
        REQUIRE(cells.size() == 4);
        CHECK(parse_double(cells[0]) == Approx(0.4));
        CHECK(parse_double(cells[1]) == Approx(1.0 / 12.0).margin(1e-12));
        CHECK(parse_double(cells[2]) == Approx(1.0).margin(1e-9));
        CHECK(cells[3] == "optimal");
        // past the largest reachable level the rows go infeasible
        std::vector<std::string_view> last = split(rows[11], ',');
        CHECK(last[3] == "infeasible");
        CHECK(std::isnan(parse_double(last[1])));

        std::string manifest = slurp(dir.sub("out") + "/frontier_manifest.txt");
        CHECK_THAT(manifest, ContainsSubstring("tau_star.frontier="));
        CHECK_THAT(manifest, ContainsSubstring("tau_max.frontier=0.45"));
        CHECK_THAT(manifest, ContainsSubstring("input.dist.csv=fnv1a64:"));
    }

    SECTION("interval grid curves order their cutoffs by shift") {
        CliResult r = run_cli({"frontier", "--dist", "indicator", "--t", "0,0.25,0.5", "--n",
                               "801", "--taus", "0:0.4:9", "--out", dir.sub("curves"),
                               "--format", "csv+svg"});
        REQUIRE(r.code == 0);
        std::string manifest = slurp(dir.sub("curves") + "/frontier_manifest.txt");
        double t0 = 0.0, t25 = 0.0, t50 = 0.0;
        for (const std::string& line : lines_of(manifest)) {
            auto eq = line.find('=');
            std::string key = line.substr(0, eq);
            if (key == "tau_star.frontier_t0")
                t0 = parse_double(line.substr(eq + 1));
            else if (key == "tau_star.frontier_t0.25")
                t25 = parse_double(line.substr(eq + 1));
            else if (key == "tau_star.frontier_t0.5")
                t50 = parse_double(line.substr(eq + 1));
        }
        CHECK(t0 < t25);
        CHECK(t25 < t50);
        CHECK(t25 == Approx(0.25 / 4.0).margin(2.0 / 801.0));
        CHECK(fs::exists(dir.path / "curves" / "frontier_t0.25.svg"));
        std::string svg = slurp(dir.sub("curves") + "/frontier_t0.25.svg");
        CHECK_THAT(svg, ContainsSubstring("<svg"));
        CHECK_THAT(svg, ContainsSubstring("polyline"));
    }

    SECTION("whole grid infeasible exits 3 but still writes files") {
        {
            std::ofstream out(dir.sub("flat.csv"));
            write_discrete_joint(out, DiscreteJoint::make({{1.0, 0.5, 0.5, 0.5}}));
        }
        // a flat distribution cannot move the fairness risk off 1/4
        CliResult r = run_cli({"frontier", "--dist-file", dir.sub("flat.csv"), "--fairness",
                               "cs", "--taus", "0.3:0.4:3", "--out", dir.sub("bad")});
        CHECK(r.code == 3);
        CHECK_THAT(r.err, ContainsSubstring("level=error code=infeasible"));
        CHECK(fs::exists(dir.path / "bad" / "frontier.csv"));
        CHECK(fs::exists(dir.path / "bad" / "frontier_manifest.txt"));
        for (const std::string& row : lines_of(slurp(dir.sub("bad") + "/frontier.csv")))
            if (row.find("tau") != 0)
                CHECK_THAT(row, ContainsSubstring("infeasible"));
    }

    SECTION("config rejections") {
        CHECK(run_cli({"frontier", "--fairness", "nope", "--out", dir.sub("x")}).code == 2);
        CHECK(run_cli({"frontier", "--channel", "nope", "--out", dir.sub("x")}).code == 2);
        CHECK(run_cli({"frontier", "--dist", "nope", "--out", dir.sub("x")}).code == 2);
        CHECK(run_cli({"frontier", "--format", "pdf", "--out", dir.sub("x")}).code == 2);
        CHECK(run_cli({"frontier", "--taus", "oops", "--out", dir.sub("x")}).code == 2);
    }
}

TEST_CASE("cmd_certify on the bundled table") {
    TempDir dir;

    SECTION("default run certifies every rate") {
        CliResult r = run_cli({"certify", "--data-dir", kDataDir, "--out", dir.sub("a")});
        REQUIRE(r.code == 0);
        std::vector<std::string> rows = lines_of(slurp(dir.sub("a") + "/certify.csv"));
        REQUIRE(rows.size() == 10);
        CHECK(rows[0] == "noise_rate,di,delta,agree");
        for (std::size_t i = 1; i < rows.size(); ++i) {
            std::vector<std::string_view> cells = split(rows[i], ',');
            REQUIRE(cells.size() == 4);
            CHECK(cells[3] == "true");
            // the sign of delta must match the side of the level DI sits on
            double di = parse_double(cells[1]);
            double delta = parse_double(cells[2]);
            if (di > 0.8)
                CHECK(delta > 0.0);
            if (di < 0.8)
                CHECK(delta < 0.0);
        }
        std::string manifest = slurp(dir.sub("a") + "/certify_manifest.txt");
        CHECK_THAT(manifest, ContainsSubstring("cost=0.5555555555555556"));
        CHECK_THAT(manifest, ContainsSubstring("input.german_standin.csv=fnv1a64:"));
        CHECK(manifest.find(kDataDir) == std::string::npos);

        // byte-identical rerun
        CliResult r2 = run_cli({"certify", "--data-dir", kDataDir, "--out", dir.sub("b")});
        REQUIRE(r2.code == 0);
        CHECK(slurp(dir.sub("a") + "/certify.csv") == slurp(dir.sub("b") + "/certify.csv"));
        CHECK(slurp(dir.sub("a") + "/certify_manifest.txt") ==
              slurp(dir.sub("b") + "/certify_manifest.txt"));
    }

    SECTION("level with too many digits cannot be certified exactly") {
        CliResult r = run_cli({"certify", "--data-dir", kDataDir, "--tau", "0.1234567891",
                               "--out", dir.sub("x")});
        CHECK(r.code == 2);
        CHECK_THAT(r.err, ContainsSubstring("code=config_error"));
    }

    SECTION("zero level is rejected") {
        CliResult r = run_cli({"certify", "--data-dir", kDataDir, "--tau", "0",
                               "--out", dir.sub("x")});
        CHECK(r.code == 2);
    }
}

TEST_CASE("cmd_tradeoff on the bundled table") {
    TempDir dir;

    SECTION("sweep writes one row per lambda") {
        CliResult r = run_cli({"tradeoff", "--data-dir", kDataDir, "--c", "auto", "--lambdas",
                               "-1:1:5", "--out", dir.sub("a"), "--format", "csv+svg"});
        REQUIRE(r.code == 0);
        std::vector<std::string> rows = lines_of(slurp(dir.sub("a") + "/tradeoff.csv"));
        REQUIRE(rows.size() == 6);
        CHECK(rows[0] == "lambda,ber,md_sym,di");
        for (std::size_t i = 1; i < rows.size(); ++i) {
            std::vector<std::string_view> cells = split(rows[i], ',');
            REQUIRE(cells.size() == 4);
            double ber = parse_double(cells[1]);
            double md = parse_double(cells[2]);
            CHECK(ber >= 0.0);
            CHECK(ber <= 1.0);
            CHECK(md >= -1.0);
            CHECK(md <= 1.0);
        }
        std::string manifest = slurp(dir.sub("a") + "/tradeoff_manifest.txt");
        CHECK_THAT(manifest, ContainsSubstring("flag.c=auto"));
        CHECK_THAT(manifest, ContainsSubstring("cost="));
        CHECK(fs::exists(dir.path / "a" / "tradeoff.svg"));

        // the fitted cost is the weighted mean of the fitted target model
        // on the training split, so it lies strictly inside (0,1)
        for (const std::string& line : lines_of(manifest))
            if (line.rfind("cost=", 0) == 0) {
                double cost = parse_double(line.substr(5));
                CHECK(cost > 0.0);
                CHECK(cost < 1.0);
            }
    }

    SECTION("lambda zero equals the plain cost-sensitive plugin") {
        CliResult r = run_cli({"tradeoff", "--data-dir", kDataDir, "--c", "0.6", "--lambdas",
                               "0:0:1", "--out", dir.sub("z")});
        REQUIRE(r.code == 0);
        std::vector<std::string> rows = lines_of(slurp(dir.sub("z") + "/tradeoff.csv"));
        REQUIRE(rows.size() == 2);

        // rebuild the same pipeline through the library
        SchemaDescriptor schema = load_schema(kDataDir + "/german.schema");
        SampleSet sample = load_csv(kDataDir + "/german_standin.csv", schema);
        auto [train, test] = split(sample, SplitSpec{2.0 / 3.0, 0});
        TrainConfig cpe;
        LinearScorer eta = train_cs_logistic(train, LabelChannel::Y, cpe);
        auto f = [&](const std::vector<double>& x) { return eta.prob(x) > 0.6 ? 1 : 0; };
        Rates target = evaluate_empirical(test, Channel::Target, f);
        std::vector<std::string_view> cells = split(rows[1], ',');
        CHECK(parse_double(cells[1]) == Approx(ber_from_rates(target).value).margin(1e-12));
    }

    SECTION("feature transforms stay on the rails") {
        CliResult quad = run_cli({"tradeoff", "--data-dir", kDataDir, "--quadratic",
                                  "--lambdas", "0:1:3", "--out", dir.sub("q")});
        CHECK(quad.code == 0);
        CliResult aware = run_cli({"tradeoff", "--data-dir", kDataDir, "--sensitive-aware",
                                   "--lambdas", "0:1:3", "--out", dir.sub("s")});
        CHECK(aware.code == 0);
        std::string manifest = slurp(dir.sub("s") + "/tradeoff_manifest.txt");
        CHECK_THAT(manifest, ContainsSubstring("flag.sensitive-aware=true"));
        CHECK(slurp(dir.sub("q") + "/tradeoff.csv") != slurp(dir.sub("s") + "/tradeoff.csv"));
    }

    SECTION("plain csv without a schema file infers columns from the header") {
        SampleSet synth = sample_rotated_gaussians(120, 0.4, 5);
        write_csv(synth, dir.sub("synth.csv"));
        CliResult r = run_cli({"tradeoff", "--data", dir.sub("synth.csv"), "--lambdas",
                               "-1:1:3", "--out", dir.sub("g")});
        REQUIRE(r.code == 0);
        std::string manifest = slurp(dir.sub("g") + "/tradeoff_manifest.txt");
        CHECK_THAT(manifest, ContainsSubstring("flag.schema=inferred"));
        CHECK(lines_of(slurp(dir.sub("g") + "/tradeoff.csv")).size() == 4);
    }

    SECTION("headerless or unlabeled csv is a schema mismatch") {
        cli_detail::write_atomic(dir.path / "bad.csv", "a,b\n1,2\n");
        CliResult r = run_cli({"tradeoff", "--data", dir.sub("bad.csv"), "--out", dir.sub("x")});
        CHECK(r.code == 2);
        CHECK_THAT(r.err, ContainsSubstring("code=schema_mismatch"));
    }
}
