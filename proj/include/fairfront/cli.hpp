#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fairfront/data_io.hpp"
#include "fairfront/errors.hpp"
#include "fairfront/format.hpp"
#include "fairfront/frontier.hpp"
#include "fairfront/plugin.hpp"
#include "fairfront/svg.hpp"
#include "fairfront/version.hpp"

namespace fairfront {

namespace cli_detail {

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// write-temp-then-rename so partially written outputs never appear
inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out)
            throw IoError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw IoError("failed while writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

// flat ordered key=value run record; no timestamps, relative paths only
struct Manifest {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(const std::string& key, const std::string& value) {
        entries.emplace_back(key, value);
    }
    void add_input(const std::string& path) {
        add("input." + std::filesystem::path(path).filename().string(),
            "fnv1a64:" + hex64(fnv1a64(read_file(path))));
    }
    void write(const std::filesystem::path& path) const {
        std::ostringstream out;
        for (const auto& [k, v] : entries)
            out << k << '=' << v << '\n';
        write_atomic(path, out.str());
    }
};

struct Args {
    std::string subcommand;
    std::map<std::string, std::string> values;
    std::set<std::string> switches;

    bool has(const std::string& name) const {
        return values.count(name) > 0 || switches.count(name) > 0;
    }
    std::string get(const std::string& name, const std::string& fallback) const {
        auto it = values.find(name);
        return it == values.end() ? fallback : it->second;
    }
    std::string require(const std::string& name) const {
        auto it = values.find(name);
        if (it == values.end())
            throw ConfigError("missing required flag --" + name);
        return it->second;
    }
    double get_double(const std::string& name, double fallback) const {
        auto it = values.find(name);
        return it == values.end() ? fallback : parse_double(it->second, "--" + name);
    }
    std::uint64_t seed() const {
        auto it = values.find("seed");
        if (it == values.end())
            return 0;
        long long v = parse_int(it->second, "--seed");
        if (v < 0)
            throw ConfigError("--seed must be nonnegative");
        return static_cast<std::uint64_t>(v);
    }
};

inline const std::map<std::string, std::pair<std::set<std::string>, std::set<std::string>>>&
flag_registry() {
    static const std::map<std::string, std::pair<std::set<std::string>, std::set<std::string>>>
        registry = {
            {"frontier",
             {{"dist", "t", "n", "dist-file", "c", "cbar", "fairness", "channel", "taus"}, {}}},
            {"certify", {{"data", "schema", "tau", "noise", "train-frac"}, {}}},
            {"tradeoff",
             {{"data", "schema", "lambdas", "c", "cbar", "channel", "train-frac"},
              {"quadratic", "sensitive-aware"}}},
            {"bounds", {{"fnr", "fpr"}, {}}},
            {"synth", {{"n", "phi"}, {}}},
        };
    return registry;
}

inline Args parse_args(int argc, const char* const* argv) {
    if (argc < 2)
        throw ConfigError("usage: fairfront <frontier|certify|tradeoff|bounds|synth> [flags]");
    Args args;
    args.subcommand = argv[1];
    auto reg = flag_registry().find(args.subcommand);
    if (reg == flag_registry().end())
        throw ConfigError("unknown subcommand '" + args.subcommand + "'");
    const std::set<std::string> global_values{"seed", "out", "data-dir", "format"};
    for (int i = 2; i < argc; ++i) {
        std::string_view token = argv[i];
        if (token.size() < 3 || token.substr(0, 2) != "--")
            throw ConfigError("expected --flag, got '" + std::string(token) + "'");
        std::string name(token.substr(2));
        if (reg->second.second.count(name)) {
            args.switches.insert(name);
            continue;
        }
        if (!reg->second.first.count(name) && !global_values.count(name))
            throw ConfigError("unknown flag --" + name + " for " + args.subcommand);
        if (i + 1 >= argc)
            throw ConfigError("flag --" + name + " needs a value");
        args.values[name] = argv[++i];
    }
    return args;
}

inline std::filesystem::path out_dir(const Args& args) {
    std::filesystem::path dir = args.get("out", "out");
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string data_dir(const Args& args) {
    if (args.values.count("data-dir"))
        return args.values.at("data-dir");
    if (const char* env = std::getenv("FAIRFRONT_DATA_DIR"))
        return env;
    return "data";
}

inline bool want_svg(const Args& args) {
    std::string fmt = args.get("format", "csv");
    if (fmt == "csv")
        return false;
    if (fmt == "csv+svg")
        return true;
    throw ConfigError("--format must be csv or csv+svg");
}

// "start:end:count" with count >= 1; a single-point grid repeats start
inline std::vector<double> parse_grid(const std::string& text, const std::string& flag) {
    std::vector<std::string_view> parts = split(text, ':');
    if (parts.size() != 3)
        throw ConfigError(flag + " expects start:end:count");
    double start = parse_double(trim(parts[0]), flag + " start");
    double end = parse_double(trim(parts[1]), flag + " end");
    long long count = parse_int(trim(parts[2]), flag + " count");
    if (count < 1)
        throw ConfigError(flag + " count must be >= 1");
    if (count == 1) {
        if (end != start)
            throw ConfigError(flag + ": a 1-point grid needs end == start");
        return {start};
    }
    return make_grid(start, end, static_cast<std::size_t>(count));
}

// exact decimal rational p/q (q a power of ten), at most 9 fractional digits
inline std::pair<long long, long long> parse_decimal_rational(std::string_view s,
                                                              const std::string& flag) {
    std::string_view t = trim(s);
    if (t.empty())
        throw ConfigError(flag + ": empty number");
    if (t[0] == '-' || t[0] == '+')
        throw ConfigError(flag + " must be a plain nonnegative decimal");
    std::string_view ip = t, fp;
    auto dot = t.find('.');
    if (dot != std::string_view::npos) {
        ip = t.substr(0, dot);
        fp = t.substr(dot + 1);
    }
    if (fp.size() > 9)
        throw ConfigError(flag + ": more than 9 decimal digits cannot be certified exactly");
    long long p = ip.empty() ? 0 : parse_int(ip, flag);
    if (p < 0)
        throw ConfigError(flag + " must be nonnegative");
    long long q = 1;
    for (char ch : fp) {
        if (ch < '0' || ch > '9')
            throw ConfigError(flag + ": malformed decimal");
        p = p * 10 + (ch - '0');
        q *= 10;
    }
    return {p, q};
}

inline FairnessSpec parse_fairness(const std::string& form, const std::string& channel,
                                   double cbar) {
    FairnessSpec spec;
    spec.cbar = CostParam{cbar};
    if (form == "cs")
        spec = FairnessSpec{FairnessForm::CostSensitive, {cbar}, Symmetrization::None, 0.0};
    else if (form == "cs-sym")
        spec = FairnessSpec{FairnessForm::CostSensitive, {cbar}, Symmetrization::MinWithAnti, 0.0};
    else if (form == "md")
        spec = FairnessSpec{FairnessForm::MeanDifference, {cbar}, Symmetrization::None, 0.0};
    else if (form == "md-sym")
        spec = FairnessSpec{FairnessForm::MeanDifference, {cbar}, Symmetrization::MinWithAnti, 0.0};
    else if (form == "di")
        spec = FairnessSpec{FairnessForm::DisparateImpact, {cbar}, Symmetrization::None, 0.0};
    else if (form == "di-sym")
        spec =
            FairnessSpec{FairnessForm::DisparateImpact, {cbar}, Symmetrization::MinWithAnti, 0.0};
    else
        throw ConfigError("unknown fairness form '" + form + "'");
    if (channel == "dp")
        spec.channel = SensitiveChannel::DP;
    else if (channel == "eo")
        spec.channel = SensitiveChannel::EO;
    else
        throw ConfigError("unknown channel '" + channel + "'");
    return spec;
}

inline SchemaDescriptor resolve_schema(const Args& args, const std::string& csv_path,
                                       Manifest& manifest) {
    if (args.values.count("schema")) {
        std::string path = args.values.at("schema");
        manifest.add("flag.schema", std::filesystem::path(path).filename().string());
        manifest.add_input(path);
        return load_schema(path);
    }
    manifest.add("flag.schema", "inferred");
    // infer a plain schema: y and ybar columns, everything else a feature
    std::ifstream in(csv_path);
    if (!in)
        throw IoError("cannot open csv file " + csv_path);
    std::string header;
    if (!std::getline(in, header))
        throw ParseError(csv_path + ": empty file, header required");
    if (!header.empty() && header.back() == '\r')
        header.pop_back();
    SchemaDescriptor schema;
    schema.target_column = "y";
    schema.sensitive_column = "ybar";
    bool have_y = false, have_ybar = false;
    for (std::string_view name : split(header, ',')) {
        std::string col(trim(name));
        if (col == "y")
            have_y = true;
        else if (col == "ybar")
            have_ybar = true;
        else
            schema.feature_columns.push_back(col);
    }
    if (!have_y || !have_ybar)
        throw SchemaMismatch(csv_path + ": need y and ybar columns to infer a schema "
                             "(or pass --schema)");
    return schema;
}

// sensitive-aware variant: the sensitive bit becomes an ordinary feature
inline SampleSet append_sensitive_feature(const SampleSet& sample) {
    SampleSet out = sample;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.x[i].push_back(static_cast<double>(out.ybar[i]));
    return out;
}

inline const char* status_name(LPStatus s) {
    return s == LPStatus::Optimal ? "optimal" : "infeasible";
}

using u128 = unsigned __int128;

// DI >= p/q read straight off the ratio of selection rates,
// (kq/n0) / (kp/n1) >= p/q, cross-multiplied into integers
inline bool di_meets_threshold(u128 p, u128 q, u128 kp, u128 n1, u128 kq, u128 n0) {
    return q * kq * n1 >= p * kp * n0;
}

// the same decision via the balanced cost risk at c = q/(p+q):
// (1-c)(1 - kp/n1) + c kq/n0 >= 1-c, with all denominators cleared
inline bool cost_risk_meets_level(u128 p, u128 q, u128 kp, u128 n1, u128 kq, u128 n0) {
    return p * (n1 - kp) * n0 + q * kq * n1 >= p * n1 * n0;
}

} // namespace cli_detail

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

inline int cmd_frontier(const cli_detail::Args& args) {
    namespace cd = cli_detail;
    std::filesystem::path out = cd::out_dir(args);
    const bool svg = cd::want_svg(args);

    double c = args.get_double("c", 0.5);
    double cbar = args.get_double("cbar", 0.5);
    FairnessSpec spec = cd::parse_fairness(args.get("fairness", "cs-sym"),
                                           args.get("channel", "dp"), cbar);
    std::vector<double> taus = cd::parse_grid(args.get("taus", "0:0.5:51"), "--taus");

    cd::Manifest manifest;
    manifest.add("subcommand", "frontier");
    manifest.add("version", FAIRFRONT_VERSION);
    manifest.add("seed", format_u64(args.seed()));
    manifest.add("flag.c", format_double(c));
    manifest.add("flag.cbar", format_double(cbar));
    manifest.add("flag.fairness", args.get("fairness", "cs-sym"));
    manifest.add("flag.channel", args.get("channel", "dp"));
    manifest.add("flag.taus", args.get("taus", "0:0.5:51"));

    struct CurveJob {
        std::string name;
        DiscreteJoint dist;
    };
    std::vector<CurveJob> jobs;
    if (args.values.count("dist-file")) {
        std::string path = args.values.at("dist-file");
        manifest.add("flag.dist-file", std::filesystem::path(path).filename().string());
        manifest.add_input(path);
        std::ifstream in(path);
        if (!in)
            throw IoError("cannot open distribution file " + path);
        jobs.push_back({"frontier", read_discrete_joint(in)});
    } else {
        std::string dist = args.get("dist", "indicator");
        EtaKind kind;
        if (dist == "indicator")
            kind = EtaKind::Indicator;
        else if (dist == "sigmoid")
            kind = EtaKind::Sigmoid;
        else
            throw ConfigError("--dist must be indicator or sigmoid (or use --dist-file)");
        long long n = parse_int(args.get("n", "2001"), "--n");
        if (n < 3)
            throw ConfigError("--n must be at least 3");
        manifest.add("flag.dist", dist);
        manifest.add("flag.n", format_u64(static_cast<std::uint64_t>(n)));
        std::string t_list = args.get("t", "0,0.25,0.5");
        manifest.add("flag.t", t_list);
        for (std::string_view part : split(t_list, ',')) {
            double t = parse_double(trim(part), "--t");
            jobs.push_back({"frontier_t" + std::string(trim(part)),
                            build_interval_dist(kind, t, static_cast<std::size_t>(n))});
        }
    }

    std::size_t feasible_rows = 0;
    std::vector<std::string> outputs;
    for (const CurveJob& job : jobs) {
        FrontierCurve curve = compute_frontier(job.dist, CostParam{c}, spec, taus);
        std::ostringstream csv;
        csv << "tau,F,lambda,status\n";
        for (std::size_t i = 0; i < curve.taus.size(); ++i) {
            csv << format_double(curve.taus[i]) << ',' << format_double(curve.values[i]) << ','
                << format_double(curve.lambdas[i]) << ','
                << cd::status_name(curve.statuses[i]) << '\n';
            feasible_rows += curve.statuses[i] == LPStatus::Optimal;
        }
        cd::write_atomic(out / (job.name + ".csv"), csv.str());
        outputs.push_back(job.name + ".csv");
        manifest.add("tau_star." + job.name, format_double(curve.tau_star));
        manifest.add("tau_max." + job.name, format_double(curve.tau_max));
        if (svg) {
            cd::write_atomic(out / (job.name + ".svg"),
                             render_line_chart("fairness frontier", "tau", "F(tau)", curve.taus,
                                               curve.values));
            outputs.push_back(job.name + ".svg");
        }
    }
    for (std::size_t i = 0; i < outputs.size(); ++i)
        manifest.add("output." + std::to_string(i + 1), outputs[i]);
    manifest.write(out / "frontier_manifest.txt");

    if (feasible_rows == 0) {
        std::cerr << "level=error code=infeasible msg=no feasible grid point on any curve\n";
        return 3;
    }
    return 0;
}

inline int cmd_certify(const cli_detail::Args& args) {
    namespace cd = cli_detail;
    std::filesystem::path out = cd::out_dir(args);
    const bool svg = cd::want_svg(args);
    std::string dir = cd::data_dir(args);

    std::string data_path = args.get("data", dir + "/german_standin.csv");
    auto [p, q] = cd::parse_decimal_rational(args.get("tau", "0.8"), "--tau");
    if (p == 0)
        throw ConfigError("--tau must be positive");
    // DI >= tau corresponds to the balanced cost c = 1/(1+tau) = q/(p+q)
    double cost = static_cast<double>(q) / static_cast<double>(p + q);
    std::vector<double> noise = cd::parse_grid(args.get("noise", "0:0.4:9"), "--noise");
    double train_frac = args.get_double("train-frac", 2.0 / 3.0);
    std::uint64_t seed = args.seed();

    cd::Manifest manifest;
    manifest.add("subcommand", "certify");
    manifest.add("version", FAIRFRONT_VERSION);
    manifest.add("seed", format_u64(seed));
    manifest.add("flag.data", std::filesystem::path(data_path).filename().string());
    manifest.add("flag.tau", args.get("tau", "0.8"));
    manifest.add("flag.noise", args.get("noise", "0:0.4:9"));
    manifest.add("flag.train-frac", format_double(train_frac));
    manifest.add("cost", format_double(cost));
    manifest.add_input(data_path);

    std::string schema_path = args.get("schema", dir + "/german.schema");
    manifest.add("flag.schema", std::filesystem::path(schema_path).filename().string());
    manifest.add_input(schema_path);
    SchemaDescriptor schema = load_schema(schema_path);
    SampleSet sample = load_csv(data_path, schema);
    auto [train, test] = split(sample, {train_frac, seed});

    std::ostringstream csv;
    csv << "noise_rate,di,delta,agree\n";
    std::vector<double> rates_axis, di_axis;
    bool any_undefined = false;
    for (std::size_t i = 0; i < noise.size(); ++i) {
        SampleSet noisy = inject_label_noise(train, NoiseChannel::Ybar, noise[i], seed + 1 + i);
        TrainConfig cfg;
        cfg.c = CostParam{cost};
        LinearScorer model = train_cs_logistic(noisy, LabelChannel::Ybar, cfg);

        // clean-test counts: kp of n1 sensitive-positive rows predicted 1,
        // kq of n0 sensitive-negative rows predicted 1
        long long kp = 0, n1 = 0, kq = 0, n0 = 0;
        for (std::size_t r = 0; r < test.size(); ++r) {
            bool pred = model.prob(test.x[r]) > cost;
            if (test.ybar[r] == 1) {
                ++n1;
                kp += pred;
            } else {
                ++n0;
                kq += pred;
            }
        }
        if (n1 == 0 || n0 == 0)
            throw DegenerateClass("certify: test split lost a sensitive class");

        // delta is the slack of the balanced cost risk over its level 1-c;
        // it stays finite even where the impact ratio itself is undefined
        double delta = cost * static_cast<double>(kq) / static_cast<double>(n0) -
                       (1.0 - cost) * static_cast<double>(kp) / static_cast<double>(n1);
        csv << format_double(noise[i]) << ',';
        rates_axis.push_back(noise[i]);
        if (kp == 0) {
            any_undefined = true;
            csv << "nan," << format_double(delta) << ",na\n";
            di_axis.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        double di = (static_cast<double>(kq) * static_cast<double>(n1)) /
                    (static_cast<double>(kp) * static_cast<double>(n0));
        bool agree = cd::di_meets_threshold(p, q, kp, n1, kq, n0) ==
                     cd::cost_risk_meets_level(p, q, kp, n1, kq, n0);
        csv << format_double(di) << ',' << format_double(delta) << ','
            << (agree ? "true" : "false") << '\n';
        di_axis.push_back(di);
    }
    cd::write_atomic(out / "certify.csv", csv.str());
    std::vector<std::string> outputs{"certify.csv"};
    if (svg) {
        cd::write_atomic(out / "certify.svg",
                         render_line_chart("disparate impact under label noise", "noise rate",
                                           "DI", rates_axis, di_axis));
        outputs.push_back("certify.svg");
    }
    for (std::size_t i = 0; i < outputs.size(); ++i)
        manifest.add("output." + std::to_string(i + 1), outputs[i]);
    manifest.write(out / "certify_manifest.txt");

    if (any_undefined) {
        std::cerr << "level=error code=undefined_ratio msg=DI undefined at some noise rates "
                     "(no sensitive-positive row predicted positive)\n";
        return 4;
    }
    return 0;
}

inline int cmd_tradeoff(const cli_detail::Args& args) {
    namespace cd = cli_detail;
    std::filesystem::path out = cd::out_dir(args);
    const bool svg = cd::want_svg(args);
    std::string dir = cd::data_dir(args);

    std::string data_path = args.get("data", dir + "/german_standin.csv");
    std::vector<double> lambdas = cd::parse_grid(args.get("lambdas", "-3:3:31"), "--lambdas");
    double cbar = args.get_double("cbar", 0.5);
    std::string channel_name = args.get("channel", "dp");
    SensitiveChannel channel;
    if (channel_name == "dp")
        channel = SensitiveChannel::DP;
    else if (channel_name == "eo")
        channel = SensitiveChannel::EO;
    else
        throw ConfigError("unknown channel '" + channel_name + "'");
    double train_frac = args.get_double("train-frac", 2.0 / 3.0);
    std::uint64_t seed = args.seed();

    cd::Manifest manifest;
    manifest.add("subcommand", "tradeoff");
    manifest.add("version", FAIRFRONT_VERSION);
    manifest.add("seed", format_u64(seed));
    manifest.add("flag.data", std::filesystem::path(data_path).filename().string());
    manifest.add("flag.lambdas", args.get("lambdas", "-3:3:31"));
    manifest.add("flag.cbar", format_double(cbar));
    manifest.add("flag.channel", channel_name);
    manifest.add("flag.train-frac", format_double(train_frac));
    manifest.add("flag.quadratic", args.switches.count("quadratic") ? "true" : "false");
    manifest.add("flag.sensitive-aware",
                 args.switches.count("sensitive-aware") ? "true" : "false");
    manifest.add_input(data_path);

    // bundled data comes with a bundled schema; explicit data without an
    // explicit schema falls back to header inference
    cd::Args schema_args = args;
    if (!args.values.count("schema") && !args.values.count("data"))
        schema_args.values["schema"] = dir + "/german.schema";
    SchemaDescriptor schema = cd::resolve_schema(schema_args, data_path, manifest);
    SampleSet sample = load_csv(data_path, schema);
    if (args.switches.count("quadratic"))
        sample = quadratic_features(sample);
    if (args.switches.count("sensitive-aware"))
        sample = cd::append_sensitive_feature(sample);
    auto [train, test] = split(sample, {train_frac, seed});

    std::string c_text = args.get("c", "0.5");
    double c;
    if (c_text == "auto") {
        // the mean fitted probability on train; thresholding there is the
        // balanced-error optimum under the fitted model
        LinearScorer probe = train_cs_logistic(train, LabelChannel::Y, {});
        double mean = 0.0, total = 0.0;
        for (std::size_t i = 0; i < train.size(); ++i) {
            mean += train.weight[i] * probe.prob(train.x[i]);
            total += train.weight[i];
        }
        c = mean / total;
    } else {
        c = parse_double(c_text, "--c");
    }
    manifest.add("flag.c", c_text);
    manifest.add("cost", format_double(c));

    std::vector<TradeoffPoint> points =
        sweep_lambda(train, test, lambdas, CostParam{c}, CostParam{cbar}, channel);

    std::ostringstream csv;
    csv << "lambda,ber,md_sym,di\n";
    std::vector<double> md_axis, ber_axis;
    for (const TradeoffPoint& pt : points) {
        csv << format_double(pt.lambda) << ',' << format_double(pt.ber_target) << ','
            << format_double(pt.md_sym_sensitive) << ','
            << (pt.di_sensitive ? format_double(*pt.di_sensitive) : "nan") << '\n';
        md_axis.push_back(pt.md_sym_sensitive);
        ber_axis.push_back(pt.ber_target);
    }
    cd::write_atomic(out / "tradeoff.csv", csv.str());
    std::vector<std::string> outputs{"tradeoff.csv"};
    if (svg) {
        cd::write_atomic(out / "tradeoff.svg",
                         render_line_chart("fairness-accuracy tradeoff", "MD (sensitive)",
                                           "BER (target)", md_axis, ber_axis));
        outputs.push_back("tradeoff.svg");
    }
    for (std::size_t i = 0; i < outputs.size(); ++i)
        manifest.add("output." + std::to_string(i + 1), outputs[i]);
    manifest.write(out / "tradeoff_manifest.txt");
    return 0;
}

inline int cmd_bounds(const cli_detail::Args& args) {
    double fnr = parse_double(args.require("fnr"), "--fnr");
    double fpr = parse_double(args.require("fpr"), "--fpr");
    if (!(fnr >= 0.0 && fnr <= 1.0 && fpr >= 0.0 && fpr <= 1.0))
        throw ConfigError("--fnr and --fpr must lie in [0,1]");
    Rates r{fnr, fpr};
    double ber = ber_from_rates(r).value;
    std::ostringstream out;
    out << "fnr=" << format_double(fnr) << '\n';
    out << "fpr=" << format_double(fpr) << '\n';
    out << "ber=" << format_double(ber) << '\n';
    out << "md=" << format_double(mean_difference(r).value) << '\n';
    if (fnr == 1.0) {
        out << "di=undefined (fnr=1: the positive class is never predicted positive,\n";
        out << "    so the impact ratio divides by zero; ber and md remain valid)\n";
        std::cout << out.str();
        std::cerr << "level=error code=undefined_ratio msg=DI undefined at fnr=1\n";
        return 4;
    }
    double di = disparate_impact(r).value;
    DiBerIdentities id = di_ber_identities(r);
    out << "di=" << format_double(di) << '\n';
    out << "identity.di_from_ber_fpr=" << format_double(id.di_from_ber_fpr) << '\n';
    out << "identity.di_from_ber_fnr=" << format_double(id.di_from_ber_fnr) << '\n';
    out << "identity.ber_from_di_fnr=" << format_double(id.ber_from_di_fnr) << '\n';
    out << "identity.ber_from_di_fpr="
        << (id.ber_from_di_fpr ? format_double(*id.ber_from_di_fpr) : "undefined (di=0)") << '\n';
    if (ber <= 0.5)
        out << "bound.di_le_2ber=" << (di <= di_bound_from_ber(ber) ? "pass" : "fail") << '\n';
    else
        out << "bound.di_le_2ber=not-applicable (ber>1/2)\n";
    std::cout << out.str();
    return 0;
}

inline int cmd_synth(const cli_detail::Args& args) {
    namespace cd = cli_detail;
    std::filesystem::path out = cd::out_dir(args);
    long long n = parse_int(args.get("n", "10000"), "--n");
    if (n < 1)
        throw ConfigError("--n must be at least 1");
    double phi = args.get_double("phi", 0.5);
    std::uint64_t seed = args.seed();

    SampleSet sample = sample_rotated_gaussians(static_cast<std::size_t>(n), phi, seed);
    std::ostringstream csv;
    csv << "x1,x2,y,ybar\n";
    for (std::size_t i = 0; i < sample.size(); ++i)
        csv << format_double(sample.x[i][0]) << ',' << format_double(sample.x[i][1]) << ','
            << sample.y[i] << ',' << sample.ybar[i] << '\n';
    cd::write_atomic(out / "synth.csv", csv.str());

    cd::Manifest manifest;
    manifest.add("subcommand", "synth");
    manifest.add("version", FAIRFRONT_VERSION);
    manifest.add("seed", format_u64(seed));
    manifest.add("flag.n", format_u64(static_cast<std::uint64_t>(n)));
    manifest.add("flag.phi", format_double(phi));
    manifest.add("output.1", "synth.csv");
    manifest.write(out / "synth_manifest.txt");
    return 0;
}

inline int exit_code_for(const Error& e) {
    const std::string& c = e.code();
    if (c == "infeasible")
        return 3;
    if (c == "undefined_ratio" || c == "degenerate_class" || c == "empty_channel" ||
        c == "empty_sample" || c == "non_finite")
        return 4;
    return 2;
}

inline int cli_main(int argc, const char* const* argv) {
    try {
        cli_detail::Args args = cli_detail::parse_args(argc, argv);
        if (args.subcommand == "frontier")
            return cmd_frontier(args);
        if (args.subcommand == "certify")
            return cmd_certify(args);
        if (args.subcommand == "tradeoff")
            return cmd_tradeoff(args);
        if (args.subcommand == "bounds")
            return cmd_bounds(args);
        return cmd_synth(args);
    } catch (const Error& e) {
        std::string msg = e.what();
        for (char& ch : msg)
            if (ch == '\n')
                ch = ' ';
        std::cerr << "level=error code=" << e.code() << " msg=" << msg << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "level=error code=internal msg=" << e.what() << '\n';
        return 2;
    }
}

} // namespace fairfront
