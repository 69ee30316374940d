#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "fairfront/distributions.hpp"
#include "fairfront/rng.hpp"

using namespace fairfront;

namespace {

DiscreteJoint three_point() {
    return DiscreteJoint::make({
        {1.0 / 3.0, 0.9, 0.9, 0.9},
        {1.0 / 3.0, 0.5, 0.1, 0.1},
        {1.0 / 3.0, 0.1, 0.9, 0.9},
    });
}

DiscreteJoint random_joint(Rng& rng, std::size_t n) {
    std::vector<JointPoint> pts(n);
    double total = 0.0;
    for (JointPoint& p : pts) {
        p.mass = rng.uniform(0.05, 1.0);
        total += p.mass;
    }
    for (JointPoint& p : pts) {
        p.mass /= total;
        p.eta = rng.uniform(0.2, 0.8);
        p.eta_dp = rng.uniform(0.2, 0.8);
        p.eta_eo = rng.uniform(0.2, 0.8);
    }
    return DiscreteJoint::make(std::move(pts));
}

RandomizedClassifier random_classifier(Rng& rng, std::size_t n) {
    RandomizedClassifier f;
    f.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        f.values.push_back(rng.uniform());
    return f;
}

// plain summation route, independent of the Rates machinery
double cs_by_summation(const std::vector<double>& w, const std::vector<double>& p,
                       const std::vector<double>& f, double c) {
    double out = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        out += w[i] * ((1.0 - c) * p[i] * (1.0 - f[i]) + c * (1.0 - p[i]) * f[i]);
    return out;
}

} // namespace

TEST_CASE("joint construction validates and caches priors") {
    REQUIRE_THROWS_AS(DiscreteJoint::make({{-0.1, 0.5, 0.5, 0.5}, {1.1, 0.5, 0.5, 0.5}}),
                      InvalidArgument);
    REQUIRE_THROWS_AS(DiscreteJoint::make({{0.5, 1.5, 0.5, 0.5}, {0.5, 0.5, 0.5, 0.5}}),
                      InvalidArgument);
    REQUIRE_THROWS_AS(DiscreteJoint::make({{0.4, 0.5, 0.5, 0.5}, {0.4, 0.5, 0.5, 0.5}}),
                      InvalidArgument);

    Rng rng(21);
    DiscreteJoint d = random_joint(rng, 8);
    double pi = 0.0, pibar = 0.0;
    for (const JointPoint& p : d.points()) {
        pi += p.mass * p.eta;
        pibar += p.mass * p.eta_dp;
    }
    REQUIRE(d.pi() == pi);
    REQUIRE(d.pibar() == pibar);
}

TEST_CASE("rates on each channel") {
    DiscreteJoint d = three_point();

    SECTION("constant classifiers") {
        for (Channel ch : {Channel::Target, Channel::SensitiveDP, Channel::SensitiveEO}) {
            Rates all_on = rates_on(d, ch, constant_classifier(3, 1.0));
            REQUIRE(all_on.fnr == Catch::Approx(0.0).margin(1e-15));
            REQUIRE(all_on.fpr == Catch::Approx(1.0));
            Rates half = rates_on(d, ch, constant_classifier(3, 0.5));
            REQUIRE(half.fnr == Catch::Approx(0.5));
            REQUIRE(half.fpr == Catch::Approx(0.5));
        }
    }

    SECTION("worked 3-point instance") {
        Rates r = rates_on(d, Channel::Target, {{1.0, 0.0, 0.0}});
        REQUIRE(r.fnr == Catch::Approx(0.4));
        REQUIRE(r.fpr == Catch::Approx(1.0 / 15.0));
    }

    SECTION("degenerate channels are typed errors") {
        DiscreteJoint no_pos = DiscreteJoint::make({{0.5, 0.0, 0.5, 0.5}, {0.5, 0.0, 0.5, 0.5}});
        REQUIRE_THROWS_AS(rates_on(no_pos, Channel::Target, constant_classifier(2, 0.5)),
                          DegenerateClass);
        REQUIRE_THROWS_AS(rates_on(no_pos, Channel::SensitiveEO, constant_classifier(2, 0.5)),
                          DegenerateClass);
        DiscreteJoint no_bar = build_interval_dist(EtaKind::Indicator, 1.0, 11);
        REQUIRE_THROWS_AS(rates_on(no_bar, Channel::SensitiveDP, constant_classifier(11, 0.5)),
                          DegenerateClass);
    }

    SECTION("classifier alignment is checked") {
        REQUIRE_THROWS_AS(rates_on(d, Channel::Target, constant_classifier(2, 0.5)),
                          InvalidArgument);
        REQUIRE_THROWS_AS(rates_on(d, Channel::Target, {{0.5, 0.5, 1.5}}), InvalidArgument);
    }
}

TEST_CASE("sampled rates match exact rates") {
    Rng rng(22);
    DiscreteJoint d = random_joint(rng, 5);
    RandomizedClassifier f = random_classifier(rng, 5);

    Rates exact_t = rates_on(d, Channel::Target, f);
    Rates exact_dp = rates_on(d, Channel::SensitiveDP, f);
    Rates exact_eo = rates_on(d, Channel::SensitiveEO, f);

    const std::size_t N = 1000000;
    // counters: [channel][positive? fn : total_pos] etc.
    double fn_t = 0, np_t = 0, fp_t = 0, nn_t = 0;
    double fn_dp = 0, np_dp = 0, fp_dp = 0, nn_dp = 0;
    double fn_eo = 0, np_eo = 0, fp_eo = 0, nn_eo = 0;
    Rng sim(23);
    const std::vector<JointPoint>& pts = d.points();
    for (std::size_t it = 0; it < N; ++it) {
        double u = sim.uniform(), acc = 0.0;
        std::size_t i = 0;
        for (; i + 1 < pts.size(); ++i) {
            acc += pts[i].mass;
            if (u < acc)
                break;
        }
        const JointPoint& p = pts[i];
        bool y = sim.bernoulli(p.eta);
        bool ybar = sim.bernoulli(p.eta_dp);
        bool pred = sim.bernoulli(f.values[i]);
        if (y) {
            np_t += 1;
            if (!pred) fn_t += 1;
        } else {
            nn_t += 1;
            if (pred) fp_t += 1;
        }
        if (ybar) {
            np_dp += 1;
            if (!pred) fn_dp += 1;
        } else {
            nn_dp += 1;
            if (pred) fp_dp += 1;
        }
        if (y) {
            bool yeo = sim.bernoulli(p.eta_eo);
            if (yeo) {
                np_eo += 1;
                if (!pred) fn_eo += 1;
            } else {
                nn_eo += 1;
                if (pred) fp_eo += 1;
            }
        }
    }
    auto within = [](double est, double exact, double n_cond) {
        return std::abs(est - exact) <= 4.0 / std::sqrt(n_cond);
    };
    REQUIRE(within(fn_t / np_t, exact_t.fnr, np_t));
    REQUIRE(within(fp_t / nn_t, exact_t.fpr, nn_t));
    REQUIRE(within(fn_dp / np_dp, exact_dp.fnr, np_dp));
    REQUIRE(within(fp_dp / nn_dp, exact_dp.fpr, nn_dp));
    REQUIRE(within(fn_eo / np_eo, exact_eo.fnr, np_eo));
    REQUIRE(within(fp_eo / nn_eo, exact_eo.fpr, nn_eo));
}

TEST_CASE("EO reweighting equals explicit conditional construction") {
    Rng rng(24);
    for (int rep = 0; rep < 20; ++rep) {
        DiscreteJoint d = random_joint(rng, 6);
        RandomizedClassifier f = random_classifier(rng, 6);
        Rates via_weights = rates_on(d, Channel::SensitiveEO, f);

        std::vector<JointPoint> cond;
        for (const JointPoint& p : d.points())
            cond.push_back(JointPoint{p.mass * p.eta / d.pi(), p.eta_eo, p.eta_eo, p.eta_eo});
        Rates via_explicit = rates_on(DiscreteJoint::make(std::move(cond)), Channel::Target, f);

        REQUIRE(via_weights.fnr == Catch::Approx(via_explicit.fnr).margin(1e-12));
        REQUIRE(via_weights.fpr == Catch::Approx(via_explicit.fpr).margin(1e-12));
    }
}

TEST_CASE("lambda-relaxed objective") {
    DiscreteJoint d = three_point();
    RandomizedClassifier f{{1.0, 0.3, 0.0}};
    FairnessSpec spec;
    spec.cbar = CostParam{0.5};

    SECTION("lambda = 0 reduces to the target risk") {
        double v = full_risk(d, f, {0.5}, spec, 0.0).value;
        double direct = standard_cs_risk(rates_on(d, Channel::Target, f), d.pi(), {0.5}).value;
        REQUIRE(v == Catch::Approx(direct));
    }

    SECTION("identical channels with equal costs cancel at lambda = 1") {
        DiscreteJoint aligned = DiscreteJoint::make({
            {0.25, 0.9, 0.9, 0.9},
            {0.25, 0.5, 0.5, 0.5},
            {0.25, 0.3, 0.3, 0.3},
            {0.25, 0.7, 0.7, 0.7},
        });
        Rng rng(25);
        for (int rep = 0; rep < 10; ++rep) {
            RandomizedClassifier g = random_classifier(rng, 4);
            REQUIRE(full_risk(aligned, g, {0.35}, {FairnessForm::CostSensitive, {0.35},
                                                   Symmetrization::MinWithAnti, 0.0,
                                                   SensitiveChannel::DP},
                              1.0)
                        .value == Catch::Approx(0.0).margin(1e-12));
        }
    }

    SECTION("matches plain summation on both channels") {
        std::vector<double> m, eta, eta_dp;
        for (const JointPoint& p : d.points()) {
            m.push_back(p.mass);
            eta.push_back(p.eta);
            eta_dp.push_back(p.eta_dp);
        }
        double target = cs_by_summation(m, eta, f.values, 0.5);
        double fair_dp = cs_by_summation(m, eta_dp, f.values, 0.5);
        REQUIRE(full_risk(d, f, {0.5}, spec, 0.5).value ==
                Catch::Approx(target - 0.5 * fair_dp).margin(1e-12));

        std::vector<double> w_eo, eta_eo;
        for (const JointPoint& p : d.points()) {
            w_eo.push_back(p.mass * p.eta / d.pi());
            eta_eo.push_back(p.eta_eo);
        }
        FairnessSpec eo = spec;
        eo.channel = SensitiveChannel::EO;
        double fair_eo = cs_by_summation(w_eo, eta_eo, f.values, 0.5);
        REQUIRE(full_risk(d, f, {0.5}, eo, 0.5).value ==
                Catch::Approx(target - 0.5 * fair_eo).margin(1e-12));
    }

    SECTION("affine in the classifier") {
        Rng rng(26);
        DiscreteJoint r = random_joint(rng, 7);
        RandomizedClassifier f1 = random_classifier(rng, 7);
        RandomizedClassifier f2 = random_classifier(rng, 7);
        for (double alpha : {0.0, 0.25, 0.7, 1.0}) {
            RandomizedClassifier mix;
            for (std::size_t i = 0; i < 7; ++i)
                mix.values.push_back(alpha * f1.values[i] + (1.0 - alpha) * f2.values[i]);
            double lhs = full_risk(r, mix, {0.3}, spec, 0.8).value;
            double rhs = alpha * full_risk(r, f1, {0.3}, spec, 0.8).value +
                         (1.0 - alpha) * full_risk(r, f2, {0.3}, spec, 0.8).value;
            REQUIRE(lhs == Catch::Approx(rhs).margin(1e-12));
        }
    }
}

TEST_CASE("interval grid distributions") {
    REQUIRE_THROWS_AS(build_interval_dist(EtaKind::Indicator, 0.0, 2), InvalidArgument);
    REQUIRE_THROWS_AS(build_interval_dist(EtaKind::Indicator, 1.5, 11), InvalidArgument);

    SECTION("masses sum to one for assorted sizes") {
        for (std::size_t n : {3u, 10u, 101u, 2001u}) {
            DiscreteJoint d = build_interval_dist(EtaKind::Sigmoid, 0.3, n);
            double s = 0.0;
            for (const JointPoint& p : d.points())
                s += p.mass;
            REQUIRE(s == Catch::Approx(1.0).margin(1e-12));
        }
    }

    SECTION("aligned thresholds make the two posteriors identical") {
        DiscreteJoint d = build_interval_dist(EtaKind::Indicator, 0.0, 501);
        for (const JointPoint& p : d.points())
            REQUIRE(p.eta == p.eta_dp);
    }

    SECTION("sigmoid on the symmetric grid is nearly balanced") {
        DiscreteJoint d = build_interval_dist(EtaKind::Sigmoid, 0.0, 2001);
        REQUIRE(std::abs(d.pi() - 0.5) <= 1e-3);
    }
}

TEST_CASE("rotated-gaussian sampler") {
    SECTION("seed determinism") {
        SampleSet a = sample_rotated_gaussians(200, 0.5, 99);
        SampleSet b = sample_rotated_gaussians(200, 0.5, 99);
        REQUIRE(a.x == b.x);
        REQUIRE(a.y == b.y);
        REQUIRE(a.ybar == b.ybar);
    }

    SECTION("class prior near one half") {
        SampleSet s = sample_rotated_gaussians(10000, 0.5, 7);
        double mean_y = 0.0;
        for (int v : s.y)
            mean_y += v;
        mean_y /= 10000.0;
        REQUIRE(std::abs(mean_y - 0.5) <= 0.015);
    }

    SECTION("zero rotation redraws the Bayes posterior") {
        SampleSet s = sample_rotated_gaussians(10000, 0.0, 8);
        detail::Gauss2 g1{2.0, 2.0, 5.0, 1.0, 5.0};
        detail::Gauss2 g0{-2.0, -2.0, 10.0, 1.0, 3.0};
        double agree = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            bool sign = g1.logpdf(s.x[i][0], s.x[i][1]) > g0.logpdf(s.x[i][0], s.x[i][1]);
            if ((s.ybar[i] == 1) == sign)
                agree += 1.0;
        }
        REQUIRE(agree / 10000.0 >= 0.5);
    }
}

TEST_CASE("empirical joint from a sample") {
    ProbModel half = [](const std::vector<double>&) { return 0.5; };
    ProbModel first = [](const std::vector<double>& r) { return r[0]; };

    SECTION("single row carries all the mass") {
        SampleSet s;
        s.x = {{0.7}};
        s.y = {1};
        s.ybar = {0};
        DiscreteJoint d = empirical_joint(s, first, half);
        REQUIRE(d.size() == 1);
        REQUIRE(d.points()[0].mass == 1.0);
        REQUIRE(d.points()[0].eta == 0.7);
        REQUIRE(d.points()[0].eta_dp == 0.5);
        REQUIRE(d.points()[0].eta_eo == 0.5);
    }

    SECTION("weights are renormalized") {
        SampleSet s;
        s.x = {{0.1}, {0.2}, {0.3}};
        s.y = {0, 1, 0};
        s.ybar = {1, 0, 1};
        s.weight = {2.0, 2.0, 4.0};
        DiscreteJoint d = empirical_joint(s, half, half);
        REQUIRE(d.points()[0].mass == Catch::Approx(0.25));
        REQUIRE(d.points()[1].mass == Catch::Approx(0.25));
        REQUIRE(d.points()[2].mass == Catch::Approx(0.5));
    }

    SECTION("separate EO model lands in the EO field") {
        SampleSet s;
        s.x = {{0.25}, {0.75}};
        s.y = {0, 1};
        s.ybar = {0, 1};
        ProbModel quarter = [](const std::vector<double>&) { return 0.25; };
        DiscreteJoint d = empirical_joint(s, first, half, quarter);
        for (const JointPoint& p : d.points()) {
            REQUIRE(p.eta_dp == 0.5);
            REQUIRE(p.eta_eo == 0.25);
        }
    }

    SECTION("empty sample is rejected") {
        REQUIRE_THROWS_AS(empirical_joint(SampleSet{}, half, half), EmptySample);
    }
}

TEST_CASE("distribution CSV round trip") {
    Rng rng(27);
    DiscreteJoint d = random_joint(rng, 9);
    std::ostringstream out;
    write_discrete_joint(out, d);

    std::istringstream in(out.str());
    DiscreteJoint back = read_discrete_joint(in);
    REQUIRE(back.size() == d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        REQUIRE(back.points()[i].mass == d.points()[i].mass);
        REQUIRE(back.points()[i].eta == d.points()[i].eta);
        REQUIRE(back.points()[i].eta_dp == d.points()[i].eta_dp);
        REQUIRE(back.points()[i].eta_eo == d.points()[i].eta_eo);
    }

    std::istringstream bad_header("m,e,edp,eeo\n0.5,0.5,0.5,0.5\n");
    REQUIRE_THROWS_AS(read_discrete_joint(bad_header), SchemaMismatch);
    std::istringstream short_row("mass,eta,eta_dp,eta_eo\n0.5,0.5,0.5\n");
    REQUIRE_THROWS_AS(read_discrete_joint(short_row), ParseError);
    std::istringstream bad_num("mass,eta,eta_dp,eta_eo\n1.0,x,0.5,0.5\n");
    REQUIRE_THROWS_AS(read_discrete_joint(bad_num), ParseError);
}
