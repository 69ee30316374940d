#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "fairfront/errors.hpp"
#include "fairfront/format.hpp"
#include "fairfront/measures.hpp"
#include "fairfront/rng.hpp"

namespace fairfront {

// One atom of a finite-support joint distribution over (X, Y, Ybar):
// mass = Pr(X = x), eta = Pr(Y=1 | x), eta_dp = Pr(Ybar=1 | x),
// eta_eo = Pr(Ybar=1 | x, Y=1).
struct JointPoint {
    double mass = 0.0;
    double eta = 0.0;
    double eta_dp = 0.0;
    double eta_eo = 0.0;
};

class DiscreteJoint {
public:
    static DiscreteJoint make(std::vector<JointPoint> pts) {
        if (pts.empty())
            throw InvalidArgument("DiscreteJoint: empty support");
        double sum = 0.0, comp = 0.0;
        for (const JointPoint& p : pts) {
            if (!(p.mass >= 0.0))
                throw InvalidArgument("DiscreteJoint: negative mass");
            for (double v : {p.eta, p.eta_dp, p.eta_eo})
                if (!(v >= 0.0 && v <= 1.0))
                    throw InvalidArgument("DiscreteJoint: probability outside [0,1]");
            // Kahan summation so the unit-mass check is not at the mercy of
            // support size
            double t = sum + p.mass;
            comp += std::abs(sum) >= std::abs(p.mass) ? (sum - t) + p.mass : (p.mass - t) + sum;
            sum = t;
        }
        if (std::abs(sum + comp - 1.0) > 1e-12)
            throw InvalidArgument("DiscreteJoint: masses must sum to 1");
        DiscreteJoint d;
        d.points_ = std::move(pts);
        for (const JointPoint& p : d.points_) {
            d.pi_ += p.mass * p.eta;
            d.pibar_ += p.mass * p.eta_dp;
        }
        return d;
    }

    const std::vector<JointPoint>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    double pi() const { return pi_; }
    double pibar() const { return pibar_; }

private:
    std::vector<JointPoint> points_;
    double pi_ = 0.0;
    double pibar_ = 0.0;
};

// f(x) in [0,1], index-aligned with DiscreteJoint.points().
struct RandomizedClassifier {
    std::vector<double> values;
};

inline RandomizedClassifier constant_classifier(std::size_t n, double v) {
    return RandomizedClassifier{std::vector<double>(n, v)};
}

enum class Channel { Target, SensitiveDP, SensitiveEO };

// A channel reduces the joint to a weighted binary problem: weights w over
// support points and a positive-class probability p per point. Target and
// SensitiveDP keep the X-marginal; SensitiveEO reweights by eta/pi, which is
// the importance-weighted form of conditioning on Y = 1.
struct ChannelView {
    std::vector<double> w;
    std::vector<double> p;
    double pos_mass = 0.0;
    double neg_mass = 0.0;
};

inline ChannelView make_channel_view(const DiscreteJoint& dist, Channel channel) {
    ChannelView v;
    const std::vector<JointPoint>& pts = dist.points();
    v.w.reserve(pts.size());
    v.p.reserve(pts.size());
    for (const JointPoint& pt : pts) {
        switch (channel) {
        case Channel::Target:
            v.w.push_back(pt.mass);
            v.p.push_back(pt.eta);
            break;
        case Channel::SensitiveDP:
            v.w.push_back(pt.mass);
            v.p.push_back(pt.eta_dp);
            break;
        case Channel::SensitiveEO:
            if (dist.pi() <= 0.0)
                throw DegenerateClass("SensitiveEO channel needs pi > 0");
            v.w.push_back(pt.mass * pt.eta / dist.pi());
            v.p.push_back(pt.eta_eo);
            break;
        }
    }
    for (std::size_t i = 0; i < v.w.size(); ++i) {
        v.pos_mass += v.w[i] * v.p[i];
        v.neg_mass += v.w[i] * (1.0 - v.p[i]);
    }
    return v;
}

inline void check_aligned(const DiscreteJoint& dist, const RandomizedClassifier& f) {
    if (f.values.size() != dist.size())
        throw InvalidArgument("classifier length does not match distribution support");
    for (double v : f.values)
        if (!(v >= 0.0 && v <= 1.0))
            throw InvalidArgument("classifier values must lie in [0,1]");
}

// Class-conditional error rates of f on the chosen channel:
// FNR = E[1-f | positive], FPR = E[f | negative].
inline Rates rates_on(const DiscreteJoint& dist, Channel channel, const RandomizedClassifier& f) {
    check_aligned(dist, f);
    ChannelView v = make_channel_view(dist, channel);
    if (v.pos_mass <= 0.0 || v.neg_mass <= 0.0)
        throw DegenerateClass("rates_on: conditioning class has zero mass");
    double fn = 0.0, fp = 0.0;
    for (std::size_t i = 0; i < v.w.size(); ++i) {
        fn += v.w[i] * v.p[i] * (1.0 - f.values[i]);
        fp += v.w[i] * (1.0 - v.p[i]) * f.values[i];
    }
    return Rates{fn / v.pos_mass, fp / v.neg_mass};
}

// The lambda-relaxed objective: standard cost-sensitive target risk minus
// lambda times the standard cost-sensitive risk on the sensitive channel.
// Both terms are unbalanced (prior-weighted) risks.
inline RiskValue full_risk(const DiscreteJoint& dist, const RandomizedClassifier& f,
                           const CostParam& c, const FairnessSpec& fairness, double lambda) {
    Rates rt = rates_on(dist, Channel::Target, f);
    double target = standard_cs_risk(rt, dist.pi(), c).value;
    Channel sch = fairness.channel == SensitiveChannel::DP ? Channel::SensitiveDP
                                                           : Channel::SensitiveEO;
    ChannelView view = make_channel_view(dist, sch);
    Rates rf = rates_on(dist, sch, f);
    double fair = standard_cs_risk(rf, view.pos_mass, fairness.cbar).value;
    return {target - lambda * fair};
}

enum class EtaKind { Indicator, Sigmoid };

// Uniform grid on [-1,1] with eta either a step at 0 or a sigmoid, and the
// sensitive posterior a step at t. Ybar is taken conditionally independent
// of Y given X, so the EO posterior coincides with the DP one.
inline DiscreteJoint build_interval_dist(EtaKind eta_kind, double t, std::size_t n_points = 2001) {
    if (n_points < 3)
        throw InvalidArgument("build_interval_dist: need at least 3 grid points");
    if (!(t >= -1.0 && t <= 1.0))
        throw InvalidArgument("build_interval_dist: t must lie in [-1,1]");
    std::vector<JointPoint> pts;
    pts.reserve(n_points);
    const double mass = 1.0 / static_cast<double>(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        double x = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n_points - 1);
        double eta = eta_kind == EtaKind::Indicator ? (x > 0.0 ? 1.0 : 0.0)
                                                    : 1.0 / (1.0 + std::exp(-x));
        double etabar = x > t ? 1.0 : 0.0;
        pts.push_back(JointPoint{mass, eta, etabar, etabar});
    }
    return DiscreteJoint::make(std::move(pts));
}

// Feature rows plus binary target and sensitive labels; weights optional
// (empty means uniform). dropped_rows records rows skipped at ingestion.
struct SampleSet {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    std::vector<int> ybar;
    std::vector<double> weight;
    std::size_t dropped_rows = 0;

    std::size_t size() const { return x.size(); }
    std::size_t feature_dim() const { return x.empty() ? 0 : x.front().size(); }
};

namespace detail {

struct Gauss2 {
    double mx, my;
    double a, b, c;  // covariance [[a,b],[b,c]]

    // log density, evaluated stably via the explicit 2x2 inverse
    double logpdf(double x, double y) const {
        double det = a * c - b * b;
        double dx = x - mx, dy = y - my;
        double quad = (c * dx * dx - 2.0 * b * dx * dy + a * dy * dy) / det;
        return -std::log(2.0 * 3.141592653589793) - 0.5 * std::log(det) - 0.5 * quad;
    }

    // lower Cholesky factor
    void chol(double& l11, double& l21, double& l22) const {
        l11 = std::sqrt(a);
        l21 = b / l11;
        l22 = std::sqrt(c - l21 * l21);
    }
};

} // namespace detail

// Two-class 2-D Gaussian mixture with equal priors; the sensitive label is
// drawn from the class posterior evaluated at the point rotated by phi, so
// phi = 0 makes Ybar a fresh draw of the Bayes posterior itself and larger
// phi decouples the two labels.
inline SampleSet sample_rotated_gaussians(std::size_t n, double phi, std::uint64_t seed) {
    if (n < 1)
        throw InvalidArgument("sample_rotated_gaussians: need n >= 1");
    const detail::Gauss2 g1{2.0, 2.0, 5.0, 1.0, 5.0};
    const detail::Gauss2 g0{-2.0, -2.0, 10.0, 1.0, 3.0};
    double l11_1, l21_1, l22_1, l11_0, l21_0, l22_0;
    g1.chol(l11_1, l21_1, l22_1);
    g0.chol(l11_0, l21_0, l22_0);
    const double cph = std::cos(phi), sph = std::sin(phi);

    SampleSet s;
    s.x.reserve(n);
    s.y.reserve(n);
    s.ybar.reserve(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        int y = rng.bernoulli(0.5) ? 1 : 0;
        auto [z1, z2] = rng.normal_pair();
        double px, py;
        if (y == 1) {
            px = g1.mx + l11_1 * z1;
            py = g1.my + l21_1 * z1 + l22_1 * z2;
        } else {
            px = g0.mx + l11_0 * z1;
            py = g0.my + l21_0 * z1 + l22_0 * z2;
        }
        double rx = cph * px - sph * py;
        double ry = sph * px + cph * py;
        // posterior Pr(Y=1 | rotated point) with equal class priors
        double eta_rot = 1.0 / (1.0 + std::exp(g0.logpdf(rx, ry) - g1.logpdf(rx, ry)));
        int ybar = rng.bernoulli(eta_rot) ? 1 : 0;
        s.x.push_back({px, py});
        s.y.push_back(y);
        s.ybar.push_back(ybar);
    }
    return s;
}

using ProbModel = std::function<double(const std::vector<double>&)>;

// Turn a sample plus fitted class-probability models into a finite joint:
// one support point per row, masses from the (normalized) row weights. The
// EO posterior model defaults to the DP one when not supplied.
inline DiscreteJoint empirical_joint(const SampleSet& sample, const ProbModel& eta_hat,
                                     const ProbModel& etabar_hat,
                                     const ProbModel& etaeo_hat = nullptr) {
    if (sample.size() == 0)
        throw EmptySample("empirical_joint: no rows");
    const ProbModel& eo = etaeo_hat ? etaeo_hat : etabar_hat;
    double total = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double w = sample.weight.empty() ? 1.0 : sample.weight[i];
        if (!(w >= 0.0))
            throw InvalidArgument("empirical_joint: negative weight");
        total += w;
    }
    if (total <= 0.0)
        throw InvalidArgument("empirical_joint: zero total weight");
    std::vector<JointPoint> pts;
    pts.reserve(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double w = sample.weight.empty() ? 1.0 : sample.weight[i];
        const std::vector<double>& row = sample.x[i];
        pts.push_back(JointPoint{w / total, eta_hat(row), etabar_hat(row), eo(row)});
    }
    return DiscreteJoint::make(std::move(pts));
}

inline void write_discrete_joint(std::ostream& os, const DiscreteJoint& dist) {
    os << "mass,eta,eta_dp,eta_eo\n";
    for (const JointPoint& p : dist.points()) {
        os << format_double(p.mass) << ',' << format_double(p.eta) << ','
           << format_double(p.eta_dp) << ',' << format_double(p.eta_eo) << '\n';
    }
}

inline DiscreteJoint read_discrete_joint(std::istream& is) {
    std::string line;
    if (!std::getline(is, line))
        throw ParseError("distribution file is empty");
    if (trim(line) != "mass,eta,eta_dp,eta_eo")
        throw SchemaMismatch("expected header mass,eta,eta_dp,eta_eo");
    std::vector<JointPoint> pts;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (trim(line).empty())
            continue;
        std::vector<std::string_view> cells = split(line, ',');
        if (cells.size() != 4)
            throw ParseError("line " + std::to_string(lineno) + ": expected 4 fields");
        JointPoint p;
        p.mass = parse_double(cells[0]);
        p.eta = parse_double(cells[1]);
        p.eta_dp = parse_double(cells[2]);
        p.eta_eo = parse_double(cells[3]);
        pts.push_back(p);
    }
    return DiscreteJoint::make(std::move(pts));
}

} // namespace fairfront
