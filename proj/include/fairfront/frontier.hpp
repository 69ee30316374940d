#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "fairfront/bayes.hpp"
#include "fairfront/distributions.hpp"
#include "fairfront/errors.hpp"
#include "fairfront/measures.hpp"

namespace fairfront {

// min a.f subject to lo <= k_offset + b.f <= hi over f in [0,1]^n, where
// a(x) = m(x)(c - eta(x)) is the linear part of the target risk and
// k_offset + b.f is the (standard, unbalanced) fairness risk. cbar_eff is
// the standard cost the fairness risk is measured at after any balanced
// reparameterization; dual sweeps need it to rebuild the pointwise scorer.
struct BoxedLP {
    std::vector<double> a;
    std::vector<double> b;
    double k_offset = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    CostParam cbar_eff{0.5};
    SensitiveChannel channel = SensitiveChannel::DP;
};

enum class LPStatus { Optimal, Infeasible };

struct LPSolution {
    RandomizedClassifier f;
    double objective = 0.0;    // a.f, the linear part of the target risk
    double dual_lambda = 0.0;  // lower-bound multiplier minus upper-bound one
    std::optional<std::size_t> fractional_index;
    LPStatus status = LPStatus::Optimal;
};

struct FrontierCurve {
    std::vector<double> taus;
    std::vector<double> values;   // F(tau), NaN where infeasible
    std::vector<double> lambdas;  // dual multipliers, NaN where infeasible
    std::vector<LPStatus> statuses;
    double tau_star = 0.0;
    double tau_max = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

// standard cost at which the balanced risk with cost cb is measured on a
// channel with base rate pi_ch, and the scale factor relating the two:
// CS_standard(., gamma) = scale * CS_bal(., cb)
struct BalancedMap {
    double gamma;
    double scale;
};

inline BalancedMap balanced_to_standard(double cb, double pi_ch) {
    double gamma = cb * pi_ch / (cb * pi_ch + (1.0 - cb) * (1.0 - pi_ch));
    double scale = pi_ch * (1.0 - gamma) + (1.0 - pi_ch) * gamma;
    return {gamma, scale};
}

} // namespace detail

// Assemble the boxed LP for the fairness-constrained problem at level
// fairness.tau. The explicit cbar is the standard fairness cost for the
// cost-sensitive form; the MD and DI forms derive their own cost from tau
// (MD at balanced cost 1/2, DI at balanced cost 1/(1+tau)) and map it to a
// standard cost on the channel.
inline BoxedLP build_lp(const DiscreteJoint& dist, const CostParam& c, const CostParam& cbar,
                        const FairnessSpec& fairness) {
    const double tau = fairness.tau;
    if (!(tau >= 0.0 && tau <= 1.0))
        throw InvalidArgument("build_lp: tau must lie in [0,1]");
    if (fairness.symmetrization == Symmetrization::PriorWeighted)
        throw InvalidArgument("build_lp: prior-weighted symmetrization has no boxed form");
    const bool symmetric = fairness.symmetrization == Symmetrization::MinWithAnti;
    const double inf = std::numeric_limits<double>::infinity();

    Channel ch = fairness.channel == SensitiveChannel::DP ? Channel::SensitiveDP
                                                          : Channel::SensitiveEO;
    ChannelView view = make_channel_view(dist, ch);
    const double pi_ch = view.pos_mass;

    BoxedLP lp;
    lp.channel = fairness.channel;
    double gamma = cbar.c;
    switch (fairness.form) {
    case FairnessForm::CostSensitive:
        if (symmetric && tau > 0.5)
            throw InvalidLevel("build_lp: symmetrized cost-sensitive level above 1/2");
        lp.lo = tau;
        lp.hi = symmetric ? 1.0 - tau : inf;
        break;
    case FairnessForm::MeanDifference: {
        if (!(pi_ch > 0.0 && pi_ch < 1.0))
            throw DegenerateClass("build_lp: channel base rate must be interior");
        // |MD| <= tau is a balanced-risk band at cost 1/2; in standard units
        // the band scales by 2*pi(1-pi) around its center
        detail::BalancedMap bm = detail::balanced_to_standard(0.5, pi_ch);
        gamma = bm.gamma;
        lp.lo = bm.scale * 0.5 * (1.0 - tau);
        lp.hi = symmetric ? bm.scale * 0.5 * (1.0 + tau) : inf;
        break;
    }
    case FairnessForm::DisparateImpact: {
        if (!(pi_ch > 0.0 && pi_ch < 1.0))
            throw DegenerateClass("build_lp: channel base rate must be interior");
        // DI >= tau is a superlevel set of the balanced risk at cost
        // 1/(1+tau); the symmetrized version adds the mirrored upper bound
        double cb = 1.0 / (1.0 + tau);
        detail::BalancedMap bm = detail::balanced_to_standard(cb, pi_ch);
        gamma = bm.gamma;
        lp.lo = bm.scale * (1.0 - cb);
        lp.hi = symmetric ? bm.scale * cb : inf;
        break;
    }
    }
    lp.cbar_eff = CostParam{gamma};
    lp.k_offset = (1.0 - gamma) * pi_ch;

    const std::vector<JointPoint>& pts = dist.points();
    lp.a.reserve(pts.size());
    lp.b.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        lp.a.push_back(pts[i].mass * (c.c - pts[i].eta));
        lp.b.push_back(view.w[i] * (gamma - view.p[i]));
    }
    return lp;
}

// Exact solver for the single-constraint box LP. The minimizer of a.f alone
// is f0 = 1[a < 0]; if it violates a bound, coordinates are flipped in order
// of increasing cost-per-unit of constraint movement (the ratio a/b), which
// is the fractional-knapsack exchange argument and hence exact. At most the
// final tie-group is split, giving at most one fractional coordinate.
inline LPSolution solve_boxed_lp(const BoxedLP& lp) {
    const std::size_t n = lp.a.size();
    if (lp.b.size() != n)
        throw InvalidArgument("solve_boxed_lp: coefficient lengths differ");
    if (!(lp.lo <= lp.hi))
        throw InvalidArgument("solve_boxed_lp: lo > hi");
    const double L = lp.lo - lp.k_offset;
    const double U = lp.hi - lp.k_offset;

    LPSolution sol;
    sol.f.values.assign(n, 0.0);
    double B = 0.0, babs = 0.0, bmin = 0.0, bmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (lp.a[i] < 0.0) {
            sol.f.values[i] = 1.0;
            B += lp.b[i];
        }
        babs += std::abs(lp.b[i]);
        bmin += std::min(0.0, lp.b[i]);
        bmax += std::max(0.0, lp.b[i]);
    }
    const double tol = 1e-12 * std::max(1.0, babs);

    auto finish = [&](double lambda) {
        sol.dual_lambda = lambda;
        sol.objective = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            sol.objective += lp.a[i] * sol.f.values[i];
        return sol;
    };

    if (B >= L && B <= U)
        return finish(0.0);

    const bool push_up = B < L;
    if (push_up ? bmax < L - tol : bmin > U + tol) {
        sol.status = LPStatus::Infeasible;
        sol.objective = std::numeric_limits<double>::quiet_NaN();
        sol.dual_lambda = std::numeric_limits<double>::quiet_NaN();
        return sol;
    }

    // coordinates able to move B toward the violated bound, keyed by the
    // objective cost per unit of movement
    struct Move {
        double r;
        std::size_t i;
    };
    std::vector<Move> moves;
    for (std::size_t i = 0; i < n; ++i) {
        if (lp.b[i] == 0.0)
            continue;
        bool on = lp.a[i] < 0.0;
        bool helps = push_up ? (lp.b[i] > 0.0) != on : (lp.b[i] > 0.0) == on;
        if (helps)
            moves.push_back({lp.a[i] / lp.b[i], i});
    }
    std::sort(moves.begin(), moves.end(), [&](const Move& x, const Move& y) {
        if (x.r != y.r)
            return push_up ? x.r < y.r : x.r > y.r;
        return x.i < y.i;
    });

    double need = push_up ? L - B : B - U;
    std::size_t g = 0;
    while (g < moves.size()) {
        std::size_t h = g;
        double gain = 0.0;
        while (h < moves.size() && moves[h].r == moves[g].r) {
            gain += std::abs(lp.b[moves[h].i]);
            ++h;
        }
        if (gain < need - tol) {
            // whole group flips, bound still violated
            for (std::size_t k = g; k < h; ++k) {
                std::size_t i = moves[k].i;
                sol.f.values[i] = 1.0 - sol.f.values[i];
            }
            need -= gain;
            g = h;
            continue;
        }
        if (gain <= need + tol) {
            // the bound is met exactly at the group boundary: the dual is
            // flat on the whole open interval up to the next ratio, so take
            // its midpoint (keeping every score strictly signed there)
            for (std::size_t k = g; k < h; ++k) {
                std::size_t i = moves[k].i;
                sol.f.values[i] = 1.0 - sol.f.values[i];
            }
            double r = moves[g].r;
            double next = h < moves.size() ? moves[h].r : r + (push_up ? 2.0 : -2.0);
            return finish((r + next) / 2.0);
        }
        // crossing strictly inside the group: flip in index order and give
        // the crossing coordinate the fractional remainder
        for (std::size_t k = g; k < h; ++k) {
            std::size_t i = moves[k].i;
            double cap = std::abs(lp.b[i]);
            if (need >= cap) {
                sol.f.values[i] = 1.0 - sol.f.values[i];
                need -= cap;
            } else if (need > 0.0) {
                double frac = need / cap;
                sol.f.values[i] = sol.f.values[i] == 1.0 ? 1.0 - frac : frac;
                sol.fractional_index = i;
                need = 0.0;
            }
        }
        return finish(moves[g].r);
    }
    // numerically short of the bound despite the aggregate check; treat as
    // exactly met at the last ratio
    if (need <= tol && !moves.empty()) {
        double r = moves.back().r;
        return finish(r + (push_up ? 1.0 : -1.0));
    }
    sol.status = LPStatus::Infeasible;
    sol.objective = std::numeric_limits<double>::quiet_NaN();
    sol.dual_lambda = std::numeric_limits<double>::quiet_NaN();
    return sol;
}

// minimum of a.f with the fairness constraint removed
inline double unconstrained_objective(const BoxedLP& lp) {
    double v = 0.0;
    for (double ai : lp.a)
        v += std::min(0.0, ai);
    return v;
}

// Symmetrized fairness value of the canonical unconstrained optimum
// f0(x) = 1[eta(x) > c]: the largest level the fairness constraint can
// demand before it starts to bite.
inline double tau_star_direct(const DiscreteJoint& dist, const CostParam& c,
                              const FairnessSpec& fairness) {
    ScorerParams p;
    p.c = c;
    p.channel = fairness.channel;
    RandomizedClassifier f0 = bayes_classifier(dist, p);

    Channel ch = fairness.channel == SensitiveChannel::DP ? Channel::SensitiveDP
                                                          : Channel::SensitiveEO;
    ChannelView view = make_channel_view(dist, ch);
    Rates r = rates_on(dist, ch, f0);
    Rates anti{1.0 - r.fnr, 1.0 - r.fpr};

    switch (fairness.form) {
    case FairnessForm::CostSensitive: {
        double v = standard_cs_risk(r, view.pos_mass, fairness.cbar).value;
        double v_anti = standard_cs_risk(anti, view.pos_mass, fairness.cbar).value;
        double alpha = view.pos_mass * view.neg_mass;
        return symmetrize({v}, {v_anti}, fairness.symmetrization, alpha).value;
    }
    case FairnessForm::MeanDifference: {
        double md = mean_difference(r).value;
        if (fairness.symmetrization == Symmetrization::MinWithAnti)
            return std::abs(md);
        if (fairness.symmetrization == Symmetrization::None)
            return std::max(0.0, md);
        throw InvalidArgument("tau_star_direct: unsupported symmetrization for MD");
    }
    case FairnessForm::DisparateImpact: {
        double di = disparate_impact(r).value;
        if (fairness.symmetrization == Symmetrization::None)
            return di;
        if (fairness.symmetrization == Symmetrization::MinWithAnti) {
            // the mirrored ratio is unconstrained when the positive class is
            // always predicted positive
            if (r.fnr == 0.0)
                return di;
            return std::min(di, disparate_impact(anti).value);
        }
        throw InvalidArgument("tau_star_direct: unsupported symmetrization for DI");
    }
    }
    throw InvalidArgument("tau_star_direct: unknown form");
}

struct MinCsFdiv {
    double min_cs = 0.0;
    double neg_fdiv = 0.0;
};

// Two routes to the channel's minimal cost-sensitive risk: the pointwise
// minimum rule, and the negated f-divergence between the class-conditionals
// with phi(t) = -min((1-cbar) pi t, cbar (1-pi)). The contract is equality.
inline MinCsFdiv min_cs_and_fdiv(const DiscreteJoint& dist, Channel channel,
                                 const CostParam& cbar) {
    ChannelView view = make_channel_view(dist, channel);
    if (view.pos_mass <= 0.0 || view.neg_mass <= 0.0)
        throw DegenerateClass("min_cs_and_fdiv: both classes need positive mass");
    const double cb = cbar.c;
    const double pi = view.pos_mass;
    MinCsFdiv out;
    double ifdiv = 0.0;
    for (std::size_t i = 0; i < view.w.size(); ++i) {
        out.min_cs += view.w[i] * std::min((1.0 - cb) * view.p[i], cb * (1.0 - view.p[i]));
        double pcond = view.w[i] * view.p[i] / pi;
        double qcond = view.w[i] * (1.0 - view.p[i]) / view.neg_mass;
        // phi has linear growth with slope 0 at infinity, so Q = 0 atoms
        // contribute nothing
        if (qcond > 0.0) {
            double t = pcond / qcond;
            ifdiv += qcond * -std::min((1.0 - cb) * pi * t, cb * view.neg_mass);
        }
    }
    out.neg_fdiv = -ifdiv;
    return out;
}

// Decomposed no-penalty cutoff: expected pointwise disalignment between the
// two posteriors plus the channel's minimal cost-sensitive risk, the latter
// entering through the f-divergence route. The min over the two signed
// variants mirrors the min over f0 and its complement.
inline double tau_star_decomposed(const DiscreteJoint& dist, const CostParam& c,
                                  const CostParam& cbar) {
    if (!(dist.pibar() > 0.0 && dist.pibar() < 1.0))
        throw DegenerateClass("tau_star_decomposed: sensitive base rate must be interior");
    MinCsFdiv mcf = min_cs_and_fdiv(dist, Channel::SensitiveDP, cbar);
    double eb1 = 0.0, eb2 = 0.0;
    for (const JointPoint& pt : dist.points()) {
        double gap = pt.eta_dp - cbar.c;
        if (gap * (pt.eta - c.c) < 0.0)
            eb1 += pt.mass * std::abs(gap);
        if (gap * (c.c - pt.eta) < 0.0)
            eb2 += pt.mass * std::abs(gap);
    }
    return std::min(eb1 + mcf.neg_fdiv, eb2 + mcf.neg_fdiv);
}

// E[(c - eta)(f - 1[eta > c])]: excess standard cost-sensitive risk of f
// over the unconstrained optimum. Exact for randomized f.
inline double regret_cs(const DiscreteJoint& dist, const RandomizedClassifier& f,
                        const CostParam& c) {
    check_aligned(dist, f);
    double out = 0.0;
    const std::vector<JointPoint>& pts = dist.points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double opt = pts[i].eta > c.c ? 1.0 : 0.0;
        out += pts[i].mass * (c.c - pts[i].eta) * (f.values[i] - opt);
    }
    return out;
}

// Absolute-value form of the same regret, defined for deterministic f only:
// mass of the disagreement region weighted by the margin |eta - c|.
inline double regret_cs_absolute(const DiscreteJoint& dist, const RandomizedClassifier& f,
                                 const CostParam& c) {
    check_aligned(dist, f);
    double out = 0.0;
    const std::vector<JointPoint>& pts = dist.points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double v = f.values[i];
        if (v != 0.0 && v != 1.0)
            throw InvalidArgument("regret_cs_absolute: classifier must be deterministic");
        if ((pts[i].eta - c.c) * (2.0 * v - 1.0) < 0.0)
            out += pts[i].mass * std::abs(pts[i].eta - c.c);
    }
    return out;
}

inline FrontierCurve compute_frontier(const DiscreteJoint& dist, const CostParam& c,
                                      const FairnessSpec& fairness,
                                      const std::vector<double>& tau_grid) {
    if (tau_grid.empty())
        throw InvalidArgument("compute_frontier: empty grid");
    for (std::size_t i = 1; i < tau_grid.size(); ++i)
        if (!(tau_grid[i] >= tau_grid[i - 1]))
            throw InvalidArgument("compute_frontier: grid must be ascending");

    FrontierCurve curve;
    curve.taus = tau_grid;
    curve.tau_star = tau_star_direct(dist, c, fairness);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    double baseline = nan;
    for (double tau : tau_grid) {
        FairnessSpec spec = fairness;
        spec.tau = tau;
        BoxedLP lp = build_lp(dist, c, fairness.cbar, spec);
        if (std::isnan(baseline))
            baseline = unconstrained_objective(lp);
        LPSolution sol = solve_boxed_lp(lp);
        if (sol.status == LPStatus::Optimal) {
            curve.values.push_back(sol.objective - baseline);
            curve.lambdas.push_back(sol.dual_lambda);
            curve.tau_max = tau;
        } else {
            curve.values.push_back(nan);
            curve.lambdas.push_back(nan);
        }
        curve.statuses.push_back(sol.status);
    }
    return curve;
}

struct FrontierIdentity {
    double F_lp = 0.0;
    double F_regret = 0.0;
    std::optional<double> F_bregman;
};

// Three routes to the frontier value at one level: the LP objective gap, the
// cost-sensitive regret of the LP solution, and (for deterministic
// solutions) the dual-score disalignment mass.
inline FrontierIdentity frontier_regret_identity(const DiscreteJoint& dist, const CostParam& c,
                                                 const FairnessSpec& fairness, double tau) {
    FairnessSpec spec = fairness;
    spec.tau = tau;
    BoxedLP lp = build_lp(dist, c, fairness.cbar, spec);
    LPSolution sol = solve_boxed_lp(lp);
    if (sol.status == LPStatus::Infeasible)
        throw InfeasibleConstraint("frontier_regret_identity: level is infeasible");

    FrontierIdentity out;
    out.F_lp = sol.objective - unconstrained_objective(lp);
    out.F_regret = regret_cs(dist, sol.f, c);
    if (!sol.fractional_index) {
        double sum = 0.0;
        for (std::size_t i = 0; i < lp.a.size(); ++i)
            if (lp.a[i] * (lp.a[i] - sol.dual_lambda * lp.b[i]) < 0.0)
                sum += std::abs(lp.a[i]);
        out.F_bregman = sum;
    }
    return out;
}

struct DualSweep {
    double best_lambda = 0.0;
    double dual_value = 0.0;
    double duality_gap = 0.0;
};

// Maximize the Lagrangian dual over a lambda grid, solving each inner
// minimization through the closed-form pointwise scorer rather than the
// breakpoint solver, so the strong-duality check crosses two independent
// routes. Ties prefer the lambda of smallest magnitude.
inline DualSweep dual_sweep(const DiscreteJoint& dist, const CostParam& c,
                            const FairnessSpec& fairness, double tau,
                            const std::vector<double>& lambda_grid) {
    if (lambda_grid.empty())
        throw InvalidArgument("dual_sweep: empty grid");
    FairnessSpec spec = fairness;
    spec.tau = tau;
    BoxedLP lp = build_lp(dist, c, fairness.cbar, spec);
    LPSolution sol = solve_boxed_lp(lp);
    if (sol.status == LPStatus::Infeasible)
        throw InfeasibleConstraint("dual_sweep: level is infeasible");
    const double L = lp.lo - lp.k_offset;
    const double U = lp.hi - lp.k_offset;

    DualSweep out;
    out.dual_value = -std::numeric_limits<double>::infinity();
    for (double lambda : lambda_grid) {
        if (lambda < 0.0 && std::isinf(U))
            continue;  // no upper bound to price
        ScorerParams p;
        p.c = c;
        p.cbar = lp.cbar_eff;
        p.lambda = lambda;
        p.channel = fairness.channel;
        RandomizedClassifier f = bayes_classifier(dist, p);
        double inner = 0.0;
        for (std::size_t i = 0; i < lp.a.size(); ++i)
            inner += (lp.a[i] - lambda * lp.b[i]) * f.values[i];
        double g = inner + lambda * (lambda >= 0.0 ? L : U);
        if (g > out.dual_value ||
            (g == out.dual_value && std::abs(lambda) < std::abs(out.best_lambda))) {
            out.dual_value = g;
            out.best_lambda = lambda;
        }
    }
    out.duality_gap = sol.objective - out.dual_value;
    return out;
}

// lambda grid covering every breakpoint ratio of the LP, the midpoints
// between them, and zero
inline std::vector<double> breakpoint_lambda_grid(const BoxedLP& lp) {
    std::vector<double> rs;
    for (std::size_t i = 0; i < lp.a.size(); ++i)
        if (lp.b[i] != 0.0)
            rs.push_back(lp.a[i] / lp.b[i]);
    rs.push_back(0.0);
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
    std::vector<double> grid;
    grid.push_back(rs.front() - 1.0);
    for (std::size_t i = 0; i < rs.size(); ++i) {
        grid.push_back(rs[i]);
        if (i + 1 < rs.size())
            grid.push_back((rs[i] + rs[i + 1]) / 2.0);
    }
    grid.push_back(rs.back() + 1.0);
    return grid;
}

inline std::vector<double> make_grid(double start, double end, std::size_t count) {
    if (count < 2 || !(end >= start))
        throw InvalidArgument("make_grid: need count >= 2 and end >= start");
    std::vector<double> g;
    g.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        g.push_back(start + (end - start) * static_cast<double>(i) /
                                static_cast<double>(count - 1));
    return g;
}

} // namespace fairfront
