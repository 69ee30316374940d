#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fairfront/bayes.hpp"
#include "fairfront/distributions.hpp"
#include "fairfront/errors.hpp"
#include "fairfront/measures.hpp"

namespace fairfront {

// linear class-probability model: Pr(label=1|x) = sigmoid(w.x + bias)
struct LinearScorer {
    std::vector<double> weights;
    double bias = 0.0;

    double raw(const std::vector<double>& x) const {
        double s = bias;
        for (std::size_t j = 0; j < weights.size(); ++j)
            s += weights[j] * x[j];
        return s;
    }
    double prob(const std::vector<double>& x) const {
        double s = raw(x);
        return s >= 0.0 ? 1.0 / (1.0 + std::exp(-s)) : std::exp(s) / (1.0 + std::exp(s));
    }
};

struct TrainConfig {
    CostParam c{0.5};
    double l2 = 1e-4;
    std::size_t max_iters = 10000;
    double grad_tol = 1e-8;
    std::uint64_t seed = 0;
};

// which column of the sample provides the training label
enum class LabelChannel { Y, Ybar, YbarGivenY1 };

struct TradeoffPoint {
    double lambda = 0.0;
    double ber_target = 0.0;
    double md_sym_sensitive = 0.0;
    std::optional<double> di_sensitive;
};

namespace detail {

inline double sigmoid(double s) {
    return s >= 0.0 ? 1.0 / (1.0 + std::exp(-s)) : std::exp(s) / (1.0 + std::exp(s));
}

// log(1 + e^s) without overflow
inline double softplus(double s) {
    return s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
}

// weighted-mean cost-sensitive logistic loss over pre-standardized rows,
// ridge on the weights only
struct CsLogisticObjective {
    const std::vector<std::vector<double>>* x;
    const std::vector<int>* labels;
    std::vector<double> row_weight;  // normalized to sum 1
    double c;
    double l2;

    std::size_t dim() const { return x->empty() ? 0 : x->front().size(); }

    // params = (weights..., bias)
    double value(const std::vector<double>& params) const {
        const std::size_t d = dim();
        double loss = 0.0;
        for (std::size_t i = 0; i < x->size(); ++i) {
            double s = params[d];
            for (std::size_t j = 0; j < d; ++j)
                s += params[j] * (*x)[i][j];
            int y = (*labels)[i];
            double cost = y == 1 ? 1.0 - c : c;
            loss += row_weight[i] * cost * (softplus(s) - y * s);
        }
        for (std::size_t j = 0; j < d; ++j)
            loss += 0.5 * l2 * params[j] * params[j];
        return loss;
    }

    std::vector<double> gradient(const std::vector<double>& params) const {
        const std::size_t d = dim();
        std::vector<double> g(d + 1, 0.0);
        for (std::size_t i = 0; i < x->size(); ++i) {
            double s = params[d];
            for (std::size_t j = 0; j < d; ++j)
                s += params[j] * (*x)[i][j];
            int y = (*labels)[i];
            double cost = y == 1 ? 1.0 - c : c;
            double resid = row_weight[i] * cost * (sigmoid(s) - y);
            for (std::size_t j = 0; j < d; ++j)
                g[j] += resid * (*x)[i][j];
            g[d] += resid;
        }
        for (std::size_t j = 0; j < d; ++j)
            g[j] += l2 * params[j];
        return g;
    }
};

// full-batch descent with Armijo backtracking; returns the final parameters
// and optionally the accepted objective values. The trial step is the
// spectral (Barzilai-Borwein) length, which tracks curvature along the
// trajectory; plain doubling pins badly conditioned problems to the
// stiffest coordinate.
inline std::vector<double> minimize(const CsLogisticObjective& obj, std::size_t max_iters,
                                    double grad_tol, std::vector<double>* trace = nullptr) {
    std::vector<double> params(obj.dim() + 1, 0.0);
    double fv = obj.value(params);
    if (!std::isfinite(fv))
        throw NonFinite("logistic objective is not finite at the origin");
    if (trace)
        trace->push_back(fv);
    std::vector<double> x_prev, g_prev;
    for (std::size_t it = 0; it < max_iters; ++it) {
        std::vector<double> g = obj.gradient(params);
        double gnorm2 = 0.0;
        for (double v : g)
            gnorm2 += v * v;
        if (std::sqrt(gnorm2) <= grad_tol)
            break;
        double step = 1.0;
        if (!g_prev.empty()) {
            double sy = 0.0, yy = 0.0;
            for (std::size_t j = 0; j < params.size(); ++j) {
                double sx = params[j] - x_prev[j];
                double yg = g[j] - g_prev[j];
                sy += sx * yg;
                yy += yg * yg;
            }
            if (sy > 0.0 && yy > 0.0)
                step = std::min(std::max(sy / yy, 1e-12), 1e9);
        }
        x_prev = params;
        g_prev = g;
        std::vector<double> cand(params.size());
        bool accepted = false;
        while (step > 1e-20) {
            for (std::size_t j = 0; j < params.size(); ++j)
                cand[j] = params[j] - step * g[j];
            double fc = obj.value(cand);
            if (!std::isfinite(fc))
                throw NonFinite("logistic objective diverged during line search");
            if (fc <= fv - 1e-4 * step * gnorm2) {
                params.swap(cand);
                fv = fc;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted)
            break;  // no descent step of representable length exists
        if (trace)
            trace->push_back(fv);
    }
    return params;
}

struct Standardizer {
    std::vector<double> mean, scale;
};

inline Standardizer fit_standardizer(const std::vector<std::vector<double>>& x) {
    Standardizer st;
    if (x.empty())
        return st;
    const std::size_t d = x.front().size();
    st.mean.assign(d, 0.0);
    st.scale.assign(d, 1.0);
    for (const auto& row : x)
        for (std::size_t j = 0; j < d; ++j)
            st.mean[j] += row[j];
    for (std::size_t j = 0; j < d; ++j)
        st.mean[j] /= static_cast<double>(x.size());
    std::vector<double> var(d, 0.0);
    for (const auto& row : x)
        for (std::size_t j = 0; j < d; ++j) {
            double dlt = row[j] - st.mean[j];
            var[j] += dlt * dlt;
        }
    for (std::size_t j = 0; j < d; ++j) {
        double sd = std::sqrt(var[j] / static_cast<double>(x.size()));
        st.scale[j] = sd > 0.0 ? sd : 1.0;
    }
    return st;
}

} // namespace detail

// fits Pr(label=1|x) by weighted-mean cost-sensitive logistic loss
// (positive rows weighted 1-c, negative rows c) plus (l2/2)|w|^2 on the
// standardized weights; full-batch gradient descent from zero with Armijo
// backtracking. The returned scorer is in the raw feature space.
inline LinearScorer train_cs_logistic(const SampleSet& sample, LabelChannel channel,
                                      const TrainConfig& cfg) {
    validate(cfg.c);
    if (cfg.l2 < 0.0 || cfg.grad_tol < 0.0)
        throw InvalidArgument("train_cs_logistic: l2 and grad_tol must be nonnegative");
    if (cfg.max_iters < 1)
        throw InvalidArgument("train_cs_logistic: max_iters must be at least 1");

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::vector<double> weights;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (channel == LabelChannel::YbarGivenY1 && sample.y[i] != 1)
            continue;
        rows.push_back(sample.x[i]);
        labels.push_back(channel == LabelChannel::Y ? sample.y[i] : sample.ybar[i]);
        weights.push_back(sample.weight[i]);
    }
    if (rows.empty())
        throw EmptyChannel("train_cs_logistic: no rows carry the requested label channel");
    double total = 0.0;
    for (double w : weights)
        total += w;
    if (total <= 0.0)
        throw EmptyChannel("train_cs_logistic: requested channel has zero total weight");
    for (double& w : weights)
        w /= total;

    detail::Standardizer st = detail::fit_standardizer(rows);
    for (auto& row : rows)
        for (std::size_t j = 0; j < row.size(); ++j)
            row[j] = (row[j] - st.mean[j]) / st.scale[j];

    detail::CsLogisticObjective obj{&rows, &labels, std::move(weights), cfg.c.c, cfg.l2};
    std::vector<double> params = detail::minimize(obj, cfg.max_iters, cfg.grad_tol);

    const std::size_t d = obj.dim();
    LinearScorer model;
    model.weights.resize(d);
    model.bias = params[d];
    for (std::size_t j = 0; j < d; ++j) {
        model.weights[j] = params[j] / st.scale[j];
        model.bias -= params[j] * st.mean[j] / st.scale[j];
    }
    return model;
}

// composes the two probability models with the fairness-penalized score and
// thresholds it; for the EO channel p.pi must hold the positive-class mass
inline std::function<double(const std::vector<double>&)>
plugin_classifier(const LinearScorer& eta_model, const LinearScorer& etabar_model, ScorerParams p,
                  TiePolicy ties = TiePolicy::PredictByEta) {
    return [eta_model, etabar_model, p, ties](const std::vector<double>& x) {
        double eta = eta_model.prob(x);
        double etabar = etabar_model.prob(x);
        double s = p.channel == SensitiveChannel::DP ? score_dp(eta, etabar, p)
                                                     : score_eo(eta, etabar, p);
        return classify(s, eta, p.c, ties);
    };
}

// empirical class-conditional rates of a (possibly randomized) classifier:
// FNR is the weighted mean of 1-f over channel-positive rows, FPR the
// weighted mean of f over channel-negative rows
inline Rates evaluate_empirical(const SampleSet& sample, Channel channel,
                                const std::function<double(const std::vector<double>&)>& f) {
    double pos_w = 0.0, neg_w = 0.0, fn = 0.0, fp = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (channel == Channel::SensitiveEO && sample.y[i] != 1)
            continue;
        int label = channel == Channel::Target ? sample.y[i] : sample.ybar[i];
        double v = f(sample.x[i]);
        double w = sample.weight[i];
        if (label == 1) {
            pos_w += w;
            fn += w * (1.0 - v);
        } else {
            neg_w += w;
            fp += w * v;
        }
    }
    if (pos_w <= 0.0 || neg_w <= 0.0)
        throw DegenerateClass("evaluate_empirical: a channel class is empty");
    return Rates{fn / pos_w, fp / neg_w};
}

// trains the two probability models once (plain log-loss, c = 1/2 in the
// loss; costs enter only the combination), then traces the tradeoff curve
// over the lambda grid on the test sample
inline std::vector<TradeoffPoint> sweep_lambda(const SampleSet& train, const SampleSet& test,
                                               const std::vector<double>& lambdas, CostParam c,
                                               CostParam cbar, SensitiveChannel channel,
                                               const TrainConfig& cfg = {}) {
    TrainConfig cpe = cfg;
    cpe.c = CostParam{0.5};
    LinearScorer eta_model = train_cs_logistic(train, LabelChannel::Y, cpe);
    LinearScorer etabar_model = train_cs_logistic(
        train, channel == SensitiveChannel::DP ? LabelChannel::Ybar : LabelChannel::YbarGivenY1,
        cpe);

    double pos_w = 0.0, total_w = 0.0;
    for (std::size_t i = 0; i < train.size(); ++i) {
        total_w += train.weight[i];
        if (train.y[i] == 1)
            pos_w += train.weight[i];
    }

    Channel fairness_channel =
        channel == SensitiveChannel::DP ? Channel::SensitiveDP : Channel::SensitiveEO;
    std::vector<TradeoffPoint> points;
    points.reserve(lambdas.size());
    for (double lam : lambdas) {
        ScorerParams p{c, cbar, lam, channel, pos_w / total_w};
        auto f = plugin_classifier(eta_model, etabar_model, p);
        Rates target = evaluate_empirical(test, Channel::Target, f);
        Rates sens = evaluate_empirical(test, fairness_channel, f);
        TradeoffPoint pt;
        pt.lambda = lam;
        pt.ber_target = ber_from_rates(target).value;
        pt.md_sym_sensitive = mean_difference(sens).value;
        if (sens.fnr < 1.0)
            pt.di_sensitive = disparate_impact(sens).value;
        points.push_back(pt);
    }
    return points;
}

} // namespace fairfront
