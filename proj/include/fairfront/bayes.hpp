#pragma once

#include "fairfront/distributions.hpp"
#include "fairfront/errors.hpp"
#include "fairfront/measures.hpp"

namespace fairfront {

struct ScorerParams {
    CostParam c{0.5};
    CostParam cbar{0.5};
    double lambda = 0.0;
    SensitiveChannel channel = SensitiveChannel::DP;
    double pi = 0.0;  // target base rate; required for the EO channel
};

// What to predict when the score is exactly zero; any choice is optimal for
// the relaxed objective but they realize different fairness values.
enum class TiePolicy { PredictByEta, PredictZero, PredictHalf };

// Additive threshold correction: the fairness term shifts the standard
// cost-sensitive margin by lambda times the sensitive margin.
inline double score_dp(double eta, double eta_dp, const ScorerParams& p) {
    return eta - p.c.c - p.lambda * (eta_dp - p.cbar.c);
}

// Multiplicative correction: conditioning on Y = 1 makes the fairness term
// scale eta instead of shifting it.
inline double score_eo(double eta, double eta_eo, const ScorerParams& p) {
    if (!(p.pi > 0.0))
        throw DegenerateClass("score_eo: needs pi > 0");
    return (1.0 - p.lambda / p.pi * (eta_eo - p.cbar.c)) * eta - p.c.c;
}

inline double classify(double score, double eta, const CostParam& c,
                       TiePolicy ties = TiePolicy::PredictByEta) {
    if (score != 0.0)
        return score > 0.0 ? 1.0 : 0.0;
    switch (ties) {
    case TiePolicy::PredictByEta:
        return eta > c.c ? 1.0 : 0.0;
    case TiePolicy::PredictZero:
        return 0.0;
    case TiePolicy::PredictHalf:
        return 0.5;
    }
    throw InvalidArgument("classify: unknown tie policy");
}

// Pointwise scorer + thresholding. The result minimizes the lambda-relaxed
// objective over all randomized classifiers; pi is taken from the
// distribution, which is the only value consistent with that guarantee.
inline RandomizedClassifier bayes_classifier(const DiscreteJoint& dist, ScorerParams p,
                                             TiePolicy ties = TiePolicy::PredictByEta) {
    if (p.channel == SensitiveChannel::EO) {
        p.pi = dist.pi();
        if (!(p.pi > 0.0))
            throw DegenerateClass("bayes_classifier: EO channel needs pi > 0");
    }
    RandomizedClassifier f;
    f.values.reserve(dist.size());
    for (const JointPoint& pt : dist.points()) {
        double s = p.channel == SensitiveChannel::DP ? score_dp(pt.eta, pt.eta_dp, p)
                                                     : score_eo(pt.eta, pt.eta_eo, p);
        f.values.push_back(classify(s, pt.eta, p.c, ties));
    }
    return f;
}

} // namespace fairfront
