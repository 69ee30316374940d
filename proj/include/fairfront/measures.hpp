#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "fairfront/errors.hpp"

namespace fairfront {

// False-negative and false-positive rates of a (possibly randomized)
// classifier under some class-conditional pair. Both in [0,1].
struct Rates {
    double fnr = 0.0;
    double fpr = 0.0;
};

// Misclassification cost parameter in [0,1]: a false negative costs (1-c),
// a false positive costs c.
struct CostParam {
    double c = 0.5;
};

struct RiskValue {
    double value = 0.0;
};

enum class FairnessForm { CostSensitive, MeanDifference, DisparateImpact };

enum class Symmetrization { None, MinWithAnti, PriorWeighted };

// Which sensitive conditioning the fairness risk is evaluated under:
// DP uses the marginal sensitive distribution, EO conditions on the
// positive target class.
enum class SensitiveChannel { DP, EO };

// A fairness requirement: which measure, at which level tau, evaluated at
// which cost and conditioning, and how anti-classifier gaming is blocked.
struct FairnessSpec {
    FairnessForm form = FairnessForm::CostSensitive;
    CostParam cbar{0.5};
    Symmetrization symmetrization = Symmetrization::MinWithAnti;
    double tau = 0.0;
    SensitiveChannel channel = SensitiveChannel::DP;
};

inline void validate(const Rates& r) {
    if (!(r.fnr >= 0.0 && r.fnr <= 1.0 && r.fpr >= 0.0 && r.fpr <= 1.0))
        throw InvalidArgument("rates must lie in [0,1]");
}

inline void validate(const CostParam& c) {
    if (!(c.c >= 0.0 && c.c <= 1.0))
        throw InvalidArgument("cost parameter must lie in [0,1]");
}

// (1-c)*fnr + c*fpr. Ranges over [0,1]; 1/2 for a uniformly random classifier.
inline RiskValue balanced_cs_risk(const Rates& r, const CostParam& c) {
    return {(1.0 - c.c) * r.fnr + c.c * r.fpr};
}

// pi*(1-c)*fnr + (1-pi)*c*fpr. Equals (alpha+beta) * balanced_cs_risk(., c')
// with alpha = pi*(1-c), beta = (1-pi)*c, c' = beta/(alpha+beta).
inline RiskValue standard_cs_risk(const Rates& r, double pi, const CostParam& c) {
    return {pi * (1.0 - c.c) * r.fnr + (1.0 - pi) * c.c * r.fpr};
}

// 1 - fnr - fpr: the difference of positive-prediction rates between the two
// conditioning classes. Equals 1 - 2*balanced_cs_risk(., 1/2).
inline RiskValue mean_difference(const Rates& r) {
    return {1.0 - r.fnr - r.fpr};
}

// fpr / (1 - fnr): the ratio of positive-prediction rates (the "80% rule"
// quantity). Undefined when the positive class is never predicted positive.
inline RiskValue disparate_impact(const Rates& r) {
    if (r.fnr == 1.0)
        throw UndefinedRatio("disparate_impact: fnr = 1 makes the ratio undefined");
    return {r.fpr / (1.0 - r.fnr)};
}

// Cost c = 1/(1+tau), decreasing from 1 to 1/2 over tau in [0,1]. For any
// rates with fnr != 1:  DI >= tau  <=>  balanced_cs_risk(., c) >= 1-c.
// Proof sketch: fpr >= tau*(1-fnr) rearranges to (1-c)*fnr + c*fpr >= 1-c
// after multiplying by c = 1/(1+tau).
inline CostParam di_equiv_cost(double tau) {
    return {1.0 / (1.0 + tau)};
}

// Cost c = (1+tau)/2, increasing from 1/2 to 1 over tau in [0,1]. Since
// MD = 1 - 2*balanced_cs_risk(., 1/2):
//   MD <= tau   <=>  balanced_cs_risk(., 1/2) >= 1-c
//   |MD| <= tau <=>  balanced_cs_risk(., 1/2) in [1-c, c].
inline CostParam md_equiv_cost(double tau) {
    return {(1.0 + tau) / 2.0};
}

// Combine a measure of f and of its complement 1-f into a gaming-resistant
// value. alpha is only read in PriorWeighted mode, where it is the raw
// fairness of the constant classifier predicting the sensitive base rate.
inline RiskValue symmetrize(const RiskValue& measure_of_f, const RiskValue& measure_of_antif,
                            Symmetrization mode, double alpha = 0.5) {
    switch (mode) {
    case Symmetrization::None:
        return measure_of_f;
    case Symmetrization::MinWithAnti:
        return {std::min(measure_of_f.value, measure_of_antif.value)};
    case Symmetrization::PriorWeighted:
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw InvalidArgument("symmetrize: prior weight must lie in [0,1]");
        return {std::min((1.0 - alpha) * measure_of_f.value, alpha * measure_of_antif.value)};
    }
    throw InvalidArgument("symmetrize: unknown mode");
}

// (fnr + fpr)/2.
inline RiskValue ber_from_rates(const Rates& r) {
    return {(r.fnr + r.fpr) / 2.0};
}

// The four exchange identities between DI and BER. Each branch recomputes its
// target from the named pair of inputs only, so agreement with the direct
// formulas is a nontrivial consistency check.
struct DiBerIdentities {
    double di_from_ber_fpr = 0.0;               // DI from (BER, fpr)
    double di_from_ber_fnr = 0.0;               // DI from (BER, fnr)
    double ber_from_di_fnr = 0.0;               // BER from (DI, fnr)
    std::optional<double> ber_from_di_fpr;      // BER from (DI, fpr); needs DI != 0
};

inline DiBerIdentities di_ber_identities(const Rates& r) {
    if (r.fnr == 1.0)
        throw UndefinedRatio("di_ber_identities: fnr = 1 makes DI undefined");
    const double ber = ber_from_rates(r).value;
    const double di = disparate_impact(r).value;
    DiBerIdentities out;
    out.di_from_ber_fpr = r.fpr / (1.0 - 2.0 * ber + r.fpr);
    out.di_from_ber_fnr = (2.0 * ber - r.fnr) / (1.0 - r.fnr);
    out.ber_from_di_fnr = (r.fnr + (1.0 - r.fnr) * di) / 2.0;
    if (di != 0.0)
        out.ber_from_di_fpr = (1.0 - r.fpr / di + r.fpr) / 2.0;
    return out;
}

// BER <= eps forces DI <= 2*eps (for fnr != 1). The converse fails: rates
// (fnr=1, fpr=0) have BER = 1/2 with no defined DI at all.
inline double di_bound_from_ber(double epsilon) {
    return 2.0 * epsilon;
}

} // namespace fairfront
