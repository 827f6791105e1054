#include "hfair/criteria.hpp"

#include <string>

namespace hfair {

const char* to_string(CriterionKind kind) {
    switch (kind) {
    case CriterionKind::StatisticalParity: return "statistical-parity";
    case CriterionKind::OverallAccuracy: return "overall-accuracy";
    case CriterionKind::EqualizedOdds: return "equalized-odds";
    case CriterionKind::Custom: return "custom";
    }
    return "unknown";
}

std::optional<CriterionKind> criterion_from_name(std::string_view name) {
    for (auto k : {CriterionKind::StatisticalParity, CriterionKind::OverallAccuracy,
                   CriterionKind::EqualizedOdds, CriterionKind::Custom}) {
        if (name == to_string(k)) return k;
    }
    return std::nullopt;
}

HappinessSpec statistical_parity_happiness(const LabelSpace& labels) {
    std::vector<HappinessSpec::Component> comps;
    for (Label j = 0; j < labels.size(); ++j) {
        comps.push_back({"ind(yhat == " + labels.name(j) + ")",
                         [j](const HappinessArgs& a) { return a.yhat == j ? 1.0 : 0.0; }});
    }
    return HappinessSpec(to_string(CriterionKind::StatisticalParity), std::move(comps));
}

HappinessSpec overall_accuracy_happiness() {
    std::vector<HappinessSpec::Component> comps;
    comps.push_back({"ind(y == yhat)", [](const HappinessArgs& a) { return a.y == a.yhat ? 1.0 : 0.0; }});
    return HappinessSpec(to_string(CriterionKind::OverallAccuracy), std::move(comps));
}

HappinessSpec equalized_odds_happiness(const LabelSpace& labels, const LabelGivenGroup& p_y_given_z) {
    const std::size_t k = labels.size();
    if (p_y_given_z.size() != k) throw ArgumentError("p(y|z) table has wrong number of rows");
    for (Label y = 0; y < k; ++y) {
        for (std::size_t z = 0; z < kGroupCount; ++z) {
            if (!(p_y_given_z[y][z] > 0.0)) {
                throw ArgumentError("p(y=" + labels.name(y) + " | z=" + std::to_string(z) +
                                    ") is zero; equalized odds is undefined");
            }
        }
    }
    std::vector<HappinessSpec::Component> comps;
    for (Label yp = 0; yp < k; ++yp) {
        for (Label tp = 0; tp < k; ++tp) {
            const auto weights = p_y_given_z[yp];
            comps.push_back({"y=" + labels.name(yp) + ",yhat=" + labels.name(tp),
                             [yp, tp, weights](const HappinessArgs& a) {
                                 if (a.y != yp || a.yhat != tp) return 0.0;
                                 return 1.0 / weights[static_cast<std::size_t>(a.z)];
                             }});
        }
    }
    return HappinessSpec(to_string(CriterionKind::EqualizedOdds), std::move(comps));
}

} // namespace hfair
