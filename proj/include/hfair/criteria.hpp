#pragma once

#include <optional>
#include <string_view>

#include "hfair/core.hpp"
#include "hfair/estimators.hpp"
#include "hfair/happiness.hpp"

namespace hfair {

enum class CriterionKind { StatisticalParity, OverallAccuracy, EqualizedOdds, Custom };

const char* to_string(CriterionKind kind);
std::optional<CriterionKind> criterion_from_name(std::string_view name);

// n = |Y|; component j is 1{ytilde == j}.
HappinessSpec statistical_parity_happiness(const LabelSpace& labels);

// n = 1; 1{y == ytilde}.
HappinessSpec overall_accuracy_happiness();

// n = |Y|^2; component (y', ytilde') is 1{(y, ytilde) == (y', ytilde')} / p_{Y|Z}(y' | z).
// Throws ArgumentError when any p_{Y|Z} cell is not strictly positive.
HappinessSpec equalized_odds_happiness(const LabelSpace& labels, const LabelGivenGroup& p_y_given_z);

} // namespace hfair
