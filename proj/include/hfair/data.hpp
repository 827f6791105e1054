#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hfair/core.hpp"
#include "hfair/happiness.hpp"

namespace hfair {

// Synthetic loan-approval data modeled on the Adult schema. Group 1 (female)
// requests base loan + group1_surcharge; approval depends on the base loan only.
struct SyntheticConfig {
    std::size_t count = 48842;
    std::uint64_t seed = 0;
    double income_mean = 50000.0;
    double income_sd = 1000.0;
    double base_loan_mean = 500000.0;
    double base_loan_sd = 10000.0;
    double group1_surcharge = 50000.0; // may be negative to favor the other group
    double group0_fraction = 2.0 / 3.0;

    void validate() const;
};

FeatureSchema synthetic_schema();

// base_loan, when given, receives the unobserved base loan amount U per row.
Dataset generate_synthetic(const SyntheticConfig& cfg, std::vector<double>* base_loan = nullptr);

// Interest rate bands over credit score, lower bound inclusive.
struct RateBand {
    double min_score;
    double rate;
};

struct FinancialParams {
    std::vector<RateBand> rate_bands = {{750, 0.04}, {700, 0.06}, {650, 0.08}, {600, 0.12}};
    double rate_below = 0.18;
    std::vector<std::pair<std::string, double>> purpose_bonus = {
        {"Home", 0.08}, {"Auto", 0.02}, {"Education", 0.12}, {"Debt Consolidation", 0.04}, {"Other", 0.05}};
    std::vector<std::pair<std::string, double>> education_bonus = {{"Master", 0.01}, {"Doctorate", 0.02}};
    std::vector<std::pair<std::string, double>> employment_bonus = {{"Employed", 0.01}, {"Self-Employed", 0.01}};
    double tenure_bonus = 0.01;
    double tenure_threshold_years = 5.0; // bonus requires tenure strictly greater
};

struct LoanApplication {
    double loan_requested = 0.0;
    double credit_score = 0.0;
    double duration = 0.0;
    std::string purpose;
    std::string education;
    std::string employment;
    double tenure_years = 0.0;
};

double rho(double credit_score, const FinancialParams& params = {});

// Throws ArgumentError for a loan purpose not in the bonus table.
double roi_bonus(const LoanApplication& app, const FinancialParams& params = {});

// yhat * (loan * R(X) - loan * rho(credit) * duration)
double financial_happiness(Label yhat, const LoanApplication& app, const FinancialParams& params = {});

// 100 * yhat - hours; hours must be an integer in [1, 99].
double adult_happiness(Label yhat, double hours_per_week);

// Column names consumed by the financial happiness spec.
struct FinancialColumns {
    std::string loan_requested = "loan_requested";
    std::string credit_score = "credit_score";
    std::string duration = "duration";
    std::string purpose = "loan_purpose";
    std::string education = "education";
    std::string employment = "employment_status";
    std::string tenure = "tenure";
};

// Spec forms bound to a schema; missing columns throw EvalError at construction.
HappinessSpec financial_happiness_spec(const FeatureSchema& schema, const FinancialParams& params = {},
                                       const FinancialColumns& columns = {});
HappinessSpec adult_happiness_spec(const FeatureSchema& schema);
// yhat * loan_requested
HappinessSpec equal_funding_spec(const FeatureSchema& schema);

} // namespace hfair
