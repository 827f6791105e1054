#include "hfair/data.hpp"

#include <cmath>
#include <optional>

#include "hfair/error.hpp"
#include "hfair/rng.hpp"

namespace hfair {

namespace {

const std::vector<std::string> kEducation = {
    "Bachelors", "Some-college", "11th", "HS-grad", "Prof-school", "Assoc-acdm", "Assoc-voc", "9th",
    "7th-8th", "12th", "Masters", "1st-4th", "10th", "Doctorate", "5th-6th", "Preschool"};
const std::vector<std::string> kWorkclass = {"Private", "Self-emp-not-inc", "Self-emp-inc", "Federal-gov",
                                             "Local-gov", "State-gov", "Without-pay", "Never-worked"};
const std::vector<std::string> kRace = {"White", "Asian-Pac-Islander", "Amer-Indian-Eskimo", "Other", "Black"};
const std::vector<std::string> kSex = {"Male", "Female"};

constexpr long long kMinAge = 17, kMaxAge = 90;
constexpr long long kMinHours = 1, kMaxHours = 99;

double cents(double dollars) { return std::round(dollars * 100.0) / 100.0; }

double lookup(const std::vector<std::pair<std::string, double>>& table, const std::string& key, bool& found) {
    for (const auto& [k, v] : table) {
        if (k == key) {
            found = true;
            return v;
        }
    }
    found = false;
    return 0.0;
}

} // namespace

void SyntheticConfig::validate() const {
    if (count == 0) throw ArgumentError("count must be positive");
    if (!(income_sd > 0 && base_loan_sd > 0 && income_mean > 0 && base_loan_mean > 0)) {
        throw ArgumentError("monetary scales must be positive");
    }
    if (!(group0_fraction > 0.0 && group0_fraction < 1.0)) throw ArgumentError("group0_fraction must lie in (0, 1)");
    if (!std::isfinite(group1_surcharge)) throw ArgumentError("surcharge must be finite");
}

FeatureSchema synthetic_schema() {
    return FeatureSchema({
        {"age", FeatureKind::Numeric, {}},
        {"hours_per_week", FeatureKind::Numeric, {}},
        {"education", FeatureKind::Categorical, kEducation},
        {"workclass", FeatureKind::Categorical, kWorkclass},
        {"race", FeatureKind::Categorical, kRace},
        {"sex", FeatureKind::Categorical, kSex},
        {"yearly_salary", FeatureKind::Numeric, {}},
        {"loan_requested", FeatureKind::Numeric, {}},
    });
}

Dataset generate_synthetic(const SyntheticConfig& cfg, std::vector<double>* base_loan) {
    cfg.validate();
    Dataset d{LabelSpace::numbered(2), synthetic_schema(), {}};
    d.samples.reserve(cfg.count);
    if (base_loan) base_loan->clear();
    for (std::size_t row = 0; row < cfg.count; ++row) {
        CounterRng rng(derive_seed(cfg.seed, row));
        Sample s;
        s.z = rng.uniform() < cfg.group0_fraction ? 0 : 1;
        const double age = static_cast<double>(rng.integer(kMinAge, kMaxAge));
        const double hours = static_cast<double>(rng.integer(kMinHours, kMaxHours));
        const double education = static_cast<double>(rng.index(kEducation.size()));
        const double workclass = static_cast<double>(rng.index(kWorkclass.size()));
        const double race = static_cast<double>(rng.index(kRace.size()));
        const double salary = cents(rng.normal(cfg.income_mean, cfg.income_sd));
        const double base = cents(rng.normal(cfg.base_loan_mean, cfg.base_loan_sd));
        const double loan = s.z == 1 ? cents(base + cfg.group1_surcharge) : base;
        s.y = 10.0 * salary >= base ? 1 : 0;
        s.features = {age, hours, education, workclass, race, static_cast<double>(s.z), salary, loan};
        d.samples.push_back(std::move(s));
        if (base_loan) base_loan->push_back(base);
    }
    return d;
}

double rho(double credit_score, const FinancialParams& params) {
    for (const auto& band : params.rate_bands) {
        if (credit_score >= band.min_score) return band.rate;
    }
    return params.rate_below;
}

double roi_bonus(const LoanApplication& app, const FinancialParams& params) {
    bool found = false;
    const double purpose = lookup(params.purpose_bonus, app.purpose, found);
    if (!found) throw ArgumentError("unknown loan purpose '" + app.purpose + "'");
    const double education = lookup(params.education_bonus, app.education, found);
    const double employment = lookup(params.employment_bonus, app.employment, found);
    const double tenure = app.tenure_years > params.tenure_threshold_years ? params.tenure_bonus : 0.0;
    return purpose + education + employment + tenure;
}

double financial_happiness(Label yhat, const LoanApplication& app, const FinancialParams& params) {
    if (yhat == 0) return 0.0;
    const double cost = app.loan_requested * rho(app.credit_score, params) * app.duration;
    return static_cast<double>(yhat) * (app.loan_requested * roi_bonus(app, params) - cost);
}

double adult_happiness(Label yhat, double hours_per_week) {
    if (hours_per_week != std::floor(hours_per_week) || hours_per_week < kMinHours || hours_per_week > kMaxHours) {
        throw EvalError("hours_per_week must be an integer in [1, 99]");
    }
    return 100.0 * static_cast<double>(yhat) - hours_per_week;
}

namespace {

std::size_t require_kind(const FeatureSchema& schema, const std::string& name, FeatureKind kind) {
    const std::size_t i = schema.require(name);
    if (schema.column(i).kind != kind) {
        throw EvalError("feature '" + name + "' must be " +
                        (kind == FeatureKind::Numeric ? "numeric" : "categorical"));
    }
    return i;
}

double at(const HappinessArgs& a, std::size_t i) {
    if (i >= a.x.size()) throw EvalError("feature row is shorter than the schema");
    return a.x[i];
}

} // namespace

HappinessSpec financial_happiness_spec(const FeatureSchema& schema, const FinancialParams& params,
                                       const FinancialColumns& cols) {
    const std::size_t loan = require_kind(schema, cols.loan_requested, FeatureKind::Numeric);
    const std::size_t credit = require_kind(schema, cols.credit_score, FeatureKind::Numeric);
    const std::size_t duration = require_kind(schema, cols.duration, FeatureKind::Numeric);
    const std::size_t tenure = require_kind(schema, cols.tenure, FeatureKind::Numeric);
    const std::size_t purpose = require_kind(schema, cols.purpose, FeatureKind::Categorical);
    const std::size_t education = require_kind(schema, cols.education, FeatureKind::Categorical);
    const std::size_t employment = require_kind(schema, cols.employment, FeatureKind::Categorical);

    auto category = [&schema](std::size_t col) { return schema.column(col).categories; };
    auto fn = [=, purposes = category(purpose), educations = category(education),
               employments = category(employment)](const HappinessArgs& a) {
        LoanApplication app;
        app.loan_requested = at(a, loan);
        app.credit_score = at(a, credit);
        app.duration = at(a, duration);
        app.tenure_years = at(a, tenure);
        app.purpose = purposes.at(static_cast<std::size_t>(at(a, purpose)));
        app.education = educations.at(static_cast<std::size_t>(at(a, education)));
        app.employment = employments.at(static_cast<std::size_t>(at(a, employment)));
        return financial_happiness(a.yhat, app, params);
    };
    std::vector<HappinessSpec::Component> comps;
    comps.push_back({"yhat * (loan * R(X) - C(X))", fn});
    return HappinessSpec("financial", std::move(comps));
}

HappinessSpec adult_happiness_spec(const FeatureSchema& schema) {
    const std::size_t hours = require_kind(schema, "hours_per_week", FeatureKind::Numeric);
    std::vector<HappinessSpec::Component> comps;
    comps.push_back({"100 * yhat - hours_per_week",
                     [hours](const HappinessArgs& a) { return adult_happiness(a.yhat, at(a, hours)); }});
    return HappinessSpec("adult", std::move(comps));
}

HappinessSpec equal_funding_spec(const FeatureSchema& schema) {
    std::vector<HappinessSpec::Component> comps;
    comps.push_back({"yhat * loan_requested", parse_happiness_expr("yhat * loan_requested", schema)});
    return HappinessSpec("equal-funding", std::move(comps));
}

} // namespace hfair
