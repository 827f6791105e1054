#include <doctest.h>

#include <cmath>

#include "hfair/criteria.hpp"
#include "hfair/postprocess.hpp"
#include "hfair/rng.hpp"

using namespace hfair;

namespace {

const std::vector<double> kNoFeatures;

Dataset random_predictions(std::uint64_t seed, std::size_t k, std::size_t n) {
    CounterRng rng(seed);
    Dataset d{LabelSpace::numbered(k), FeatureSchema(), {}};
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> p(k);
        double s = 0.0;
        for (auto& v : p) s += (v = rng.uniform());
        for (auto& v : p) v /= s;
        // Every (y, z) cell is populated.
        const Label y = i < 2 * k ? i % k : rng.index(k);
        const int z = i < 2 * k ? static_cast<int>(i / k) : static_cast<int>(rng.index(2));
        d.samples.push_back({{}, y, z, p});
    }
    return d;
}

// p(Yhat = j | Y = y, Z = z) and friends, straight from the samples.
struct Tables {
    std::vector<std::array<double, 2>> yhat_given_z;                 // [j][z]
    std::array<double, 2> acc_given_z{};                             // P(Y = Yhat | z)
    std::vector<std::vector<std::array<double, 2>>> yhat_given_yz;   // [y][j][z]
};

Tables direct_tables(const Dataset& d) {
    const std::size_t k = d.label_space.size();
    Tables t;
    t.yhat_given_z.assign(k, {0.0, 0.0});
    t.yhat_given_yz.assign(k, std::vector<std::array<double, 2>>(k, {0.0, 0.0}));
    std::array<double, 2> nz{};
    std::vector<std::array<double, 2>> nyz(k, {0.0, 0.0});
    for (const auto& s : d.samples) {
        const auto z = static_cast<std::size_t>(s.z);
        nz[z] += 1;
        nyz[s.y][z] += 1;
        for (Label j = 0; j < k; ++j) {
            t.yhat_given_z[j][z] += s.p_hat[j];
            t.yhat_given_yz[s.y][j][z] += s.p_hat[j];
        }
        t.acc_given_z[z] += s.p_hat[s.y];
    }
    for (std::size_t z = 0; z < 2; ++z) {
        t.acc_given_z[z] /= nz[z];
        for (Label j = 0; j < k; ++j) {
            t.yhat_given_z[j][z] /= nz[z];
            for (Label y = 0; y < k; ++y) t.yhat_given_yz[y][j][z] /= nyz[y][z];
        }
    }
    return t;
}

} // namespace

TEST_CASE("names") {
    CHECK(criterion_from_name("equalized-odds") == CriterionKind::EqualizedOdds);
    CHECK(std::string(to_string(CriterionKind::StatisticalParity)) == "statistical-parity");
    CHECK_FALSE(criterion_from_name("equal-opportunity").has_value());
}

TEST_CASE("statistical parity components") {
    const auto spec = statistical_parity_happiness(LabelSpace::numbered(2));
    CHECK(spec.dim() == 2);
    CHECK(spec.eval(1, kNoFeatures, 0, 0) == std::vector<double>{0, 1});
    CHECK(spec.eval(0, kNoFeatures, 1, 1) == std::vector<double>{1, 0});
    const auto three = statistical_parity_happiness(LabelSpace::numbered(3));
    for (Label yt = 0; yt < 3; ++yt) {
        const auto v = three.eval(yt, kNoFeatures, 0, 0);
        CHECK(v[0] + v[1] + v[2] == 1.0);
    }
}

TEST_CASE("overall accuracy components") {
    const auto spec = overall_accuracy_happiness();
    CHECK(spec.dim() == 1);
    CHECK(spec.eval(1, kNoFeatures, 1, 0) == std::vector<double>{1});
    CHECK(spec.eval(0, kNoFeatures, 1, 0) == std::vector<double>{0});

    // Four samples: group 0 predicted (0.9 right, 0.3 right), group 1 (0.5 right, 1.0 right).
    Dataset d{LabelSpace::numbered(2), FeatureSchema(), {}};
    d.samples.push_back({{}, 1, 0, {0.1, 0.9}});
    d.samples.push_back({{}, 0, 0, {0.3, 0.7}});
    d.samples.push_back({{}, 1, 1, {0.5, 0.5}});
    d.samples.push_back({{}, 0, 1, {1.0, 0.0}});
    const auto m = estimate_moments(d, spec);
    const auto pp = PostProcessor::identity(2);
    double per_group[2] = {0, 0};
    for (Label yt = 0; yt < 2; ++yt)
        for (Label yh = 0; yh < 2; ++yh)
            for (int z = 0; z < 2; ++z) per_group[z] += m.xi(yt, yh, z)[0] * pp.prob(yt, yh, z);
    CHECK(per_group[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(per_group[1] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(happiness_gap(pp, m)[0] == doctest::Approx(-0.15).epsilon(1e-15));
}

TEST_CASE("equalized odds components") {
    const LabelGivenGroup pyz{{0.5, 0.25}, {0.5, 0.75}};
    const auto spec = equalized_odds_happiness(LabelSpace::numbered(2), pyz);
    CHECK(spec.dim() == 4);
    CHECK(spec.eval(1, kNoFeatures, 1, 0) == std::vector<double>{0, 0, 0, 2});
    CHECK(spec.eval(0, kNoFeatures, 0, 1) == std::vector<double>{4, 0, 0, 0});
    CHECK_THROWS_AS(equalized_odds_happiness(LabelSpace::numbered(2), {{1.0, 0.5}, {0.0, 0.5}}), ArgumentError);
    CHECK_THROWS_AS(equalized_odds_happiness(LabelSpace::numbered(3), pyz), ArgumentError);
}

TEST_CASE("criteria recovery on random soft classifiers") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const std::size_t k = 2 + seed % 2;
        const auto d = random_predictions(seed, k, 40);
        const auto t = direct_tables(d);
        const auto id = PostProcessor::identity(k);

        double sp = 0.0;
        for (Label j = 0; j < k; ++j) sp = std::max(sp, std::abs(t.yhat_given_z[j][0] - t.yhat_given_z[j][1]));
        const auto sp_gap = happiness_gap(id, estimate_moments(d, statistical_parity_happiness(d.label_space)));
        CHECK(std::abs(inf_norm(sp_gap) - sp) <= 1e-12);

        const double oa = std::abs(t.acc_given_z[0] - t.acc_given_z[1]);
        const auto oa_gap = happiness_gap(id, estimate_moments(d, overall_accuracy_happiness()));
        CHECK(std::abs(inf_norm(oa_gap) - oa) <= 1e-12);

        double eo = 0.0;
        for (Label y = 0; y < k; ++y)
            for (Label j = 0; j < k; ++j)
                eo = std::max(eo, std::abs(t.yhat_given_yz[y][j][0] - t.yhat_given_yz[y][j][1]));
        const auto eo_spec = equalized_odds_happiness(d.label_space, estimate_label_given_group(d));
        const auto eo_m = estimate_moments(d, eo_spec);
        CHECK(std::abs(inf_norm(happiness_gap(id, eo_m)) - eo) <= 1e-12);

        // Conditional expectation identity per group and component.
        for (int z = 0; z < 2; ++z)
            for (Label y = 0; y < k; ++y)
                for (Label j = 0; j < k; ++j) {
                    double e = 0.0;
                    for (Label yh = 0; yh < k; ++yh) e += eo_m.xi(yh, yh, z)[y * k + j];
                    CHECK(std::abs(e - t.yhat_given_yz[y][j][static_cast<std::size_t>(z)]) <= 1e-12);
                }
    }
}
