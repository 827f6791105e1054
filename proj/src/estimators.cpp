#include "hfair/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hfair {

EmpiricalMoments::EmpiricalMoments(std::size_t label_count, std::size_t dim)
    : labels_(label_count),
      dim_(dim),
      joint_(label_count * label_count * kGroupCount, 0.0),
      xi_(label_count * label_count * kGroupCount * dim, 0.0),
      p_y_z_(label_count, std::array<double, kGroupCount>{}) {
    if (label_count < 2) throw ArgumentError("moments need at least two labels");
    if (dim < 1) throw ArgumentError("happiness dimension must be >= 1");
}

EmpiricalMoments EmpiricalMoments::swapped_groups() const {
    EmpiricalMoments out(labels_, dim_);
    for (Label a = 0; a < labels_; ++a) {
        for (Label b = 0; b < labels_; ++b) {
            for (int z = 0; z < 2; ++z) {
                out.joint(a, b, z) = joint(a, b, 1 - z);
                auto src = xi(a, b, 1 - z);
                std::copy(src.begin(), src.end(), out.xi(a, b, z).begin());
            }
        }
        for (int z = 0; z < 2; ++z) out.label_given_group(a, z) = label_given_group(a, 1 - z);
    }
    for (int z = 0; z < 2; ++z) {
        out.group_prob(z) = group_prob(1 - z);
        out.counts_[static_cast<std::size_t>(z)] = counts_[static_cast<std::size_t>(1 - z)];
    }
    return out;
}

double EmpiricalMoments::max_deviation(const EmpiricalMoments& other) const {
    if (other.labels_ != labels_ || other.dim_ != dim_) {
        throw ArgumentError("moment shapes differ");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < joint_.size(); ++i) worst = std::max(worst, std::abs(joint_[i] - other.joint_[i]));
    for (std::size_t i = 0; i < xi_.size(); ++i) worst = std::max(worst, std::abs(xi_[i] - other.xi_[i]));
    return worst;
}

LabelGivenGroup estimate_label_given_group(const Dataset& d) {
    const std::size_t k = d.label_space.size();
    LabelGivenGroup counts(k, std::array<double, kGroupCount>{});
    const auto groups = d.group_counts();
    if (groups[0] == 0 || groups[1] == 0) throw DataError("both groups must be present");
    for (const auto& s : d.samples) counts.at(s.y)[static_cast<std::size_t>(s.z)] += 1.0;
    for (auto& row : counts) {
        for (std::size_t z = 0; z < kGroupCount; ++z) row[z] /= static_cast<double>(groups[z]);
    }
    return counts;
}

EmpiricalMoments estimate_moments(const Dataset& d, const HappinessSpec& spec) {
    const std::size_t k = d.label_space.size();
    const std::size_t n = spec.dim();
    const auto groups = d.group_counts();
    if (groups[0] == 0 || groups[1] == 0) throw DataError("both groups must be present");

    EmpiricalMoments m(k, n);
    m.group_counts() = groups;
    const double total = static_cast<double>(d.size());
    std::vector<double> eta(n);

    for (std::size_t r = 0; r < d.samples.size(); ++r) {
        const Sample& s = d.samples[r];
        if (s.p_hat.size() != k) {
            throw DataError("sample " + std::to_string(r) + " has no soft prediction");
        }
        for (Label yhat = 0; yhat < k; ++yhat) m.joint(yhat, s.y, s.z) += s.p_hat[yhat] / total;
        for (Label yt = 0; yt < k; ++yt) {
            spec.eval(HappinessArgs{yt, s.features, s.y, s.z}, eta);
            for (Label yhat = 0; yhat < k; ++yhat) {
                auto xi = m.xi(yt, yhat, s.z);
                for (std::size_t i = 0; i < n; ++i) xi[i] += s.p_hat[yhat] * eta[i];
            }
        }
    }

    for (int z = 0; z < 2; ++z) {
        const double dz = static_cast<double>(groups[static_cast<std::size_t>(z)]);
        m.group_prob(z) = dz / total;
        // 1 / (p_Z(z) |D|) == 1 / D_z
        for (Label yt = 0; yt < k; ++yt) {
            for (Label yhat = 0; yhat < k; ++yhat) {
                for (double& v : m.xi(yt, yhat, z)) v /= dz;
            }
        }
    }
    const auto pyz = estimate_label_given_group(d);
    for (Label y = 0; y < k; ++y) {
        for (int z = 0; z < 2; ++z) m.label_given_group(y, z) = pyz[y][static_cast<std::size_t>(z)];
    }
    return m;
}

std::uint64_t sample_size_bound(double gamma, double delta, double range_c, std::size_t n,
                                std::size_t label_count) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw ArgumentError("gamma must lie in (0, 1)");
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ArgumentError("delta must be > 0");
    if (!(range_c >= 1.0) || !std::isfinite(range_c)) throw ArgumentError("C must be >= 1");
    if (n < 1) throw ArgumentError("n must be >= 1");
    if (label_count < 2) throw ArgumentError("label count must be >= 2");
    const double y2 = static_cast<double>(label_count) * static_cast<double>(label_count);
    const double events = 4.0 * static_cast<double>(n + 1) * y2;
    const double bound = range_c * range_c / (2.0 * delta * delta) * std::log(events / gamma);
    return static_cast<std::uint64_t>(std::ceil(bound));
}

} // namespace hfair
