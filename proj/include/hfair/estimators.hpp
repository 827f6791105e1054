#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hfair/core.hpp"
#include "hfair/happiness.hpp"

namespace hfair {

// p_{Y|Z}(y|z), one row per label.
using LabelGivenGroup = std::vector<std::array<double, kGroupCount>>;

// Empirical quantities that fully determine the post-processing LP:
//   joint(yhat, y, z)        estimate of p_{Yhat Y Z}
//   xi(ytilde, yhat, z)      n-vector, p_{Yhat|Z}(yhat|z) E[eta(ytilde, X, Y, z) | Yhat = yhat, Z = z]
//   group_prob(z)            p_Z(z)
//   label_given_group(y, z)  p_{Y|Z}(y|z)
class EmpiricalMoments {
public:
    EmpiricalMoments() = default;
    EmpiricalMoments(std::size_t label_count, std::size_t dim);

    std::size_t label_count() const { return labels_; }
    std::size_t dim() const { return dim_; }

    double& joint(Label yhat, Label y, int z) { return joint_[joint_index(yhat, y, z)]; }
    double joint(Label yhat, Label y, int z) const { return joint_[joint_index(yhat, y, z)]; }

    std::span<double> xi(Label ytilde, Label yhat, int z) {
        return {xi_.data() + xi_index(ytilde, yhat, z), dim_};
    }
    std::span<const double> xi(Label ytilde, Label yhat, int z) const {
        return {xi_.data() + xi_index(ytilde, yhat, z), dim_};
    }

    double& group_prob(int z) { return p_z_.at(static_cast<std::size_t>(z)); }
    double group_prob(int z) const { return p_z_.at(static_cast<std::size_t>(z)); }

    double& label_given_group(Label y, int z) { return p_y_z_.at(y).at(static_cast<std::size_t>(z)); }
    double label_given_group(Label y, int z) const { return p_y_z_.at(y).at(static_cast<std::size_t>(z)); }
    const LabelGivenGroup& label_given_group() const { return p_y_z_; }

    std::array<std::size_t, kGroupCount>& group_counts() { return counts_; }
    const std::array<std::size_t, kGroupCount>& group_counts() const { return counts_; }

    // Same moments with groups 0 and 1 exchanged.
    EmpiricalMoments swapped_groups() const;

    // Largest absolute difference over joint and xi entries.
    double max_deviation(const EmpiricalMoments& other) const;

private:
    std::size_t joint_index(Label yhat, Label y, int z) const {
        return (yhat * labels_ + y) * kGroupCount + static_cast<std::size_t>(z);
    }
    std::size_t xi_index(Label ytilde, Label yhat, int z) const {
        return ((ytilde * labels_ + yhat) * kGroupCount + static_cast<std::size_t>(z)) * dim_;
    }

    std::size_t labels_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> joint_;
    std::vector<double> xi_;
    std::array<double, kGroupCount> p_z_{};
    LabelGivenGroup p_y_z_;
    std::array<std::size_t, kGroupCount> counts_{};
};

// Empirical p_{Y|Z} from hard labels. Throws DataError if a group is empty.
LabelGivenGroup estimate_label_given_group(const Dataset& d);

// Soft-count estimates over a validation set, summed in dataset order.
// Requires predictions on every sample and both groups non-empty.
EmpiricalMoments estimate_moments(const Dataset& d, const HappinessSpec& spec);

// Per-group validation size sufficient for all moments to be within delta of
// their expectations with probability 1 - gamma, for happiness of range C:
//   ceil( C^2 / (2 delta^2) * ln(4 (n + 1) |Y|^2 / gamma) ).
std::uint64_t sample_size_bound(double gamma, double delta, double range_c, std::size_t n,
                                std::size_t label_count);

} // namespace hfair
