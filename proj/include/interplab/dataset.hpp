#pragma once

#include <Eigen/Core>
#include <string>

namespace interplab {

// A finite sample: one input row per point, one target row per point.
// Construction validates shapes, finiteness, and rejects duplicate input
// rows (interpolation through a repeated point is ill-posed). The unchecked
// tag skips only the duplicate check, for diagnostics that deliberately
// probe degenerate data.
class Dataset {
  public:
    struct AllowDuplicates {};

    Dataset(Eigen::MatrixXd inputs, Eigen::MatrixXd targets);
    Dataset(Eigen::MatrixXd inputs, Eigen::MatrixXd targets, AllowDuplicates);

    Eigen::Index count() const noexcept { return inputs_.rows(); }
    Eigen::Index dim() const noexcept { return inputs_.cols(); }
    Eigen::Index target_dim() const noexcept { return targets_.cols(); }

    const Eigen::MatrixXd& inputs() const noexcept { return inputs_; }
    const Eigen::MatrixXd& targets() const noexcept { return targets_; }
    Eigen::VectorXd target_column(Eigen::Index j) const { return targets_.col(j); }

    bool bias_absorbed() const noexcept { return bias_absorbed_; }

    // Returns a copy with a constant 1 appended to every input row; a
    // dataset already in absorbed form is returned unchanged.
    Dataset with_bias_absorbed() const;

  private:
    void validate_basic() const;

    Eigen::MatrixXd inputs_;
    Eigen::MatrixXd targets_;
    bool bias_absorbed_ = false;
};

// Reads a CSV where the last target_count columns are targets and the rest
// are input coordinates. A first row containing any non-numeric field is
// treated as a header and skipped.
Dataset load_dataset_csv(const std::string& path, Eigen::Index target_count = 1);

} // namespace interplab
