#pragma once

#include <cstddef>
#include <optional>

#include <Eigen/Dense>

namespace gfsub {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Label : int { Unlabeled = 0, Class1 = 1, Class2 = 2 };

enum class Split { Train, Test };

inline bool is_labeled(Label l) { return l != Label::Unlabeled; }

/// One cue-locked trial: channels x time samples.
struct TrialMatrix {
  Matrix data;  // N x T
  Label label = Label::Unlabeled;
  std::size_t trial_id = 0;
  Split split = Split::Train;

  Eigen::Index channels() const { return data.rows(); }
  Eigen::Index samples() const { return data.cols(); }
};

}  // namespace gfsub
