#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "gfsub/band.hpp"
#include "gfsub/graph.hpp"
#include "gfsub/types.hpp"

namespace gfsub {

/// GFT coefficients of a de-meaned, unit-normalized trial. Rows are graph
/// frequencies `band.first..band.last` in ascending eigenvalue order, columns
/// are time samples.
struct SpectralTrial {
  Matrix coeffs;
  Label label = Label::Unlabeled;
  std::size_t trial_id = 0;
  SpectralBand band;
};

/// Per time sample f: remove the u1 component, scale to unit l2 norm, then
/// project onto the eigenbasis. Output covers the full band.
/// Throws DimensionMismatch, DegenerateColumn (index of the column).
SpectralTrial normalize_trial(const TrialMatrix& trial, const GraphSpectrum& spec);

/// Keeps the rows of `band`, which must lie inside `st.band`. No renormalization.
SpectralTrial truncate_band(const SpectralTrial& st, const SpectralBand& band);

/// Class-mean trace-normalized scatter matrices S1, S2 (unlabeled trials ignored).
struct ClassCovariancePair {
  Matrix s1;
  Matrix s2;
  std::size_t k1 = 0;
  std::size_t k2 = 0;
};

/// Throws MissingClass, DimensionMismatch, TraceUnderflow.
ClassCovariancePair class_covariances(std::span<const SpectralTrial> trials);

struct SubspaceOptions {
  double rank_tol = 1e-10;  // relative to the largest eigenvalue of S1 + S2
  bool allow_rank_reduction = false;
};

/// Transform that diagonalizes S1 and S2 at once.
///
/// `whitener` is P = Phi Theta^{-1/2} from S1 + S2 = Phi Theta Phi^T, so that
/// P^T (S1 + S2) P = I. `rotation` holds the eigenvectors Psi of P^T S1 P with
/// columns ordered by eigenvalue descending, and `p_hat` = Psi^T P^T. Row i of
/// `p_hat` pairs with `theta1[i]`: the first row carries most class-1 variance,
/// the last row most class-2 variance. Each row's largest-magnitude entry is
/// nonnegative.
struct DiscriminativeProjector {
  Matrix p_hat;     // r x n
  Vector theta1;    // r, descending, within [0, 1]
  Matrix whitener;  // n x r
  Matrix rotation;  // r x r
  std::vector<std::size_t> discarded;  // whitening directions dropped under rank reduction

  Eigen::Index rows() const { return p_hat.rows(); }
  Eigen::Index dimension() const { return p_hat.cols(); }
};

/// Throws RankDeficient (carrying the offending indices of the ascending
/// eigenvalues of S1 + S2) unless `allow_rank_reduction` is set, and EigenFailure.
DiscriminativeProjector simultaneous_diagonalize(const ClassCovariancePair& cov,
                                                 const SubspaceOptions& options = {});

void write_projector_csv(std::ostream& out, const DiscriminativeProjector& proj);
void write_theta_csv(std::ostream& out, const DiscriminativeProjector& proj);

}  // namespace gfsub
