#include "gfsub/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include <Eigen/Eigenvalues>

#include "gfsub/error.hpp"
#include "gfsub/format.hpp"

namespace gfsub {

namespace {

constexpr double kMinColumnNorm = 1e-12;
constexpr double kMinTrace = 1e-14;

}  // namespace

SpectralTrial normalize_trial(const TrialMatrix& trial, const GraphSpectrum& spec) {
  const Eigen::Index n = spec.size();
  if (trial.channels() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                "trial " + std::to_string(trial.trial_id) + " has " +
                    std::to_string(trial.channels()) + " channels, graph has " + std::to_string(n),
                {trial.trial_id});
  }

  const auto u1 = spec.eigenvectors.col(0);
  Matrix centered = trial.data - u1 * (u1.transpose() * trial.data);
  for (Eigen::Index t = 0; t < centered.cols(); ++t) {
    const double norm = centered.col(t).norm();
    if (!(norm >= kMinColumnNorm)) {
      throw Error(ErrorCode::DegenerateColumn,
                  "trial " + std::to_string(trial.trial_id) + " column " + std::to_string(t) +
                      " vanishes after removing the u1 component",
                  {static_cast<std::size_t>(t)});
    }
    centered.col(t) /= norm;
  }

  SpectralTrial out;
  out.coeffs = spec.eigenvectors.transpose() * centered;
  out.label = trial.label;
  out.trial_id = trial.trial_id;
  out.band = resolve_band(BandMode::All, 0, static_cast<std::size_t>(n));
  return out;
}

SpectralTrial truncate_band(const SpectralTrial& st, const SpectralBand& band) {
  if (band.last < band.first || band.first == 0) {
    throw Error(ErrorCode::EmptyBand, "band [" + std::to_string(band.first) + ", " +
                                          std::to_string(band.last) + "] is empty");
  }
  if (band.first < st.band.first || band.last > st.band.last) {
    throw Error(ErrorCode::DimensionMismatch,
                "band [" + std::to_string(band.first) + ", " + std::to_string(band.last) +
                    "] not inside [" + std::to_string(st.band.first) + ", " +
                    std::to_string(st.band.last) + "]");
  }
  SpectralTrial out;
  out.coeffs = st.coeffs.middleRows(static_cast<Eigen::Index>(band.first - st.band.first),
                                    static_cast<Eigen::Index>(band.size()));
  out.label = st.label;
  out.trial_id = st.trial_id;
  out.band = band;
  return out;
}

ClassCovariancePair class_covariances(std::span<const SpectralTrial> trials) {
  Eigen::Index dim = -1;
  ClassCovariancePair out;
  for (const auto& st : trials) {
    if (!is_labeled(st.label)) continue;
    if (dim < 0) {
      dim = st.coeffs.rows();
      out.s1 = Matrix::Zero(dim, dim);
      out.s2 = Matrix::Zero(dim, dim);
    } else if (st.coeffs.rows() != dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  "trial " + std::to_string(st.trial_id) + " has " +
                      std::to_string(st.coeffs.rows()) + " rows, expected " + std::to_string(dim),
                  {st.trial_id});
    }
    Matrix scatter = st.coeffs * st.coeffs.transpose();
    const double tr = scatter.trace();
    if (!(tr >= kMinTrace)) {
      throw Error(ErrorCode::TraceUnderflow,
                  "trial " + std::to_string(st.trial_id) + " has scatter trace " + format_exact(tr),
                  {st.trial_id});
    }
    scatter /= tr;
    if (st.label == Label::Class1) {
      out.s1 += scatter;
      ++out.k1;
    } else {
      out.s2 += scatter;
      ++out.k2;
    }
  }
  if (out.k1 == 0) throw Error(ErrorCode::MissingClass, "no class-1 trials", {1});
  if (out.k2 == 0) throw Error(ErrorCode::MissingClass, "no class-2 trials", {2});
  out.s1 /= static_cast<double>(out.k1);
  out.s2 /= static_cast<double>(out.k2);
  out.s1 = (0.5 * (out.s1 + out.s1.transpose())).eval();
  out.s2 = (0.5 * (out.s2 + out.s2.transpose())).eval();
  return out;
}

DiscriminativeProjector simultaneous_diagonalize(const ClassCovariancePair& cov,
                                                 const SubspaceOptions& options) {
  const Eigen::Index n = cov.s1.rows();
  if (n == 0 || cov.s1.cols() != n || cov.s2.rows() != n || cov.s2.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "class covariances must be square and equal-sized");
  }

  const Matrix composite = cov.s1 + cov.s2;
  Eigen::SelfAdjointEigenSolver<Matrix> whiten(composite);
  if (whiten.info() != Eigen::Success) {
    throw Error(ErrorCode::EigenFailure, "eigendecomposition of S1 + S2 did not converge");
  }
  const Vector& theta = whiten.eigenvalues();
  const double largest = theta(n - 1);
  if (!(largest > 0.0)) {
    throw Error(ErrorCode::RankDeficient, "S1 + S2 is zero",
                [&] {
                  std::vector<std::size_t> all(static_cast<std::size_t>(n));
                  std::iota(all.begin(), all.end(), std::size_t{0});
                  return all;
                }());
  }

  std::vector<std::size_t> discarded;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (theta(i) < options.rank_tol * largest) {
      discarded.push_back(static_cast<std::size_t>(i));
    } else {
      kept.push_back(i);
    }
  }
  if (!discarded.empty() && !options.allow_rank_reduction) {
    throw Error(ErrorCode::RankDeficient,
                std::to_string(discarded.size()) + " of " + std::to_string(n) +
                    " directions of S1 + S2 fall below the rank tolerance",
                discarded);
  }

  const auto r = static_cast<Eigen::Index>(kept.size());
  DiscriminativeProjector out;
  out.discarded = std::move(discarded);
  out.whitener.resize(n, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    out.whitener.col(j) = whiten.eigenvectors().col(kept[j]) / std::sqrt(theta(kept[j]));
  }

  Matrix whitened_s1 = out.whitener.transpose() * cov.s1 * out.whitener;
  whitened_s1 = (0.5 * (whitened_s1 + whitened_s1.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> rotate(whitened_s1);
  if (rotate.info() != Eigen::Success) {
    throw Error(ErrorCode::EigenFailure, "eigendecomposition of whitened S1 did not converge");
  }

  // Descending by eigenvalue; ties keep ascending solver index.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(r));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Vector& ev = rotate.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return ev(a) > ev(b); });

  out.rotation.resize(r, r);
  out.theta1.resize(r);
  for (Eigen::Index j = 0; j < r; ++j) {
    out.rotation.col(j) = rotate.eigenvectors().col(order[j]);
    out.theta1(j) = std::clamp(ev(order[j]), 0.0, 1.0);
  }

  out.p_hat = out.rotation.transpose() * out.whitener.transpose();
  for (Eigen::Index i = 0; i < r; ++i) {
    Eigen::Index pivot = 0;
    out.p_hat.row(i).cwiseAbs().maxCoeff(&pivot);
    if (out.p_hat(i, pivot) < 0.0) {
      out.p_hat.row(i) = -out.p_hat.row(i);
      out.rotation.col(i) = -out.rotation.col(i);
    }
  }
  if (!out.p_hat.allFinite()) {
    throw Error(ErrorCode::EigenFailure, "projector has non-finite entries");
  }
  return out;
}

void write_projector_csv(std::ostream& out, const DiscriminativeProjector& proj) {
  for (Eigen::Index i = 0; i < proj.p_hat.rows(); ++i) {
    for (Eigen::Index j = 0; j < proj.p_hat.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_exact(proj.p_hat(i, j));
    }
    out << '\n';
  }
}

void write_theta_csv(std::ostream& out, const DiscriminativeProjector& proj) {
  for (Eigen::Index i = 0; i < proj.theta1.size(); ++i) out << format_exact(proj.theta1(i)) << '\n';
}

}  // namespace gfsub
