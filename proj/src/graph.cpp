#include "gfsub/graph.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include <Eigen/Eigenvalues>

#include "gfsub/error.hpp"
#include "gfsub/format.hpp"

namespace gfsub {

namespace {

constexpr double kMinDegree = 1e-12;

}  // namespace

ConnectivityGraph::ConnectivityGraph(Matrix adjacency) : adjacency_(std::move(adjacency)) {
  const Eigen::Index n = adjacency_.rows();
  if (n == 0 || adjacency_.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                "adjacency must be square and nonempty, got " + std::to_string(adjacency_.rows()) +
                    "x" + std::to_string(adjacency_.cols()));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = adjacency_(i, j);
      if (!std::isfinite(w) || w < 0.0 || w > 1.0) {
        throw Error(ErrorCode::InvalidWeight,
                    "weight (" + std::to_string(i) + "," + std::to_string(j) + ") = " +
                        format_exact(w) + " outside [0, 1]",
                    {static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
      }
    }
  }
  adjacency_ = (0.5 * (adjacency_ + adjacency_.transpose())).eval();
  adjacency_.diagonal().setZero();

  degrees_ = adjacency_.rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (degrees_(i) < kMinDegree) {
      throw Error(ErrorCode::IsolatedVertex,
                  "vertex " + std::to_string(i) + " has degree " + format_exact(degrees_(i)),
                  {static_cast<std::size_t>(i)});
    }
  }

  const Vector inv_sqrt = degrees_.cwiseSqrt().cwiseInverse();
  laplacian_ = -(inv_sqrt.asDiagonal() * adjacency_ * inv_sqrt.asDiagonal());
  laplacian_.diagonal().array() += 1.0;
  // Entry-wise products are symmetric already; average to remove any rounding skew.
  laplacian_ = (0.5 * (laplacian_ + laplacian_.transpose())).eval();
}

ConnectivityGraph build_graph(const Matrix& samples) {
  const Eigen::Index n = samples.rows();
  const Eigen::Index s = samples.cols();
  if (n == 0 || s < 2) {
    throw Error(ErrorCode::DimensionMismatch, "need at least one channel and two samples");
  }

  Matrix centered = samples.colwise() - samples.rowwise().mean();
  Vector norms = centered.rowwise().norm();
  for (Eigen::Index c = 0; c < n; ++c) {
    const double scale = std::abs(samples.row(c).mean()) * std::sqrt(static_cast<double>(s));
    if (!(norms(c) > 1e-14 * std::max(1.0, scale))) {
      throw Error(ErrorCode::ZeroVarianceChannel,
                  "channel " + std::to_string(c) + " is constant", {static_cast<std::size_t>(c)});
    }
  }
  centered.array().colwise() /= norms.array();

  Matrix adjacency = (centered * centered.transpose()).cwiseAbs();
  adjacency = adjacency.cwiseMin(1.0);
  adjacency.diagonal().setZero();
  return ConnectivityGraph(std::move(adjacency));
}

ConnectivityGraph build_graph(std::span<const TrialMatrix> trials) {
  if (trials.empty()) {
    throw Error(ErrorCode::DimensionMismatch, "no trials supplied for graph construction");
  }
  const Eigen::Index n = trials.front().channels();
  Eigen::Index total = 0;
  for (std::size_t k = 0; k < trials.size(); ++k) {
    if (trials[k].channels() != n) {
      throw Error(ErrorCode::DimensionMismatch,
                  "trial " + std::to_string(trials[k].trial_id) + " has " +
                      std::to_string(trials[k].channels()) + " channels, expected " +
                      std::to_string(n),
                  {k});
    }
    total += trials[k].samples();
  }

  Matrix concatenated(n, total);
  Eigen::Index offset = 0;
  for (const auto& trial : trials) {
    concatenated.middleCols(offset, trial.samples()) = trial.data;
    offset += trial.samples();
  }
  return build_graph(concatenated);
}

void canonicalize_signs(Matrix& columns) {
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < columns.rows(); ++i) {
      const double mag = std::abs(columns(i, j));
      if (mag > best) {
        best = mag;
        pivot = i;
      }
    }
    if (columns.rows() > 0 && columns(pivot, j) < 0.0) columns.col(j) = -columns.col(j);
  }
}

GraphSpectrum spectrum(const ConnectivityGraph& graph) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(graph.laplacian(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::EigenFailure, "normalized Laplacian eigendecomposition did not converge");
  }
  GraphSpectrum out{solver.eigenvalues(), solver.eigenvectors()};
  if (!out.eigenvalues.allFinite() || !out.eigenvectors.allFinite()) {
    throw Error(ErrorCode::EigenFailure, "non-finite eigenpairs");
  }
  canonicalize_signs(out.eigenvectors);
  return out;
}

namespace {

void require_rows(const GraphSpectrum& spec, Eigen::Index rows, const char* what) {
  if (rows != spec.size()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has length " +
                                                  std::to_string(rows) + ", graph has " +
                                                  std::to_string(spec.size()) + " vertices");
  }
}

}  // namespace

Vector gft(const GraphSpectrum& spec, const Vector& signal) {
  require_rows(spec, signal.size(), "signal");
  return spec.eigenvectors.transpose() * signal;
}

Vector igft(const GraphSpectrum& spec, const Vector& coeffs) {
  require_rows(spec, coeffs.size(), "coefficient vector");
  return spec.eigenvectors * coeffs;
}

Matrix gft(const GraphSpectrum& spec, const Matrix& signals) {
  require_rows(spec, signals.rows(), "signal block");
  return spec.eigenvectors.transpose() * signals;
}

Matrix igft(const GraphSpectrum& spec, const Matrix& coeffs) {
  require_rows(spec, coeffs.rows(), "coefficient block");
  return spec.eigenvectors * coeffs;
}

void write_adjacency_csv(std::ostream& out, const ConnectivityGraph& graph) {
  const Matrix& a = graph.adjacency();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_exact(a(i, j));
    }
    out << '\n';
  }
}

void write_eigenvalues_csv(std::ostream& out, const GraphSpectrum& spec) {
  for (Eigen::Index i = 0; i < spec.size(); ++i) out << format_exact(spec.eigenvalues(i)) << '\n';
}

}  // namespace gfsub
