#pragma once

#include <iosfwd>
#include <span>

#include "gfsub/types.hpp"

namespace gfsub {

/// Undirected weighted graph over the electrodes with its normalized Laplacian
/// I - D^{-1/2} A D^{-1/2}. Validated on construction and immutable afterwards.
class ConnectivityGraph {
 public:
  /// Throws DimensionMismatch for non-square input and IsolatedVertex when a
  /// degree falls below 1e-12. The diagonal is forced to zero and the matrix is
  /// symmetrized as (A + A^T) / 2.
  explicit ConnectivityGraph(Matrix adjacency);

  Eigen::Index n_vertices() const { return adjacency_.rows(); }
  const Matrix& adjacency() const { return adjacency_; }
  const Vector& degrees() const { return degrees_; }
  const Matrix& laplacian() const { return laplacian_; }

 private:
  Matrix adjacency_;
  Vector degrees_;
  Matrix laplacian_;
};

/// Eigenpairs of the normalized Laplacian, eigenvalues ascending, one
/// eigenvector per column. Each eigenvector's largest-magnitude entry is
/// nonnegative (first index wins ties).
struct GraphSpectrum {
  Vector eigenvalues;
  Matrix eigenvectors;

  Eigen::Index size() const { return eigenvalues.size(); }
};

/// |Pearson correlation| between channels over the time-concatenation of all
/// trials.
ConnectivityGraph build_graph(std::span<const TrialMatrix> trials);

/// Same, from an already concatenated channels x samples block.
ConnectivityGraph build_graph(const Matrix& samples);

GraphSpectrum spectrum(const ConnectivityGraph& graph);

Vector gft(const GraphSpectrum& spec, const Vector& signal);
Vector igft(const GraphSpectrum& spec, const Vector& coeffs);

/// Column-wise transforms of an N x T block of graph signals.
Matrix gft(const GraphSpectrum& spec, const Matrix& signals);
Matrix igft(const GraphSpectrum& spec, const Matrix& coeffs);

/// Flips each column so its largest-magnitude entry is nonnegative.
void canonicalize_signs(Matrix& columns);

void write_adjacency_csv(std::ostream& out, const ConnectivityGraph& graph);
void write_eigenvalues_csv(std::ostream& out, const GraphSpectrum& spec);

}  // namespace gfsub
