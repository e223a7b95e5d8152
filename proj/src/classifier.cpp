#include "gfsub/classifier.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "gfsub/error.hpp"
#include "gfsub/format.hpp"

namespace gfsub {

FeatureVector extract_features(const SpectralTrial& st, const DiscriminativeProjector& proj,
                               std::size_t rows_per_end, bool log_variance) {
  if (st.coeffs.rows() != proj.dimension()) {
    throw Error(ErrorCode::DimensionMismatch,
                "trial band has " + std::to_string(st.coeffs.rows()) + " rows, projector expects " +
                    std::to_string(proj.dimension()),
                {st.trial_id});
  }
  const auto m = static_cast<Eigen::Index>(rows_per_end);
  const Eigen::Index r = proj.rows();
  // Blocks overlap when the projector has fewer than 2m rows (tiny bands).
  if (m < 1 || m > r) {
    throw Error(ErrorCode::DimensionMismatch, "rows_per_end " + std::to_string(rows_per_end) +
                                                  " needs at least " + std::to_string(m) +
                                                  " projector rows, have " + std::to_string(r));
  }
  const Eigen::Index t = st.coeffs.cols();
  if (t < 2) {
    throw Error(ErrorCode::DimensionMismatch, "variance needs at least two time samples");
  }

  Matrix ends(2 * m, proj.dimension());
  ends.topRows(m) = proj.p_hat.topRows(m);
  ends.bottomRows(m) = proj.p_hat.bottomRows(m);
  const Matrix z = ends * st.coeffs;

  FeatureVector fv;
  fv.label = st.label;
  fv.trial_id = st.trial_id;
  fv.values.resize(2 * m);
  for (Eigen::Index i = 0; i < 2 * m; ++i) {
    const double mean = z.row(i).mean();
    const double var = (z.row(i).array() - mean).square().sum() / static_cast<double>(t - 1);
    fv.values(i) = log_variance ? std::log(var) : var;
  }
  return fv;
}

namespace {

double sign_of(Label l) { return l == Label::Class1 ? 1.0 : -1.0; }

}  // namespace

LinearModel train_classifier(std::span<const FeatureVector> features, double margin_cost,
                             const SolverOptions& options) {
  if (!(margin_cost > 0.0) || !std::isfinite(margin_cost)) {
    throw Error(ErrorCode::ConfigInvalid, "margin cost must be positive and finite");
  }

  std::vector<std::size_t> used;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (is_labeled(features[i].label)) used.push_back(i);
  }
  if (used.empty()) throw Error(ErrorCode::SingleClassInput, "no labeled training features");

  const Eigen::Index d = features[used.front()].values.size();
  const auto n = static_cast<Eigen::Index>(used.size());
  Matrix x(n, d);
  Vector y(n);
  bool has_pos = false, has_neg = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& fv = features[used[static_cast<std::size_t>(i)]];
    if (fv.values.size() != d) {
      throw Error(ErrorCode::DimensionMismatch, "feature vectors differ in length", {fv.trial_id});
    }
    if (!fv.values.allFinite()) {
      throw Error(ErrorCode::NonFiniteFeature,
                  "trial " + std::to_string(fv.trial_id) + " has a non-finite feature",
                  {fv.trial_id});
    }
    x.row(i) = fv.values.transpose();
    y(i) = sign_of(fv.label);
    (y(i) > 0 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) {
    throw Error(ErrorCode::SingleClassInput, "training features contain a single class");
  }

  const double c = margin_cost;
  const double tau = 1e-12;
  const Vector diag_q = x.rowwise().squaredNorm();

  // Dual: min 1/2 a^T Q a - e^T a, y^T a = 0, 0 <= a <= C, Q_ij = y_i y_j x_i.x_j.
  // Gradient G = Q a - e is kept exact as y .* (X w) - 1 with w = sum a_i y_i x_i.
  Vector alpha = Vector::Zero(n);
  Vector w = Vector::Zero(d);
  Vector grad = -Vector::Ones(n);

  auto in_up = [&](Eigen::Index t) {
    return (y(t) > 0 && alpha(t) < c) || (y(t) < 0 && alpha(t) > 0);
  };
  auto in_low = [&](Eigen::Index t) {
    return (y(t) > 0 && alpha(t) > 0) || (y(t) < 0 && alpha(t) < c);
  };

  std::size_t iter = 0;
  for (;; ++iter) {
    if (iter >= options.max_iterations) {
      throw Error(ErrorCode::TrainingDidNotConverge,
                  "SMO exceeded " + std::to_string(options.max_iterations) + " iterations");
    }

    Eigen::Index i = -1;
    double g_max = -std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      if (in_up(t) && (i < 0 || -y(t) * grad(t) > g_max)) {
        g_max = -y(t) * grad(t);
        i = t;
      }
    }

    Eigen::Index j = -1;
    double g_min = std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double v = -y(t) * grad(t);
      g_min = std::min(g_min, v);
      if (i < 0) continue;
      const double b = g_max - v;
      if (b > 0.0) {
        double a = diag_q(i) + diag_q(t) - 2.0 * x.row(i).dot(x.row(t));
        if (a <= 0.0) a = tau;
        const double score = -(b * b) / a;
        if (score < best) {
          best = score;
          j = t;
        }
      }
    }

    if (i < 0 || j < 0 || g_max - g_min < options.tolerance) break;

    // Two-variable subproblem along y_i d_i = -y_j d_j, clipped to the box.
    double a = diag_q(i) + diag_q(j) - 2.0 * x.row(i).dot(x.row(j));
    if (a <= 0.0) a = tau;
    const double b = -y(i) * grad(i) + y(j) * grad(j);
    const double old_i = alpha(i);
    const double old_j = alpha(j);
    double new_i = old_i + y(i) * b / a;
    double new_j = old_j - y(j) * b / a;

    const double sum = y(i) * old_i + y(j) * old_j;
    new_i = std::clamp(new_i, 0.0, c);
    new_j = y(j) * (sum - y(i) * new_i);
    if (new_j < 0.0 || new_j > c) {
      new_j = std::clamp(new_j, 0.0, c);
      new_i = y(i) * (sum - y(j) * new_j);
      new_i = std::clamp(new_i, 0.0, c);
    }

    alpha(i) = new_i;
    alpha(j) = new_j;
    w += (new_i - old_i) * y(i) * x.row(i).transpose() +
         (new_j - old_j) * y(j) * x.row(j).transpose();
    grad = (y.array() * (x * w).array() - 1.0).matrix();
  }

  // Offset from free support vectors, midpoint of the feasible interval otherwise.
  double sum_free = 0.0;
  std::size_t n_free = 0;
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y(t) * grad(t);
    if (alpha(t) >= c) {
      if (y(t) < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha(t) <= 0.0) {
      if (y(t) > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      sum_free += yg;
      ++n_free;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;

  LinearModel model;
  model.weights = w;
  model.bias = -rho;
  model.margin_cost = c;
  if (model.weights.isZero(0.0)) {
    throw Error(ErrorCode::DegenerateModel, "training produced an all-zero weight vector");
  }
  if (!model.weights.allFinite() || !std::isfinite(model.bias)) {
    throw Error(ErrorCode::TrainingDidNotConverge, "non-finite model parameters");
  }
  return model;
}

Label predict(const LinearModel& model, const FeatureVector& fv) {
  if (fv.values.size() != model.weights.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "feature length " + std::to_string(fv.values.size()) + ", model expects " +
                    std::to_string(model.weights.size()),
                {fv.trial_id});
  }
  return model.decision(fv.values) >= 0.0 ? Label::Class1 : Label::Class2;
}

FeatureScaler FeatureScaler::fit(std::span<const FeatureVector> features) {
  if (features.empty()) throw Error(ErrorCode::SingleClassInput, "no features to fit a scaler on");
  const Eigen::Index d = features.front().values.size();
  FeatureScaler s;
  s.mean = Vector::Zero(d);
  for (const auto& fv : features) s.mean += fv.values;
  s.mean /= static_cast<double>(features.size());
  Vector sq = Vector::Zero(d);
  for (const auto& fv : features) sq += (fv.values - s.mean).cwiseAbs2();
  const double denom = features.size() > 1 ? static_cast<double>(features.size() - 1) : 1.0;
  s.scale = (sq / denom).cwiseSqrt();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(s.scale(i) > 0.0)) s.scale(i) = 1.0;
  }
  return s;
}

FeatureVector FeatureScaler::apply(const FeatureVector& fv) const {
  FeatureVector out = fv;
  out.values = (fv.values - mean).cwiseQuotient(scale);
  return out;
}

void write_model(std::ostream& out, const LinearModel& model) {
  out << model.weights.size() << '\n';
  for (Eigen::Index i = 0; i < model.weights.size(); ++i) out << format_exact(model.weights(i)) << '\n';
  out << format_exact(model.bias) << '\n' << format_exact(model.margin_cost) << '\n';
}

LinearModel read_model(std::istream& in) {
  auto next = [&](const char* what) {
    std::string line;
    if (!std::getline(in, line)) {
      throw Error(ErrorCode::IoFailure, std::string("model file truncated before ") + what);
    }
    try {
      std::size_t pos = 0;
      const double v = std::stod(line, &pos);
      if (pos != line.size()) throw std::invalid_argument(line);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::IoFailure, std::string("bad ") + what + " line '" + line + "'");
    }
  };
  const double dim = next("dimension");
  if (dim < 1 || dim != std::floor(dim)) throw Error(ErrorCode::IoFailure, "bad model dimension");
  LinearModel model;
  model.weights.resize(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < model.weights.size(); ++i) model.weights(i) = next("weight");
  model.bias = next("bias");
  model.margin_cost = next("margin cost");
  return model;
}

}  // namespace gfsub
