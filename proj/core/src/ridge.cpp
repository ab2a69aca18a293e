#include "ntksketch/ridge.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "ntksketch/error.hpp"

namespace ntksketch {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMatrix> view(const DenseMatrix& m) {
  return {m.values.data(), static_cast<Eigen::Index>(m.rows), static_cast<Eigen::Index>(m.cols)};
}

}  // namespace

RidgeModel ridge_fit(const DenseMatrix& z, const DenseMatrix& y, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterError("lambda must be >= 0");
  if (z.rows != y.rows) {
    throw DimensionError("ridge: " + std::to_string(z.rows) + " feature rows but " +
                         std::to_string(y.rows) + " target rows");
  }
  if (z.rows == 0 || z.cols == 0 || y.cols == 0) throw EmptyDatasetError("ridge: empty system");

  const auto zm = view(z);
  const auto ym = view(y);
  const Eigen::Index s = zm.cols();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(s, s);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(zm.transpose());
  gram = gram.selfadjointView<Eigen::Lower>();
  gram.diagonal().array() += lambda;
  const Eigen::MatrixXd rhs = zm.transpose() * ym;

  const double scale = std::max(gram.diagonal().maxCoeff(), std::numeric_limits<double>::min());
  const double tiny = scale * static_cast<double>(s) * std::numeric_limits<double>::epsilon();

  Eigen::MatrixXd w;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    const Eigen::VectorXd diag = llt.matrixLLT().diagonal();
    ok = diag.minCoeff() * diag.minCoeff() > tiny;
  }
  if (ok) {
    w = llt.solve(rhs);
    ok = w.allFinite();
  }
  if (!ok) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success) throw SolveError("ridge: eigendecomposition failed");
    const Eigen::VectorXd& mu = eig.eigenvalues();
    if (mu.minCoeff() <= tiny) {
      throw SolveError("ridge: normal equations are singular; use lambda > 0");
    }
    const Eigen::MatrixXd& v = eig.eigenvectors();
    w = v * (mu.cwiseInverse().asDiagonal() * (v.transpose() * rhs));
  }

  RidgeModel model;
  model.lambda = lambda;
  model.outputs = y.cols;
  model.weights = DenseMatrix(static_cast<std::size_t>(s), y.cols);
  Eigen::Map<RowMatrix>(model.weights.values.data(), s, static_cast<Eigen::Index>(y.cols)) = w;
  return model;
}

DenseMatrix predict(const RidgeModel& model, const DenseMatrix& z) {
  if (z.cols != model.weights.rows) {
    throw DimensionError("predict: model expects " + std::to_string(model.weights.rows) +
                         " features, got " + std::to_string(z.cols));
  }
  DenseMatrix out(z.rows, model.weights.cols);
  Eigen::Map<RowMatrix>(out.values.data(), static_cast<Eigen::Index>(out.rows),
                        static_cast<Eigen::Index>(out.cols)) = view(z) * view(model.weights);
  return out;
}

std::vector<std::size_t> argmax_rows(const DenseMatrix& scores) {
  std::vector<std::size_t> out(scores.rows, 0);
  for (std::size_t i = 0; i < scores.rows; ++i) {
    const auto row = scores.row(i);
    std::size_t best = 0;
    for (std::size_t j = 1; j < row.size(); ++j) {
      if (row[j] > row[best]) best = j;
    }
    out[i] = best;
  }
  return out;
}

std::vector<std::size_t> classify(const RidgeModel& model, const DenseMatrix& z) {
  return argmax_rows(predict(model, z));
}

double training_loss(const RidgeModel& model, const DenseMatrix& z, const DenseMatrix& y) {
  const DenseMatrix pred = predict(model, z);
  if (pred.rows != y.rows || pred.cols != y.cols) throw DimensionError("loss: target shape mismatch");
  double loss = 0.0;
  for (std::size_t k = 0; k < pred.values.size(); ++k) {
    const double r = pred.values[k] - y.values[k];
    loss += r * r;
  }
  return loss;
}

double accuracy(std::span<const std::size_t> predicted, std::span<const std::int64_t> truth) {
  if (predicted.size() != truth.size()) throw DimensionError("accuracy: length mismatch");
  if (predicted.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (static_cast<std::int64_t>(predicted[i]) == truth[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

}  // namespace ntksketch
