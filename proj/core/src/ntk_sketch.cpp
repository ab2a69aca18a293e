#include "ntksketch/ntk_sketch.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "ntksketch/error.hpp"
#include "ntksketch/random.hpp"

namespace ntksketch {

namespace {

std::vector<double> sqrt_coefficients(const KernelPolynomial& poly) {
  std::vector<double> out(poly.coefficients.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::sqrt(poly.coefficients[i]);
  return out;
}

// Writes sqrt(coef_l) * prefix[degree - l] into consecutive blocks of `cat`.
void weighted_concat(std::span<const std::vector<double>> prefixes, std::span<const double> sqrt_coef,
                     std::span<double> cat) {
  const std::size_t degree = prefixes.size() - 1;
  const std::size_t block = prefixes[0].size();
  for (std::size_t l = 0; l <= degree; ++l) {
    const std::vector<double>& z = prefixes[degree - l];
    double* dst = cat.data() + l * block;
    const double w = sqrt_coef[l];
    if (w == 0.0) {
      std::fill(dst, dst + block, 0.0);
    } else {
      for (std::size_t k = 0; k < block; ++k) dst[k] = w * z[k];
    }
  }
}

double sparse_norm(const SparseVector& x) {
  std::vector<std::pair<std::uint32_t, double>> entries(x.nnz());
  for (std::size_t k = 0; k < x.nnz(); ++k) entries[k] = {x.indices[k], x.values[k]};
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double sq = 0.0;
  for (std::size_t k = 0; k < entries.size();) {
    double v = 0.0;
    const std::uint32_t idx = entries[k].first;
    for (; k < entries.size() && entries[k].first == idx; ++k) v += entries[k].second;
    sq += v * v;
  }
  return std::sqrt(sq);
}

}  // namespace

struct NtkSketch::Input {
  std::span<const double> dense;
  const SparseVector* sparse = nullptr;
  double norm = 0.0;
};

NtkSketch::NtkSketch(std::size_t input_dim, const SketchConfig& config)
    : input_dim_(input_dim), config_(resolve_config(config, FeatureKind::ntk)) {
  if (input_dim == 0) throw ParameterError("input dimension must be positive");
  const SketchDims& d = config_.dims;
  const std::uint64_t seed = config_.seed;
  const std::size_t sparsity = config_.osnap_sparsity;

  if (config_.mode == PolyMode::taylor) {
    const std::size_t p = static_cast<std::size_t>(config_.p);
    const std::size_t pp = static_cast<std::size_t>(config_.p_prime);
    kappa1_poly_ = taylor_coeffs_kappa1(config_.p);
    kappa0_poly_ = taylor_coeffs_kappa0(config_.p_prime);
    sqrt_c_ = sqrt_coefficients(kappa1_poly_);
    sqrt_b_ = sqrt_coefficients(kappa0_poly_);
    linear_leaf_.emplace(input_dim, d.n, derive_seed(seed, component::kLinearLeaf), sparsity);
    input_srht_.emplace(d.n, d.r, derive_seed(seed, component::kInputSrht));
    covariance_poly_.emplace(2 * p + 2, d.r, d.m, derive_seed(seed, component::kCovariancePoly),
                             LeafKind::dense, sparsity);
    covariance_mix_.emplace((2 * p + 3) * d.m, d.r, derive_seed(seed, component::kCovarianceSrht));
    derivative_poly_.emplace(2 * pp + 1, d.r, d.n1, derive_seed(seed, component::kDerivativePoly),
                             LeafKind::dense, sparsity);
    derivative_mix_.emplace((2 * pp + 2) * d.n1, d.s,
                            derive_seed(seed, component::kDerivativeSrht));
    product_poly_.emplace(2, d.s, d.m2, derive_seed(seed, component::kProductPoly),
                          LeafKind::dense, sparsity);
    layer_mix_.emplace(d.m2 + d.r, d.s, derive_seed(seed, component::kMixSrht));
    base_srht_.emplace(d.r, d.s, derive_seed(seed, component::kBaseSrht));
  } else {
    fitted_poly_ = fit_ntk_polynomial(config_.depth, config_.fitted_degree, config_.fit_grid);
    sqrt_a_ = sqrt_coefficients(fitted_poly_);
    const std::size_t degree = static_cast<std::size_t>(config_.fitted_degree);
    fitted_poly_sketch_.emplace(degree, input_dim, d.m, derive_seed(seed, component::kFittedPoly),
                                LeafKind::sparse, sparsity);
    fitted_mix_.emplace((degree + 1) * d.m, d.s, derive_seed(seed, component::kFittedSrht));
  }
  gaussian_.emplace(d.s_star, d.s, derive_seed(seed, component::kGaussian));
}

std::size_t NtkSketch::covariance_mix_input_dim() const {
  return covariance_mix_ ? covariance_mix_->input_dim() : 0;
}
std::size_t NtkSketch::derivative_mix_input_dim() const {
  return derivative_mix_ ? derivative_mix_->input_dim() : 0;
}
std::size_t NtkSketch::layer_mix_input_dim() const {
  return layer_mix_ ? layer_mix_->input_dim() : 0;
}

std::vector<double> NtkSketch::transform(std::span<const double> x) const {
  if (x.size() != input_dim_) {
    throw DimensionError("NTK sketch expects dimension " + std::to_string(input_dim_) + ", got " +
                         std::to_string(x.size()));
  }
  double sq = 0.0;
  for (double v : x) sq += v * v;
  Input in{x, nullptr, std::sqrt(sq)};
  return dispatch(in);
}

std::vector<double> NtkSketch::transform(const SparseVector& x) const {
  if (x.dim != input_dim_) {
    throw DimensionError("NTK sketch expects dimension " + std::to_string(input_dim_) + ", got " +
                         std::to_string(x.dim));
  }
  if (x.values.size() != x.indices.size()) throw DimensionError("sparse vector is malformed");
  for (std::uint32_t idx : x.indices) {
    if (idx >= input_dim_) throw DimensionError("sparse index out of range");
  }
  Input in{{}, &x, sparse_norm(x)};
  return dispatch(in);
}

std::vector<double> NtkSketch::dispatch(const Input& in) const {
  if (!(in.norm > 0.0)) throw ZeroInputError("NTK sketch input has zero norm");
  if (!std::isfinite(in.norm)) throw ParameterError("NTK sketch input is not finite");
  if (config_.mode == PolyMode::fitted) return run_fitted(in);
  return run_taylor(in, false).features;
}

NtkLayerTrace NtkSketch::transform_traced(std::span<const double> x) const {
  if (config_.mode != PolyMode::taylor) {
    throw ParameterError("layer traces exist only in Taylor mode");
  }
  if (x.size() != input_dim_) throw DimensionError("NTK sketch input dimension mismatch");
  double sq = 0.0;
  for (double v : x) sq += v * v;
  Input in{x, nullptr, std::sqrt(sq)};
  if (!(in.norm > 0.0)) throw ZeroInputError("NTK sketch input has zero norm");
  return run_taylor(in, true);
}

NtkLayerTrace NtkSketch::run_taylor(const Input& in, bool keep_trace) const {
  const SketchDims& d = config_.dims;
  const int depth = config_.depth;

  std::vector<double> leaf(d.n);
  if (in.sparse) {
    linear_leaf_->apply(*in.sparse, leaf);
  } else {
    linear_leaf_->apply(in.dense, leaf);
  }
  std::vector<double> scratch;
  std::vector<double> phi(d.r);
  input_srht_->apply(leaf, phi, scratch);
  for (double& v : phi) v /= in.norm;

  std::vector<double> psi(d.s);
  base_srht_->apply(phi, psi, scratch);

  NtkLayerTrace trace;
  if (keep_trace) {
    trace.phi.push_back(phi);
    trace.phi_dot.emplace_back();
    trace.psi.push_back(psi);
  }

  PolySketch::Workspace ws_cov, ws_der, ws_prod;
  std::vector<std::vector<double>> zs(covariance_poly_->degree() + 1);
  std::vector<std::vector<double>> ys(derivative_poly_->degree() + 1);
  std::vector<double> cat_cov(covariance_mix_->input_dim());
  std::vector<double> cat_der(derivative_mix_->input_dim());
  std::vector<double> cat_mix(layer_mix_->input_dim());
  std::vector<double> phi_next(d.r), phi_dot(d.s);

  for (int h = 1; h <= depth; ++h) {
    covariance_poly_->apply_tensor_power_prefixes(phi, zs, ws_cov);
    weighted_concat(zs, sqrt_c_, cat_cov);
    covariance_mix_->apply(cat_cov, phi_next, scratch);

    derivative_poly_->apply_tensor_power_prefixes(phi, ys, ws_der);
    weighted_concat(ys, sqrt_b_, cat_der);
    derivative_mix_->apply(cat_der, phi_dot, scratch);

    const std::span<const double> factors[2] = {psi, phi_dot};
    product_poly_->apply_tensor_product(factors, std::span<double>(cat_mix).first(d.m2), ws_prod);
    std::copy(phi_next.begin(), phi_next.end(), cat_mix.begin() + static_cast<std::ptrdiff_t>(d.m2));
    layer_mix_->apply(cat_mix, psi, scratch);
    phi.swap(phi_next);

    if (keep_trace) {
      trace.phi.push_back(phi);
      trace.phi_dot.push_back(phi_dot);
      trace.psi.push_back(psi);
    }
  }

  trace.features.resize(d.s_star);
  gaussian_->apply(psi, trace.features);
  for (double& v : trace.features) v *= in.norm;
  return trace;
}

std::vector<double> NtkSketch::run_fitted(const Input& in) const {
  const SketchDims& d = config_.dims;
  std::vector<std::vector<double>> zs;
  if (in.sparse) {
    SparseVector unit = *in.sparse;
    for (double& v : unit.values) v /= in.norm;
    zs = fitted_poly_sketch_->apply_tensor_power_prefixes(unit);
  } else {
    std::vector<double> unit(in.dense.begin(), in.dense.end());
    for (double& v : unit) v /= in.norm;
    zs = fitted_poly_sketch_->apply_tensor_power_prefixes(unit);
  }
  std::vector<double> cat(fitted_mix_->input_dim());
  weighted_concat(zs, sqrt_a_, cat);
  std::vector<double> scratch, mixed(d.s);
  fitted_mix_->apply(cat, mixed, scratch);
  std::vector<double> features(d.s_star);
  gaussian_->apply(mixed, features);
  const double scale = in.norm * std::sqrt(config_.depth + 1.0);
  for (double& v : features) v *= scale;
  return features;
}

}  // namespace ntksketch
