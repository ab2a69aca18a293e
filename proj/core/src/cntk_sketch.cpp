#include "ntksketch/cntk_sketch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ntksketch/error.hpp"
#include "ntksketch/random.hpp"
#include "parallel.hpp"

namespace ntksketch {

namespace {

ResolvedConfig resolve_cntk(const SketchConfig& config, std::size_t pixels, int filter) {
  if (filter < 1 || filter % 2 == 0) {
    throw ParameterError("filter size must be a positive odd integer, got " +
                         std::to_string(filter));
  }
  if (config.depth < 1) throw ParameterError("CNTK depth must be at least 1");
  if (config.mode != PolyMode::taylor) {
    throw ParameterError("the CNTK sketch supports only Taylor-mode polynomials");
  }
  SketchConfig c = config;
  if (!c.p || !c.p_prime) {
    std::int64_t p = c.degree_cap, pp = c.degree_cap;
    if (c.depth >= 1 && c.eps > 0.0 && c.eps < 1.0) {
      try {
        const DegreeChoice choice = choose_degrees(c.depth, c.eps);
        p = std::min<std::int64_t>(choice.p, c.degree_cap);
        pp = std::min<std::int64_t>(choice.p_prime, c.degree_cap);
      } catch (const ParameterError&) {
      }
    }
    if (!c.p) c.p = static_cast<int>(p);
    if (!c.p_prime) c.p_prime = static_cast<int>(pp);
  }
  return resolve_config(c, FeatureKind::cntk, pixels);
}

std::vector<double> sqrt_coefficients(const KernelPolynomial& poly) {
  std::vector<double> out(poly.coefficients.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::sqrt(poly.coefficients[i]);
  return out;
}

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

std::size_t checked_pixels(std::size_t rows, std::size_t cols, std::size_t channels) {
  if (rows == 0 || cols == 0 || channels == 0) {
    throw ParameterError("image dimensions must be positive");
  }
  return rows * cols;
}

}  // namespace

CntkSketch::CntkSketch(std::size_t rows, std::size_t cols, std::size_t channels, int filter,
                       const SketchConfig& config)
    : rows_(rows),
      cols_(cols),
      channels_(channels),
      filter_(filter),
      config_(resolve_cntk(config, checked_pixels(rows, cols, channels), filter)),
      kappa1_poly_(taylor_coeffs_kappa1(config_.p)),
      kappa0_poly_(taylor_coeffs_kappa0(config_.p_prime)),
      sqrt_c_(sqrt_coefficients(kappa1_poly_)),
      sqrt_b_(sqrt_coefficients(kappa0_poly_)),
      input_srht_(channels, config_.dims.r, derive_seed(config_.seed, component::kInputSrht)),
      covariance_poly_(2 * static_cast<std::size_t>(config_.p) + 2,
                       static_cast<std::size_t>(filter) * filter * config_.dims.r, config_.dims.m,
                       derive_seed(config_.seed, component::kCovariancePoly), LeafKind::dense,
                       config_.osnap_sparsity),
      covariance_mix_((2 * static_cast<std::size_t>(config_.p) + 3) * config_.dims.m,
                      config_.dims.r, derive_seed(config_.seed, component::kCovarianceSrht)),
      derivative_poly_(2 * static_cast<std::size_t>(config_.p_prime) + 1,
                       static_cast<std::size_t>(filter) * filter * config_.dims.r, config_.dims.n,
                       derive_seed(config_.seed, component::kDerivativePoly), LeafKind::dense,
                       config_.osnap_sparsity),
      derivative_mix_((2 * static_cast<std::size_t>(config_.p_prime) + 2) * config_.dims.n,
                      config_.dims.s, derive_seed(config_.seed, component::kDerivativeSrht)),
      product_poly_(2, config_.dims.s, config_.dims.m2,
                    derive_seed(config_.seed, component::kProductPoly), LeafKind::dense,
                    config_.osnap_sparsity),
      layer_mix_(static_cast<std::size_t>(filter) * filter * (config_.dims.m2 + config_.dims.r),
                 config_.dims.s, derive_seed(config_.seed, component::kMixSrht)),
      gaussian_(config_.dims.s_star, config_.dims.m2,
                derive_seed(config_.seed, component::kGaussian)) {}

std::vector<PixelGrid> CntkSketch::patch_norms(const ImageTensor& x) const {
  if (x.rows() != rows_ || x.cols() != cols_ || x.channels() != channels_) {
    throw DimensionError("CNTK sketch: image shape does not match the sketch");
  }
  return ntksketch::patch_norms(x, filter_, config_.depth);
}

std::vector<double> CntkSketch::transform(const ImageTensor& x) const {
  return run(x, false).features;
}

CntkLayerTrace CntkSketch::transform_traced(const ImageTensor& x) const { return run(x, true); }

CntkLayerTrace CntkSketch::run(const ImageTensor& x, bool keep_trace) const {
  const std::vector<PixelGrid> norms = patch_norms(x);
  const SketchDims& d = config_.dims;
  const int depth = config_.depth;
  const std::size_t pixels = rows_ * cols_;
  const long half = filter_ / 2;
  const std::size_t q = static_cast<std::size_t>(filter_);
  const double qd = static_cast<double>(filter_);
  const std::size_t threads = config_.threads;

  // Neighbour (a, b) of pixel p in row-major window order, or -1 outside the image.
  auto neighbour = [&](std::size_t p, std::size_t k) -> long {
    const long i = static_cast<long>(p / cols_) + static_cast<long>(k / q) - half;
    const long j = static_cast<long>(p % cols_) + static_cast<long>(k % q) - half;
    if (i < 0 || j < 0 || i >= static_cast<long>(rows_) || j >= static_cast<long>(cols_)) return -1;
    return i * static_cast<long>(cols_) + j;
  };

  std::vector<std::vector<double>> phi(pixels, std::vector<double>(d.r));
  detail::parallel_for(pixels, threads, [&](std::size_t begin, std::size_t end, std::size_t) {
    std::vector<double> scratch;
    for (std::size_t p = begin; p < end; ++p) {
      input_srht_.apply(x.pixel(p / cols_, p % cols_), phi[p], scratch);
    }
  });

  CntkLayerTrace trace;
  if (keep_trace) {
    trace.phi.push_back(phi);
    trace.phi_dot.resize(2);
    trace.psi.resize(1);
  }

  const std::size_t eta_dim = d.m2 + d.r;
  std::vector<std::vector<double>> psi;  // empty while psi is identically zero
  std::vector<std::vector<double>> phi_next(pixels);
  std::vector<std::vector<double>> phi_dot(pixels);
  std::vector<std::vector<double>> eta(pixels);

  for (int h = 1; h <= depth; ++h) {
    const PixelGrid& norm = norms[h];
    const bool need_phi = h < depth;
    const bool need_phi_dot = h >= 2;
    const bool last = h == depth;

    detail::parallel_for(pixels, threads, [&](std::size_t begin, std::size_t end, std::size_t) {
      PolySketch::Workspace ws_cov, ws_der, ws_prod;
      std::vector<std::vector<double>> zs(covariance_poly_.degree() + 1);
      std::vector<std::vector<double>> ys(derivative_poly_.degree() + 1);
      std::vector<double> mu(q * q * d.r);
      std::vector<double> cat_cov(covariance_mix_.input_dim());
      std::vector<double> cat_der(derivative_mix_.input_dim());
      std::vector<double> scratch;
      for (std::size_t p = begin; p < end; ++p) {
        const double n = norm.values[p];
        std::fill(mu.begin(), mu.end(), 0.0);
        if (n > 0.0) {
          const double root = std::sqrt(n);
          for (std::size_t k = 0; k < q * q; ++k) {
            const long nb = neighbour(p, k);
            if (nb < 0) continue;
            const std::vector<double>& src = phi[static_cast<std::size_t>(nb)];
            double* dst = mu.data() + k * d.r;
            for (std::size_t t = 0; t < d.r; ++t) dst[t] = src[t] / root;
          }
        }

        if (need_phi) {
          std::vector<double>& out = phi_next[p];
          out.assign(d.r, 0.0);
          if (n > 0.0) {
            covariance_poly_.apply_tensor_power_prefixes(mu, zs, ws_cov);
            weighted_concat(zs, sqrt_c_, cat_cov);
            covariance_mix_.apply(cat_cov, out, scratch);
            const double factor = std::sqrt(n) / qd;
            for (double& v : out) v *= factor;
          }
        }

        if (need_phi_dot) {
          std::vector<double>& out = phi_dot[p];
          out.resize(d.s);
          derivative_poly_.apply_tensor_power_prefixes(mu, ys, ws_der);
          weighted_concat(ys, sqrt_b_, cat_der);
          derivative_mix_.apply(cat_der, out, scratch);
          for (double& v : out) v /= qd;
        }

        std::vector<double>& e = eta[p];
        e.assign(last ? d.m2 : eta_dim, 0.0);
        if (need_phi_dot) {
          const std::span<const double> factors[2] = {psi[p], phi_dot[p]};
          product_poly_.apply_tensor_product(factors, std::span<double>(e).first(d.m2), ws_prod);
        }
        if (!last) std::copy(phi_next[p].begin(), phi_next[p].end(), e.begin() + static_cast<std::ptrdiff_t>(d.m2));
      }
    });

    if (keep_trace) {
      if (need_phi) trace.phi.push_back(phi_next);
      if (need_phi_dot) trace.phi_dot.push_back(phi_dot);
    }

    if (last) {
      psi.swap(eta);
    } else {
      std::vector<std::vector<double>> psi_next(pixels);
      detail::parallel_for(pixels, threads, [&](std::size_t begin, std::size_t end, std::size_t) {
        std::vector<double> cat(layer_mix_.input_dim());
        std::vector<double> scratch;
        for (std::size_t p = begin; p < end; ++p) {
          std::fill(cat.begin(), cat.end(), 0.0);
          for (std::size_t k = 0; k < q * q; ++k) {
            const long nb = neighbour(p, k);
            if (nb < 0) continue;
            const std::vector<double>& src = eta[static_cast<std::size_t>(nb)];
            std::copy(src.begin(), src.end(), cat.begin() + static_cast<std::ptrdiff_t>(k * eta_dim));
          }
          psi_next[p].resize(d.s);
          layer_mix_.apply(cat, psi_next[p], scratch);
        }
      });
      psi.swap(psi_next);
      phi.swap(phi_next);
    }
    if (keep_trace) trace.psi.push_back(psi);
  }

  std::vector<double> pooled(d.m2, 0.0);
  for (std::size_t p = 0; p < pixels; ++p) {
    for (std::size_t t = 0; t < d.m2; ++t) pooled[t] += psi[p][t];
  }
  trace.features.resize(d.s_star);
  gaussian_.apply(pooled, trace.features);
  const double pixel_count = static_cast<double>(pixels);
  for (double& v : trace.features) v /= pixel_count;
  return trace;
}

}  // namespace ntksketch
