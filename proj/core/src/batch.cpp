#include "ntksketch/batch.hpp"

#include <exception>
#include <json.hpp>
#include <limits>
#include <mutex>
#include <string>

#include "ntksketch/error.hpp"
#include "parallel.hpp"

namespace ntksketch {

namespace {

std::string provenance(const char* kind, const ResolvedConfig& config, nlohmann::json extra) {
  nlohmann::json j{{"kind", kind},
                   {"config", nlohmann::json::parse(to_json(config))},
                   {"config_hash", config_hash(config)},
                   {"seed", config.seed}};
  j.update(extra);
  return j.dump();
}

template <typename Transform>
DenseMatrix run_batch(std::size_t count, std::size_t cols, std::size_t threads, Transform&& fn) {
  if (threads == 0) throw ParameterError("threads must be at least 1");
  DenseMatrix out(count, cols);
  std::mutex mutex;
  std::size_t failed = std::numeric_limits<std::size_t>::max();
  std::exception_ptr cause;
  detail::parallel_for(count, threads, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        const std::vector<double> row = fn(i);
        std::copy(row.begin(), row.end(), out.row(i).begin());
      } catch (...) {
        std::lock_guard lock(mutex);
        if (i < failed) {
          failed = i;
          cause = std::current_exception();
        }
        return;
      }
    }
  });
  if (cause) {
    std::string what = "unknown error";
    try {
      std::rethrow_exception(cause);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    throw BatchError(failed, what, cause);
  }
  return out;
}

}  // namespace

FeatureMatrix batch_transform(const NtkSketch& sketch, std::span<const std::vector<double>> rows,
                              std::size_t threads) {
  FeatureMatrix f;
  f.data = run_batch(rows.size(), sketch.output_dim(), threads,
                     [&](std::size_t i) { return sketch.transform(rows[i]); });
  f.provenance = provenance("ntk", sketch.config(), {{"input_dim", sketch.input_dim()}});
  return f;
}

FeatureMatrix batch_transform(const NtkSketch& sketch, std::span<const SparseVector> rows,
                              std::size_t threads) {
  FeatureMatrix f;
  f.data = run_batch(rows.size(), sketch.output_dim(), threads,
                     [&](std::size_t i) { return sketch.transform(rows[i]); });
  f.provenance = provenance("ntk", sketch.config(), {{"input_dim", sketch.input_dim()}});
  return f;
}

FeatureMatrix batch_transform(const CntkSketch& sketch, std::span<const ImageTensor> images,
                              std::size_t threads) {
  FeatureMatrix f;
  f.data = run_batch(images.size(), sketch.output_dim(), threads,
                     [&](std::size_t i) { return sketch.transform(images[i]); });
  f.provenance = provenance(
      "cntk", sketch.config(),
      {{"image_shape", {sketch.rows(), sketch.cols(), sketch.channels()}}, {"filter", sketch.filter()}});
  return f;
}

FeatureMatrix batch_transform(const NtkSketch& sketch, const Dataset& data, std::size_t threads) {
  switch (data.format) {
    case DatasetFormat::csv: return batch_transform(sketch, std::span(data.dense_rows), threads);
    case DatasetFormat::libsvm: return batch_transform(sketch, std::span(data.sparse_rows), threads);
    case DatasetFormat::image_tensor: {
      std::vector<std::vector<double>> rows;
      rows.reserve(data.images.size());
      for (const auto& img : data.images) rows.emplace_back(img.values().begin(), img.values().end());
      return batch_transform(sketch, std::span<const std::vector<double>>(rows), threads);
    }
  }
  throw ParameterError("unknown dataset format");
}

FeatureMatrix batch_transform(const CntkSketch& sketch, const Dataset& data, std::size_t threads) {
  if (data.format != DatasetFormat::image_tensor) {
    throw ParameterError("CNTK features need an image dataset");
  }
  return batch_transform(sketch, std::span(data.images), threads);
}

}  // namespace ntksketch
