#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ntksketch/batch.hpp"
#include "ntksketch/cntk_exact.hpp"
#include "ntksketch/cntk_sketch.hpp"
#include "ntksketch/dataset.hpp"
#include "ntksketch/error.hpp"
#include "ntksketch/feature_matrix.hpp"
#include "ntksketch/labels.hpp"
#include "ntksketch/ntk_sketch.hpp"
#include "ntksketch/poly_approx.hpp"
#include "ntksketch/relu_ntk.hpp"
#include "ntksketch/ridge.hpp"
#include "ntksketch/sketch_config.hpp"

namespace {

using namespace ntksketch;

// Sketch settings given on the command line; unset options keep the config-file value.
struct SketchFlags {
  std::optional<int> depth;
  std::optional<double> eps;
  std::optional<double> delta;
  std::optional<std::string> mode;
  std::optional<int> p;
  std::optional<int> p_prime;
  std::optional<std::string> dims;
  std::optional<std::size_t> threads;
};

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::string config_path;
};

void add_sketch_flags(CLI::App* cmd, SketchFlags& f) {
  cmd->add_option("--depth", f.depth, "network depth L");
  cmd->add_option("--eps", f.eps, "target relative error");
  cmd->add_option("--delta", f.delta, "failure probability");
  cmd->add_option("--mode", f.mode, "taylor, fitted or fitted:<degree>");
  cmd->add_option("--p", f.p, "kappa1 truncation level");
  cmd->add_option("--p-prime", f.p_prime, "kappa0 truncation level");
  cmd->add_option("--dims", f.dims, "dimension overrides, e.g. s=1024,m=2048,s_star=512");
  cmd->add_option("--threads", f.threads, "worker threads");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SketchConfig build_config(const GlobalFlags& g, const SketchFlags& f) {
  SketchConfig c = g.config_path.empty() ? SketchConfig{} : config_from_json(read_file(g.config_path));
  if (g.seed) c.seed = *g.seed;
  if (f.depth) c.depth = *f.depth;
  if (f.eps) c.eps = *f.eps;
  if (f.delta) c.delta = *f.delta;
  if (f.mode) parse_mode(*f.mode, c);
  if (f.p) c.p = *f.p;
  if (f.p_prime) c.p_prime = *f.p_prime;
  if (f.threads) c.threads = *f.threads;
  if (f.dims) {
    const DimOverrides o = parse_dim_overrides(*f.dims);
    auto merge = [](std::optional<std::size_t>& dst, const std::optional<std::size_t>& src) {
      if (src) dst = src;
    };
    merge(c.dims.s, o.s);
    merge(c.dims.n, o.n);
    merge(c.dims.n1, o.n1);
    merge(c.dims.r, o.r);
    merge(c.dims.m, o.m);
    merge(c.dims.m2, o.m2);
    merge(c.dims.s_star, o.s_star);
  }
  return c;
}

std::string labels_path(const std::string& features) { return features + ".labels"; }

void write_labels(const std::string& path, const std::vector<double>& labels) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out.precision(17);
  for (double v : labels) out << v << '\n';
}

std::vector<double> read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("missing labels file " + path);
  std::vector<double> labels;
  double v = 0.0;
  while (in >> v) labels.push_back(v);
  if (!in.eof()) throw FormatError("malformed labels file " + path);
  return labels;
}

Dataset load_input(const std::string& path, const std::string& format) {
  return load_dataset(path, format.empty() ? guess_dataset_format(path) : parse_dataset_format(format));
}

// features ntk|cntk
struct FeaturesArgs {
  SketchFlags sketch;
  std::string input, format, output;
  int filter = 3;
  bool f64 = false;
};

int run_features(const GlobalFlags& g, const FeaturesArgs& a, bool cntk) {
  const SketchConfig config = build_config(g, a.sketch);
  const Dataset data = load_input(a.input, a.format);
  FeatureMatrix f;
  if (cntk) {
    if (data.format != DatasetFormat::image_tensor) {
      throw ParameterError("CNTK features need an image batch");
    }
    const ImageTensor& first = data.images.front();
    const CntkSketch sketch(first.rows(), first.cols(), first.channels(), a.filter, config);
    f = batch_transform(sketch, data, config.threads);
  } else {
    const NtkSketch sketch(data.dim, config);
    f = batch_transform(sketch, data, config.threads);
  }
  f.storage = a.f64 ? StorageType::f64 : StorageType::f32;
  save_features(a.output, f);
  if (data.has_labels()) write_labels(labels_path(a.output), data.labels);
  std::cout << "wrote " << f.rows() << " x " << f.cols() << " features to " << a.output << '\n';
  return 0;
}

// regress
struct RegressArgs {
  std::string train, test, predictions;
  double lambda = lambda_presets::kStrong;
  std::string task = "classify";
};

double mean_squared_error(const DenseMatrix& pred, std::span<const double> truth) {
  double s = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) s += (pred(i, 0) - truth[i]) * (pred(i, 0) - truth[i]);
  return s / static_cast<double>(truth.size());
}

int run_regress(const RegressArgs& a) {
  const FeatureMatrix train = load_features(a.train);
  const FeatureMatrix test = load_features(a.test);
  const auto ytrain = read_labels(labels_path(a.train));
  const auto ytest = read_labels(labels_path(a.test));
  if (ytrain.size() != train.rows() || ytest.size() != test.rows()) {
    throw DimensionError("label count does not match feature rows");
  }
  std::ofstream pred_out;
  if (!a.predictions.empty()) {
    pred_out.open(a.predictions);
    if (!pred_out) throw FormatError("cannot write " + a.predictions);
  }
  if (a.task == "classify") {
    const auto train_ids = to_class_ids(ytrain);
    const auto test_ids = to_class_ids(ytest);
    std::int64_t top = 0;
    for (auto v : train_ids) top = std::max(top, v);
    const std::size_t classes = std::max<std::size_t>(2, static_cast<std::size_t>(top) + 1);
    const DenseMatrix targets = encode_labels(train_ids, classes);
    const RidgeModel model = ridge_fit(train.data, targets, a.lambda);
    const auto predicted = classify(model, test.data);
    std::cout << "classes " << classes << ", lambda " << a.lambda << '\n';
    std::cout << "training loss " << training_loss(model, train.data, targets) << '\n';
    std::cout << "test accuracy " << accuracy(predicted, test_ids) << '\n';
    if (pred_out.is_open()) {
      for (std::size_t c : predicted) pred_out << c << '\n';
    }
  } else if (a.task == "regress") {
    DenseMatrix targets(ytrain.size(), 1);
    for (std::size_t i = 0; i < ytrain.size(); ++i) targets(i, 0) = ytrain[i];
    const RidgeModel model = ridge_fit(train.data, targets, a.lambda);
    const DenseMatrix pred = predict(model, test.data);
    std::cout << "lambda " << a.lambda << '\n';
    std::cout << "training loss " << training_loss(model, train.data, targets) << '\n';
    std::cout << "test mse " << mean_squared_error(pred, ytest) << '\n';
    if (pred_out.is_open()) {
      pred_out.precision(17);
      for (std::size_t i = 0; i < pred.rows; ++i) pred_out << pred(i, 0) << '\n';
    }
  } else {
    throw ParameterError("task must be 'classify' or 'regress'");
  }
  return 0;
}

// kernel exact-ntk|exact-cntk
struct KernelArgs {
  std::string input, against, format, output;
  std::vector<double> y, z;
  int depth = 2;
  int filter = 3;
};

// Sample i flattened to a vector; images are read in (i, j, channel) order.
std::vector<double> as_vector(const Dataset& d, std::size_t i) {
  if (d.format != DatasetFormat::image_tensor) return d.dense_row(i);
  const auto v = d.images[i].values();
  return {v.begin(), v.end()};
}

int run_kernel(const KernelArgs& a, bool cntk) {
  if (!a.y.empty() || !a.z.empty()) {
    if (cntk) throw ParameterError("--y/--z apply to exact-ntk only");
    std::printf("%.17g\n", theta_ntk(a.depth, a.y, a.z));
    return 0;
  }
  if (a.input.empty()) throw ParameterError("give --input or both --y and --z");
  const Dataset left = load_input(a.input, a.format);
  const Dataset right = a.against.empty() ? left : load_input(a.against, a.format);
  std::ofstream file;
  if (!a.output.empty()) {
    file.open(a.output);
    if (!file) throw FormatError("cannot write " + a.output);
  }
  std::ostream& out = a.output.empty() ? std::cout : file;
  out.precision(17);
  for (std::size_t i = 0; i < left.size(); ++i) {
    for (std::size_t j = 0; j < right.size(); ++j) {
      double v = 0.0;
      if (cntk) {
        if (left.format != DatasetFormat::image_tensor || right.format != DatasetFormat::image_tensor) {
          throw ParameterError("exact CNTK needs image batches");
        }
        v = theta_cntk(left.images[i], right.images[j], a.filter, a.depth);
      } else {
        v = theta_ntk(a.depth, as_vector(left, i), as_vector(right, j));
      }
      out << (j ? "," : "") << v;
    }
    out << '\n';
  }
  return 0;
}

// validate poly
struct ValidatePolyArgs {
  std::optional<double> eps;
  int p = 3;
  int p_prime = 16;
  int depth = 3;
  int fitted_degree = 8;
  std::size_t grid = 10000;
};

int run_validate_poly(const ValidatePolyArgs& a) {
  int p = a.p, p_prime = a.p_prime;
  if (a.eps) {
    p = static_cast<int>(kappa1_degree_for_error(*a.eps));
    p_prime = static_cast<int>(kappa0_degree_for_error(*a.eps));
    const DegreeChoice pipeline = choose_degrees(a.depth, *a.eps);
    std::printf("eps %.6g: per-function degrees p=%d p'=%d; depth-%d pipeline degrees p=%lld p'=%lld\n",
                *a.eps, p, p_prime, a.depth, static_cast<long long>(pipeline.p),
                static_cast<long long>(pipeline.p_prime));
  }
  std::printf("%-8s %6s %14s %14s\n", "function", "degree", "sup error", "bound");
  std::printf("%-8s %6d %14.6g %14.6g\n", "kappa1", p, sup_error(taylor_coeffs_kappa1(p), a.grid),
              std::pow(1.0 / (9.0 * std::max(p, 1)), 1.5));
  std::printf("%-8s %6d %14.6g %14.6g\n", "kappa0", p_prime,
              sup_error(taylor_coeffs_kappa0(p_prime), a.grid), 1.0 / std::sqrt(26.0 * std::max(p_prime, 1)));
  const KernelPolynomial fit = fit_ntk_polynomial(a.depth, a.fitted_degree);
  std::printf("%-8s %6d %14.6g %14s\n", "fitted", a.fitted_degree, sup_error(fit, a.grid), "-");
  return 0;
}

// validate sketch
struct ValidateSketchArgs {
  SketchFlags sketch;
  std::string kind = "ntk";
  int pairs = 50;
  std::size_t dim = 64;
  std::size_t rows = 8, cols = 8, channels = 1;
  int filter = 3;
};

int run_validate_sketch(const GlobalFlags& g, const ValidateSketchArgs& a) {
  SketchConfig config = build_config(g, a.sketch);
  const bool cntk = a.kind == "cntk";
  if (!cntk && a.kind != "ntk") throw ParameterError("kind must be 'ntk' or 'cntk'");
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal;
  auto draw = [&](std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = normal(rng);
    return v;
  };
  const std::uint64_t base_seed = config.seed;
  int failures = 0;
  double worst = 0.0;
  for (int t = 0; t < a.pairs; ++t) {
    config.seed = base_seed + static_cast<std::uint64_t>(t) + 1;
    double exact = 0.0, est = 0.0;
    auto inner = [](const std::vector<double>& u, const std::vector<double>& v) {
      double s = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
      return s;
    };
    if (cntk) {
      const ImageTensor y(a.rows, a.cols, a.channels, draw(a.rows * a.cols * a.channels));
      const ImageTensor z(a.rows, a.cols, a.channels, draw(a.rows * a.cols * a.channels));
      const CntkSketch sk(a.rows, a.cols, a.channels, a.filter, config);
      exact = theta_cntk(y, z, a.filter, config.depth);
      est = inner(sk.transform(y), sk.transform(z));
    } else {
      const auto y = draw(a.dim), z = draw(a.dim);
      const NtkSketch sk(a.dim, config);
      exact = theta_ntk(config.depth, y, z);
      est = inner(sk.transform(y), sk.transform(z));
    }
    const double rel = std::abs(est - exact) / std::abs(exact);
    worst = std::max(worst, rel);
    if (rel > config.eps) ++failures;
  }
  std::printf("%s sketch, depth %d, eps %.3g: %d of %d pairs exceed eps (fraction %.3f, worst %.3g)\n",
              cntk ? "CNTK" : "NTK", config.depth, config.eps, failures, a.pairs,
              static_cast<double>(failures) / a.pairs, worst);
  return 0;
}

// plot relu-ntk
struct PlotArgs {
  std::vector<int> depths = {1, 2, 4, 8, 16, 32};
  std::size_t points = 201;
  std::string output;
};

int run_plot(const PlotArgs& a) {
  if (a.points < 2) throw ParameterError("need at least two points");
  std::ofstream file;
  if (!a.output.empty()) {
    file.open(a.output);
    if (!file) throw FormatError("cannot write " + a.output);
  }
  std::ostream& out = a.output.empty() ? std::cout : file;
  out << "alpha";
  for (int d : a.depths) out << ",L" << d;
  out << '\n';
  out.precision(10);
  for (std::size_t k = 0; k < a.points; ++k) {
    const double alpha = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(a.points - 1);
    out << alpha;
    for (int d : a.depths) out << ',' << k_relu(d, alpha) / (d + 1.0);
    out << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketched neural tangent kernel features"};
  app.require_subcommand(1);
  GlobalFlags global;
  app.add_option("--seed", global.seed, "random seed")->configurable(false);
  app.add_option("--config", global.config_path, "JSON sketch configuration")->check(CLI::ExistingFile);

  int status = 0;

  auto* features = app.add_subcommand("features", "transform a dataset into sketched features");
  features->require_subcommand(1);
  FeaturesArgs feat_args;
  for (const char* kind : {"ntk", "cntk"}) {
    auto* cmd = features->add_subcommand(kind, std::string(kind) == "ntk" ? "NTK features" : "CNTK features");
    add_sketch_flags(cmd, feat_args.sketch);
    cmd->add_option("--input,-i", feat_args.input, "dataset file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--format", feat_args.format, "csv, libsvm or images (default: from extension)");
    cmd->add_option("--output,-o", feat_args.output, "feature file")->required();
    cmd->add_flag("--f64", feat_args.f64, "store features in double precision");
    if (std::string(kind) == "cntk") cmd->add_option("--filter", feat_args.filter, "filter size q");
    const bool cntk = std::string(kind) == "cntk";
    cmd->callback([&, cntk] { status = run_features(global, feat_args, cntk); });
  }

  auto* regress = app.add_subcommand("regress", "ridge regression on feature files");
  RegressArgs reg_args;
  regress->add_option("--train", reg_args.train, "training features")->required()->check(CLI::ExistingFile);
  regress->add_option("--test", reg_args.test, "test features")->required()->check(CLI::ExistingFile);
  regress->add_option("--lambda", reg_args.lambda, "regularizer")->check(CLI::NonNegativeNumber);
  regress->add_option("--task", reg_args.task, "classify or regress");
  regress->add_option("--predictions", reg_args.predictions, "write test predictions here");
  regress->callback([&] { status = run_regress(reg_args); });

  auto* kernel = app.add_subcommand("kernel", "exact kernel matrices");
  kernel->require_subcommand(1);
  KernelArgs ker_args;
  for (const char* kind : {"exact-ntk", "exact-cntk"}) {
    const bool cntk = std::string(kind) == "exact-cntk";
    auto* cmd = kernel->add_subcommand(kind, cntk ? "exact CNTK with GAP" : "exact ReLU NTK");
    auto* input = cmd->add_option("--input,-i", ker_args.input, "dataset file")->check(CLI::ExistingFile);
    if (!cntk) {
      auto* y = cmd->add_option("--y", ker_args.y, "first vector, comma separated")->delimiter(',');
      auto* z = cmd->add_option("--z", ker_args.z, "second vector, comma separated")->delimiter(',');
      y->needs(z)->excludes(input);
      z->needs(y)->excludes(input);
    }
    cmd->add_option("--against", ker_args.against, "second dataset (default: input)");
    cmd->add_option("--format", ker_args.format, "csv, libsvm or images");
    cmd->add_option("--depth", ker_args.depth, "network depth L");
    cmd->add_option("--output,-o", ker_args.output, "CSV output (default: stdout)");
    if (cntk) cmd->add_option("--filter", ker_args.filter, "filter size q");
    cmd->callback([&, cntk] { status = run_kernel(ker_args, cntk); });
  }

  auto* validate = app.add_subcommand("validate", "numerical self-checks");
  validate->require_subcommand(1);
  ValidatePolyArgs poly_args;
  auto* vpoly = validate->add_subcommand("poly", "polynomial approximation errors");
  vpoly->add_option("--eps", poly_args.eps, "derive both truncation levels from this error target");
  vpoly->add_option("--p", poly_args.p, "kappa1 truncation level");
  vpoly->add_option("--p-prime", poly_args.p_prime, "kappa0 truncation level");
  vpoly->add_option("--depth", poly_args.depth, "depth for the fitted polynomial");
  vpoly->add_option("--fitted-degree", poly_args.fitted_degree, "fitted polynomial degree");
  vpoly->add_option("--grid", poly_args.grid, "evaluation grid size");
  vpoly->callback([&] { status = run_validate_poly(poly_args); });
  ValidateSketchArgs vs_args;
  auto* vsketch = validate->add_subcommand("sketch", "sketched vs exact kernel on random inputs");
  add_sketch_flags(vsketch, vs_args.sketch);
  vsketch->add_option("--kind", vs_args.kind, "ntk or cntk");
  vsketch->add_option("--pairs", vs_args.pairs, "number of random pairs");
  vsketch->add_option("--dim", vs_args.dim, "vector dimension (ntk)");
  vsketch->add_option("--rows", vs_args.rows, "image rows (cntk)");
  vsketch->add_option("--cols", vs_args.cols, "image columns (cntk)");
  vsketch->add_option("--channels", vs_args.channels, "image channels (cntk)");
  vsketch->add_option("--filter", vs_args.filter, "filter size q (cntk)");
  vsketch->callback([&] { status = run_validate_sketch(global, vs_args); });

  auto* plot = app.add_subcommand("plot", "curves as CSV");
  plot->require_subcommand(1);
  PlotArgs plot_args;
  auto* prelu = plot->add_subcommand("relu-ntk", "normalized ReLU NTK K(alpha)/(L+1)");
  prelu->add_option("--depths", plot_args.depths, "depths to tabulate")->delimiter(',');
  prelu->add_option("--points", plot_args.points, "grid points on [-1, 1]");
  prelu->add_option("--output,-o", plot_args.output, "CSV output (default: stdout)");
  prelu->callback([&] { status = run_plot(plot_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ntksketch::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return status;
}
