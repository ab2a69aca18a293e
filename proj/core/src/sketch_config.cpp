#include "ntksketch/sketch_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <json.hpp>
#include <string>

#include "ntksketch/error.hpp"
#include "ntksketch/poly_approx.hpp"

namespace ntksketch {

namespace {

using nlohmann::json;

std::size_t clamp_dim(double v) {
  if (!std::isfinite(v) || v > static_cast<double>(kMaxDefaultDim)) return kMaxDefaultDim;
  return std::clamp(static_cast<std::size_t>(std::ceil(v)), kMinDefaultDim, kMaxDefaultDim);
}

std::size_t pick(const std::optional<std::size_t>& override, double formula, const char* name) {
  if (override) {
    if (*override < 1) throw ParameterError(std::string("dimension ") + name + " must be >= 1");
    return *override;
  }
  return clamp_dim(formula);
}

const char* mode_name(PolyMode mode) { return mode == PolyMode::taylor ? "taylor" : "fitted"; }

json dims_json(const SketchDims& d) {
  return json{{"s", d.s},   {"n", d.n},   {"n1", d.n1},        {"r", d.r},
              {"m", d.m},   {"m2", d.m2}, {"s_star", d.s_star}};
}

}  // namespace

ResolvedConfig resolve_config(const SketchConfig& c, FeatureKind kind, std::size_t pixels) {
  if (!(c.eps > 0.0 && c.eps < 1.0)) throw ParameterError("eps must lie in (0, 1)");
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
  if (c.depth < 0) throw ParameterError("depth must be non-negative");
  if (c.p && *c.p < 0) throw ParameterError("p must be non-negative");
  if (c.p_prime && *c.p_prime < 0) throw ParameterError("p' must be non-negative");
  if (c.fitted_degree < 1) throw ParameterError("fitted degree must be at least 1");
  if (c.degree_cap < 0) throw ParameterError("degree cap must be non-negative");
  if (c.osnap_sparsity < 1) throw ParameterError("OSNAP sparsity must be at least 1");
  if (c.fit_grid < 2) throw ParameterError("fit grid needs at least two points");
  if (c.threads < 1) throw ParameterError("threads must be at least 1");
  if (pixels < 1) throw ParameterError("pixel count must be positive");
  const double log_scale = kind == FeatureKind::cntk ? static_cast<double>(pixels) : 1.0;

  ResolvedConfig out;
  out.eps = c.eps;
  out.delta = c.delta;
  out.depth = c.depth;
  out.seed = c.seed;
  out.mode = c.mode;
  out.fitted_degree = c.fitted_degree;
  out.osnap_sparsity = c.osnap_sparsity;
  out.fit_grid = c.fit_grid;
  out.threads = c.threads;

  if (c.mode == PolyMode::taylor) {
    std::int64_t p = 0, pp = 0;
    bool auto_too_big = false;
    if (c.depth == 0) {
      // Depth 0 is the linear kernel; no polynomial stage runs.
    } else if (!c.p || !c.p_prime) {
      try {
        const DegreeChoice choice = choose_degrees(c.depth, c.eps);
        p = choice.p;
        pp = choice.p_prime;
      } catch (const ParameterError&) {
        auto_too_big = true;
      }
    }
    if (c.p) p = *c.p;
    if (c.p_prime) pp = *c.p_prime;
    if (auto_too_big || (!c.p && p > c.degree_cap) || (!c.p_prime && pp > c.degree_cap)) {
      out.mode = PolyMode::fitted;
      out.fell_back_to_fitted = true;
    } else {
      out.p = static_cast<int>(p);
      out.p_prime = static_cast<int>(pp);
    }
  }

  const double l = std::max(c.depth, 1);
  const double lg = std::max(1.0, std::log(log_scale * l / (c.eps * c.delta)));
  const double e2 = c.eps * c.eps;
  const double e4 = e2 * e2;
  out.dims.s = pick(c.dims.s, l * l / e2 * lg * lg, "s");
  out.dims.n = pick(c.dims.n, kind == FeatureKind::cntk ? std::pow(l, 4) / e4 * lg * lg * lg
                                              : std::pow(l, 6) / e4 * lg * lg * lg,
                    "n");
  out.dims.n1 = pick(c.dims.n1, std::pow(l, 4) / e4 * lg * lg * lg, "n1");
  out.dims.r = pick(c.dims.r, std::pow(l, 6) / e4 * lg * lg, "r");
  out.dims.m = pick(c.dims.m, std::pow(l, 8) / std::pow(c.eps, 16.0 / 3.0) * lg * lg * lg, "m");
  out.dims.m2 = pick(c.dims.m2, l * l / e2 * lg * lg * lg, "m2");
  out.dims.s_star = pick(c.dims.s_star, std::log(1.0 / c.delta) / e2, "s_star");
  return out;
}

std::string to_json(const ResolvedConfig& c) {
  json j{{"eps", c.eps},
         {"delta", c.delta},
         {"depth", c.depth},
         {"mode", mode_name(c.mode)},
         {"dims", dims_json(c.dims)},
         {"seed", c.seed},
         {"osnap_sparsity", c.osnap_sparsity}};
  if (c.mode == PolyMode::taylor) {
    j["p"] = c.p;
    j["p_prime"] = c.p_prime;
  } else {
    j["fitted_degree"] = c.fitted_degree;
    j["fit_grid"] = c.fit_grid;
  }
  return j.dump();
}

std::string to_json(const SketchConfig& c) {
  json j{{"eps", c.eps},
         {"delta", c.delta},
         {"depth", c.depth},
         {"seed", c.seed},
         {"mode", mode_name(c.mode)},
         {"fitted_degree", c.fitted_degree},
         {"degree_cap", c.degree_cap},
         {"osnap_sparsity", c.osnap_sparsity},
         {"fit_grid", c.fit_grid},
         {"threads", c.threads}};
  if (c.p) j["p"] = *c.p;
  if (c.p_prime) j["p_prime"] = *c.p_prime;
  json dims = json::object();
  auto put = [&](const char* k, const std::optional<std::size_t>& v) {
    if (v) dims[k] = *v;
  };
  put("s", c.dims.s);
  put("n", c.dims.n);
  put("n1", c.dims.n1);
  put("r", c.dims.r);
  put("m", c.dims.m);
  put("m2", c.dims.m2);
  put("s_star", c.dims.s_star);
  if (!dims.empty()) j["dims"] = dims;
  return j.dump(2);
}

SketchConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("config: top level must be an object");
  SketchConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "eps") c.eps = value.get<double>();
      else if (key == "delta") c.delta = value.get<double>();
      else if (key == "depth") c.depth = value.get<int>();
      else if (key == "p") c.p = value.get<int>();
      else if (key == "p_prime") c.p_prime = value.get<int>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "mode") parse_mode(value.get<std::string>(), c);
      else if (key == "fitted_degree") c.fitted_degree = value.get<int>();
      else if (key == "degree_cap") c.degree_cap = value.get<int>();
      else if (key == "osnap_sparsity") c.osnap_sparsity = value.get<std::size_t>();
      else if (key == "fit_grid") c.fit_grid = value.get<std::size_t>();
      else if (key == "threads") c.threads = value.get<std::size_t>();
      else if (key == "dims") {
        if (!value.is_object()) throw FormatError("config: dims must be an object");
        for (const auto& [dk, dv] : value.items()) {
          const std::size_t v = dv.get<std::size_t>();
          if (dk == "s") c.dims.s = v;
          else if (dk == "n") c.dims.n = v;
          else if (dk == "n1") c.dims.n1 = v;
          else if (dk == "r") c.dims.r = v;
          else if (dk == "m") c.dims.m = v;
          else if (dk == "m2") c.dims.m2 = v;
          else if (dk == "s_star") c.dims.s_star = v;
          else throw FormatError("config: unknown dimension '" + dk + "'");
        }
      } else {
        throw FormatError("config: unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  } catch (const ParameterError& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  return c;
}

DimOverrides parse_dim_overrides(std::string_view text) {
  DimOverrides out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw ParameterError("dimension override '" + std::string(item) + "' lacks '='");
    }
    const std::string_view key = item.substr(0, eq);
    const std::string_view val = item.substr(eq + 1);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
    if (ec != std::errc{} || ptr != val.data() + val.size()) {
      throw ParameterError("bad value in dimension override '" + std::string(item) + "'");
    }
    if (key == "s") out.s = v;
    else if (key == "n") out.n = v;
    else if (key == "n1") out.n1 = v;
    else if (key == "r") out.r = v;
    else if (key == "m") out.m = v;
    else if (key == "m2") out.m2 = v;
    else if (key == "s_star" || key == "s*") out.s_star = v;
    else throw ParameterError("unknown dimension '" + std::string(key) + "'");
  }
  return out;
}

void parse_mode(std::string_view text, SketchConfig& config) {
  if (text == "taylor") {
    config.mode = PolyMode::taylor;
    return;
  }
  if (text.starts_with("fitted")) {
    config.mode = PolyMode::fitted;
    std::string_view rest = text.substr(6);
    if (rest.empty()) return;
    if (rest.front() == ':') {
      rest.remove_prefix(1);
      int degree = 0;
      const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), degree);
      if (ec == std::errc{} && ptr == rest.data() + rest.size() && degree >= 1) {
        config.fitted_degree = degree;
        return;
      }
    }
  }
  throw ParameterError("mode must be 'taylor', 'fitted' or 'fitted:<degree>', got '" +
                       std::string(text) + "'");
}

std::uint64_t config_hash(const ResolvedConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace ntksketch
