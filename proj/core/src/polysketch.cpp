#include "ntksketch/polysketch.hpp"

#include <algorithm>
#include <string>

#include "ntksketch/error.hpp"
#include "ntksketch/fwht.hpp"
#include "ntksketch/random.hpp"

namespace ntksketch {

struct PolySketch::LeafInput {
  enum class Kind { basis, dense, sparse };
  Kind kind = Kind::basis;
  std::span<const double> dense;
  const SparseVector* sparse = nullptr;
};

PolySketch::~PolySketch() = default;

PolySketch::PolySketch(std::size_t degree, std::size_t input_dim, std::size_t output_dim,
                       std::uint64_t seed, LeafKind leaves, std::size_t osnap_sparsity)
    : degree_(degree),
      padded_degree_(next_power_of_two(degree)),
      input_dim_(input_dim),
      output_dim_(output_dim),
      seed_(seed),
      leaf_kind_(degree == 1 ? LeafKind::sparse : leaves) {
  if (degree == 0) throw ParameterError("PolySketch degree must be at least 1");
  if (input_dim == 0 || output_dim == 0) {
    throw ParameterError("PolySketch dimensions must be positive");
  }

  if (leaf_kind_ == LeafKind::sparse) {
    leaf_sketches_.reserve(padded_degree_);
    for (std::size_t leaf = 0; leaf < padded_degree_; ++leaf) {
      leaf_sketches_.emplace_back(input_dim, output_dim, derive_seed(seed, 2 * leaf + 1),
                                  osnap_sparsity);
    }
  }

  level_offsets_.push_back(0);
  std::size_t level_size = padded_degree_;
  std::size_t offset = padded_degree_;
  std::size_t child_dim = leaf_output_dim();
  std::size_t node_id = 0;
  while (level_size > 1) {
    level_offsets_.push_back(offset);
    level_size /= 2;
    for (std::size_t k = 0; k < level_size; ++k, ++node_id) {
      nodes_.emplace_back(child_dim, child_dim, output_dim, derive_seed(seed, 2 * node_id + 2));
    }
    offset += level_size;
    child_dim = output_dim;
  }
  level_offsets_.push_back(offset);  // sentinel: one past the root

  precompute_basis();
}

std::size_t PolySketch::leaf_output_dim() const noexcept {
  return leaf_kind_ == LeafKind::sparse ? output_dim_ : input_dim_;
}

std::size_t PolySketch::level_of(std::size_t vertex) const noexcept {
  std::size_t level = 0;
  while (vertex >= level_offsets_[level + 1]) ++level;
  return level;
}

std::size_t PolySketch::parent_of(std::size_t vertex) const noexcept {
  const std::size_t level = level_of(vertex);
  return level_offsets_[level + 1] + (vertex - level_offsets_[level]) / 2;
}

std::size_t PolySketch::left_child_of(std::size_t vertex) const noexcept {
  const std::size_t level = level_of(vertex);
  return level_offsets_[level - 1] + 2 * (vertex - level_offsets_[level]);
}

bool PolySketch::is_left_child(std::size_t vertex) const noexcept {
  return (vertex - level_offsets_[level_of(vertex)]) % 2 == 0;
}

std::size_t PolySketch::spread_dim(std::size_t vertex) const noexcept {
  if (vertex + 1 >= vertex_count()) return 0;  // root
  const TensorSrhtSketch& parent = nodes_[parent_of(vertex) - padded_degree_];
  return is_left_child(vertex) ? parent.left_padded_dim() : parent.right_padded_dim();
}

void PolySketch::precompute_basis() {
  const std::size_t vertices = vertex_count();
  basis_spread_.assign(vertices, {});
  std::vector<std::vector<double>> values(vertices);

  for (std::size_t v = 0; v < vertices; ++v) {
    const bool is_leaf = v < padded_degree_;
    const bool is_root = v + 1 == vertices;
    std::vector<double>& value = values[v];
    if (is_leaf) {
      if (leaf_kind_ == LeafKind::sparse) {
        value.assign(output_dim_, 0.0);
        leaf_sketches_[v].apply_basis(value);
      }
    } else {
      const std::size_t node = v - padded_degree_;
      const std::size_t lchild = left_child_of(v);
      value.assign(output_dim_, 0.0);
      nodes_[node].combine(basis_spread_[lchild], basis_spread_[lchild + 1], value);
    }
    if (is_root) {
      basis_root_ = value;
      continue;
    }
    const TensorSrhtSketch& parent = nodes_[parent_of(v) - padded_degree_];
    const bool left_side = is_left_child(v);
    std::vector<double>& spread = basis_spread_[v];
    spread.assign(left_side ? parent.left_padded_dim() : parent.right_padded_dim(), 0.0);
    if (is_leaf && leaf_kind_ == LeafKind::dense) {
      if (left_side) {
        parent.spread_left_basis(spread);
      } else {
        parent.spread_right_basis(spread);
      }
    } else if (left_side) {
      parent.spread_left(value, spread);
    } else {
      parent.spread_right(value, spread);
    }
  }
}

void PolySketch::prepare(Workspace& ws) const {
  const std::size_t vertices = vertex_count();
  if (ws.spread.size() != vertices) {
    ws.spread.assign(vertices, {});
    for (std::size_t v = 0; v < vertices; ++v) ws.spread[v].resize(spread_dim(v));
    ws.outputs.assign(nodes_.size(), std::vector<double>(output_dim_));
    ws.spread_ptr.assign(vertices, nullptr);
    ws.all_basis.assign(vertices, 1);
  } else {
    // A workspace last used by a different tree of the same shape.
    for (std::size_t v = 0; v < vertices; ++v) {
      if (ws.spread[v].size() != spread_dim(v)) ws.spread[v].resize(spread_dim(v));
    }
    for (auto& o : ws.outputs) o.resize(output_dim_);
  }
  ws.leaf_buffer.resize(leaf_kind_ == LeafKind::sparse ? output_dim_ : 0);
}

void PolySketch::refresh_vertex(std::size_t v, std::span<const LeafInput> leaves,
                                Workspace& ws) const {
  const bool is_leaf = v < padded_degree_;
  const bool is_root = v + 1 == vertex_count();

  if (is_leaf) {
    const LeafInput& in = leaves[v];
    if (in.kind == LeafInput::Kind::basis) {
      ws.all_basis[v] = 1;
      ws.spread_ptr[v] = is_root ? nullptr : basis_spread_[v].data();
      return;
    }
    ws.all_basis[v] = 0;
    std::span<const double> value = in.dense;
    if (leaf_kind_ == LeafKind::sparse) {
      if (in.kind == LeafInput::Kind::sparse) {
        leaf_sketches_[v].apply(*in.sparse, ws.leaf_buffer);
      } else {
        leaf_sketches_[v].apply(in.dense, ws.leaf_buffer);
      }
      value = ws.leaf_buffer;
    } else if (in.kind == LeafInput::Kind::sparse) {
      // Dense leaves never see sparse inputs; the public API densifies first.
      throw DimensionError("PolySketch: sparse input on a dense-leaf tree");
    }
    if (is_root) return;  // degree 1: the leaf output is the result, kept in leaf_buffer
    const TensorSrhtSketch& parent = nodes_[parent_of(v) - padded_degree_];
    if (is_left_child(v)) {
      parent.spread_left(value, ws.spread[v]);
    } else {
      parent.spread_right(value, ws.spread[v]);
    }
    ws.spread_ptr[v] = ws.spread[v].data();
    return;
  }

  const std::size_t lchild = left_child_of(v);
  const std::size_t rchild = lchild + 1;
  if (ws.all_basis[lchild] && ws.all_basis[rchild]) {
    ws.all_basis[v] = 1;
    ws.spread_ptr[v] = is_root ? nullptr : basis_spread_[v].data();
    return;
  }
  ws.all_basis[v] = 0;
  const std::size_t node = v - padded_degree_;
  const TensorSrhtSketch& sketch = nodes_[node];
  std::vector<double>& out = ws.outputs[node];
  sketch.combine(std::span<const double>(ws.spread_ptr[lchild], sketch.left_padded_dim()),
                 std::span<const double>(ws.spread_ptr[rchild], sketch.right_padded_dim()), out);
  if (is_root) return;
  const TensorSrhtSketch& parent = nodes_[parent_of(v) - padded_degree_];
  if (is_left_child(v)) {
    parent.spread_left(out, ws.spread[v]);
  } else {
    parent.spread_right(out, ws.spread[v]);
  }
  ws.spread_ptr[v] = ws.spread[v].data();
}

void PolySketch::evaluate_all(std::span<const LeafInput> leaves, Workspace& ws) const {
  for (std::size_t v = 0; v < vertex_count(); ++v) refresh_vertex(v, leaves, ws);
}

void PolySketch::update_path(std::size_t leaf, std::span<const LeafInput> leaves,
                             Workspace& ws) const {
  std::size_t v = leaf;
  refresh_vertex(v, leaves, ws);
  while (v + 1 < vertex_count()) {
    v = parent_of(v);
    refresh_vertex(v, leaves, ws);
  }
}

std::span<const double> PolySketch::root_output(const Workspace& ws) const {
  const std::size_t root = vertex_count() - 1;
  if (ws.all_basis[root]) return basis_root_;
  if (nodes_.empty()) return ws.leaf_buffer;
  return ws.outputs.back();
}

void PolySketch::prefixes_impl(std::span<LeafInput> leaves, std::span<std::vector<double>> out,
                               Workspace& ws) const {
  if (out.size() != degree_ + 1) {
    throw DimensionError("PolySketch prefixes: output must hold degree+1 vectors");
  }
  prepare(ws);
  evaluate_all(leaves, ws);
  auto emit = [&](std::size_t j) {
    const auto root = root_output(ws);
    out[j].assign(root.begin(), root.end());
  };
  emit(0);
  for (std::size_t j = 1; j <= degree_; ++j) {
    const std::size_t leaf = degree_ - j;
    leaves[leaf] = LeafInput{};
    update_path(leaf, leaves, ws);
    emit(j);
  }
}

void PolySketch::apply_tensor_power_prefixes(std::span<const double> x,
                                             std::span<std::vector<double>> out,
                                             Workspace& ws) const {
  if (x.size() != input_dim_) {
    throw DimensionError("PolySketch: expected dimension " + std::to_string(input_dim_) +
                         ", got " + std::to_string(x.size()));
  }
  std::vector<LeafInput> leaves(padded_degree_);
  for (std::size_t i = 0; i < degree_; ++i) {
    leaves[i].kind = LeafInput::Kind::dense;
    leaves[i].dense = x;
  }
  prefixes_impl(leaves, out, ws);
}

std::vector<std::vector<double>> PolySketch::apply_tensor_power_prefixes(
    std::span<const double> x) const {
  std::vector<std::vector<double>> out(degree_ + 1);
  Workspace ws;
  apply_tensor_power_prefixes(x, out, ws);
  return out;
}

std::vector<std::vector<double>> PolySketch::apply_tensor_power_prefixes(
    const SparseVector& x) const {
  if (x.dim != input_dim_) {
    throw DimensionError("PolySketch: expected dimension " + std::to_string(input_dim_) +
                         ", got " + std::to_string(x.dim));
  }
  std::vector<std::vector<double>> out(degree_ + 1);
  Workspace ws;
  std::vector<LeafInput> leaves(padded_degree_);
  std::vector<double> dense;
  if (leaf_kind_ == LeafKind::dense) {
    dense.assign(input_dim_, 0.0);
    for (std::size_t k = 0; k < x.nnz(); ++k) {
      if (x.indices[k] >= input_dim_) throw DimensionError("SparseVector index out of range");
      dense[x.indices[k]] += x.values[k];
    }
  }
  for (std::size_t i = 0; i < degree_; ++i) {
    if (leaf_kind_ == LeafKind::dense) {
      leaves[i].kind = LeafInput::Kind::dense;
      leaves[i].dense = dense;
    } else {
      leaves[i].kind = LeafInput::Kind::sparse;
      leaves[i].sparse = &x;
    }
  }
  prefixes_impl(leaves, out, ws);
  return out;
}

void PolySketch::apply_tensor_product(std::span<const std::span<const double>> factors,
                                      std::span<double> out, Workspace& ws) const {
  if (factors.size() != degree_) {
    throw DimensionError("PolySketch: expected " + std::to_string(degree_) + " factors, got " +
                         std::to_string(factors.size()));
  }
  if (out.size() != output_dim_) throw DimensionError("PolySketch: bad output size");
  std::vector<LeafInput> leaves(padded_degree_);
  for (std::size_t i = 0; i < degree_; ++i) {
    if (factors[i].size() != input_dim_) {
      throw DimensionError("PolySketch: factor " + std::to_string(i) + " has dimension " +
                           std::to_string(factors[i].size()) + ", expected " +
                           std::to_string(input_dim_));
    }
    leaves[i].kind = LeafInput::Kind::dense;
    leaves[i].dense = factors[i];
  }
  prepare(ws);
  evaluate_all(leaves, ws);
  const auto root = root_output(ws);
  std::copy(root.begin(), root.end(), out.begin());
}

std::vector<double> PolySketch::apply_tensor_product(
    std::span<const std::span<const double>> factors) const {
  std::vector<double> out(output_dim_);
  Workspace ws;
  apply_tensor_product(factors, out, ws);
  return out;
}

}  // namespace ntksketch
