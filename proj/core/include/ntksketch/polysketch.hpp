#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ntksketch/osnap.hpp"
#include "ntksketch/srht.hpp"

namespace ntksketch {

enum class LeafKind {
  /// OSNAP at every leaf: cost proportional to nnz of the input.
  sparse,
  /// Leaves are the identity and the bottom TensorSRHT layer reads the input directly.
  /// Cheaper for dense inputs. Degree 1 trees always use an OSNAP leaf.
  dense,
};

/// Degree-p PolySketch: a sketch of d^p-dimensional tensors built as a complete binary tree with
/// q = next_pow2(p) leaves and q-1 TensorSRHT internal nodes, all nodes emitting `output_dim`
/// values. Degrees that are not a power of two are padded with e_1 factors, which leaves every
/// tensor inner product unchanged.
///
/// Immutable after construction. Apply calls are const and thread-safe; a Workspace holds the
/// per-call buffers and may be reused across calls on one thread.
class PolySketch {
 public:
  class Workspace;

  PolySketch(std::size_t degree, std::size_t input_dim, std::size_t output_dim, std::uint64_t seed,
             LeafKind leaves = LeafKind::sparse,
             std::size_t osnap_sparsity = OsnapSketch::kDefaultSparsity);

  PolySketch(PolySketch&&) noexcept = default;
  PolySketch& operator=(PolySketch&&) noexcept = default;
  PolySketch(const PolySketch&) = default;
  PolySketch& operator=(const PolySketch&) = default;
  ~PolySketch();

  std::size_t degree() const noexcept { return degree_; }
  std::size_t padded_degree() const noexcept { return padded_degree_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t output_dim() const noexcept { return output_dim_; }
  std::size_t leaf_count() const noexcept { return padded_degree_; }
  std::size_t internal_node_count() const noexcept { return nodes_.size(); }
  LeafKind leaf_kind() const noexcept { return leaf_kind_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Entry j (j = 0..p) is Q(x^{(x)(p-j)} (x) e_1^{(x)j}). The full tree is evaluated once and
  /// each further entry swaps one more leaf (right to left) for e_1 and re-evaluates only the
  /// path from that leaf to the root.
  std::vector<std::vector<double>> apply_tensor_power_prefixes(std::span<const double> x) const;
  std::vector<std::vector<double>> apply_tensor_power_prefixes(const SparseVector& x) const;
  /// Workspace form. `out` must hold p+1 vectors; each is resized to output_dim().
  void apply_tensor_power_prefixes(std::span<const double> x, std::span<std::vector<double>> out,
                                   Workspace& ws) const;

  /// Q(v_1 (x) ... (x) v_p); exactly p factors of dimension input_dim().
  std::vector<double> apply_tensor_product(std::span<const std::span<const double>> factors) const;
  void apply_tensor_product(std::span<const std::span<const double>> factors,
                            std::span<double> out, Workspace& ws) const;

 private:
  struct LeafInput;

  std::size_t vertex_count() const noexcept { return padded_degree_ + nodes_.size(); }
  std::size_t level_of(std::size_t vertex) const noexcept;
  std::size_t parent_of(std::size_t vertex) const noexcept;
  std::size_t left_child_of(std::size_t vertex) const noexcept;
  bool is_left_child(std::size_t vertex) const noexcept;
  std::size_t leaf_output_dim() const noexcept;
  std::size_t spread_dim(std::size_t vertex) const noexcept;

  void evaluate_all(std::span<const LeafInput> leaves, Workspace& ws) const;
  void update_path(std::size_t leaf, std::span<const LeafInput> leaves, Workspace& ws) const;
  void refresh_vertex(std::size_t vertex, std::span<const LeafInput> leaves, Workspace& ws) const;
  void prefixes_impl(std::span<LeafInput> leaves, std::span<std::vector<double>> out,
                     Workspace& ws) const;
  std::span<const double> root_output(const Workspace& ws) const;
  void precompute_basis();
  void prepare(Workspace& ws) const;

  std::size_t degree_;
  std::size_t padded_degree_;
  std::size_t input_dim_;
  std::size_t output_dim_;
  std::uint64_t seed_;
  LeafKind leaf_kind_;
  std::vector<OsnapSketch> leaf_sketches_;   // empty for dense leaves (degree > 1)
  std::vector<TensorSrhtSketch> nodes_;      // level order, bottom level first
  std::vector<std::size_t> level_offsets_;   // first vertex index of each level (0 = leaves)

  // Values of each vertex when its whole subtree holds e_1 leaves, already spread by the
  // parent's sign diagonal (empty for the root), plus the root's all-e_1 output.
  std::vector<std::vector<double>> basis_spread_;
  std::vector<double> basis_root_;
};

class PolySketch::Workspace {
 public:
  Workspace() = default;

 private:
  friend class PolySketch;
  std::vector<std::vector<double>> spread;   // per vertex, parent-side transform
  std::vector<std::vector<double>> outputs;  // per internal node
  std::vector<double> leaf_buffer;
  std::vector<const double*> spread_ptr;     // points into `spread` or basis_spread_
  std::vector<char> all_basis;               // per vertex
};

}  // namespace ntksketch
