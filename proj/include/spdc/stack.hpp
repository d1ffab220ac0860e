#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spdc/materials.hpp"

namespace spdc {

struct Layer {
  MaterialPtr material;
  double length;  // m
};

/// Ordered layers l = 1..N between two air half-spaces. Boundaries are
/// derived from lengths with z_0 = 0; the stack is a value type and is never
/// mutated after construction.
class Stack {
 public:
  Stack() = default;
  explicit Stack(std::vector<Layer> layers);

  std::size_t size() const { return layers_.size(); }
  const std::vector<Layer>& layers() const { return layers_; }
  const Layer& layer(std::size_t i) const { return layers_.at(i); }

  /// z_0 .. z_N.
  std::vector<double> boundaries() const;
  double total_length() const;
  bool has_nonlinear_layer() const;
  double nonlinear_length() const;

  /// Stable 64-bit content hash (material names + length bit patterns).
  std::uint64_t hash() const;

  friend bool operator==(const Stack& a, const Stack& b);

 private:
  std::vector<Layer> layers_;
};

/// Alternating a,b,...,a with N odd: (N+1)/2 layers of a, (N-1)/2 of b.
Stack build_ab_stack(MaterialPtr a, MaterialPtr b, int n_layers, double l_a,
                     double l_b);

Stack scale_stack(const Stack& stack, double s);

/// Single layer of `material` holding the combined nonlinear length of
/// `stack` (reference for enhancement factors).
Stack single_layer_equivalent(const Stack& stack, MaterialPtr material);

std::string hash_hex(std::uint64_t h);

}  // namespace spdc
