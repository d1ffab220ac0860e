#include "spdc/stack.hpp"

#include <bit>
#include <cstdio>

#include "spdc/error.hpp"
#include "spdc/io.hpp"

namespace spdc {

Stack::Stack(std::vector<Layer> layers) : layers_(std::move(layers)) {
  for (const auto& l : layers_) {
    if (!l.material) fail(ErrorCode::InvalidArgument, "layer without material");
    if (!(l.length > 0.0)) fail(ErrorCode::InvalidArgument, "layer length must be > 0");
  }
}

std::vector<double> Stack::boundaries() const {
  std::vector<double> z(layers_.size() + 1, 0.0);
  for (std::size_t i = 0; i < layers_.size(); ++i) z[i + 1] = z[i] + layers_[i].length;
  return z;
}

double Stack::total_length() const { return boundaries().back(); }

bool Stack::has_nonlinear_layer() const {
  for (const auto& l : layers_)
    if (l.material->is_nonlinear) return true;
  return false;
}

double Stack::nonlinear_length() const {
  double sum = 0.0;
  for (const auto& l : layers_)
    if (l.material->is_nonlinear) sum += l.length;
  return sum;
}

std::uint64_t Stack::hash() const {
  Fnv1a h;
  for (const auto& l : layers_) {
    h.update(l.material->name);
    h.update(std::bit_cast<std::uint64_t>(l.length));
  }
  return h.value();
}

bool operator==(const Stack& a, const Stack& b) {
  if (a.layers_.size() != b.layers_.size()) return false;
  for (std::size_t i = 0; i < a.layers_.size(); ++i) {
    if (a.layers_[i].material != b.layers_[i].material ||
        a.layers_[i].length != b.layers_[i].length)
      return false;
  }
  return true;
}

Stack build_ab_stack(MaterialPtr a, MaterialPtr b, int n_layers, double l_a,
                     double l_b) {
  if (n_layers < 1 || n_layers % 2 == 0) {
    fail(ErrorCode::InvalidArgument, "number of layers must be odd and positive");
  }
  if (!(l_a > 0.0) || !(l_b > 0.0)) {
    fail(ErrorCode::InvalidArgument, "layer lengths must be positive");
  }
  std::vector<Layer> layers;
  layers.reserve(static_cast<std::size_t>(n_layers));
  for (int i = 0; i < n_layers; ++i) {
    layers.push_back(i % 2 == 0 ? Layer{a, l_a} : Layer{b, l_b});
  }
  return Stack(std::move(layers));
}

Stack scale_stack(const Stack& stack, double s) {
  if (!(s > 0.0)) fail(ErrorCode::InvalidArgument, "scale factor must be > 0");
  auto layers = stack.layers();
  for (auto& l : layers) l.length *= s;
  return Stack(std::move(layers));
}

Stack single_layer_equivalent(const Stack& stack, MaterialPtr material) {
  const double len = stack.nonlinear_length();
  if (!(len > 0.0)) fail(ErrorCode::NoNonlinearLayer, "stack has no nonlinear layer");
  return Stack({Layer{std::move(material), len}});
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace spdc
