#pragma once

#include <vector>

#include "mixnorm/grid.hpp"

namespace mixnorm {

/// A rank-one field f_1 (x) ... (x) f_d kept in factored form. Every norm in
/// the library is a cross-norm, so norms of these are products of 1-d norms;
/// `dense()` materialises the full grid for cross-checks.
class TensorGridFunction {
public:
  TensorGridFunction() = default;

  explicit TensorGridFunction(std::vector<GridFunction> factors) : factors_(std::move(factors)) {
    require(!factors_.empty() && factors_.size() <= kMaxDim, "dimension", "1 to 3 factors required");
    for (const auto& f : factors_) {
      require(f.dim() == 1, "factors", "every factor must be one-dimensional");
      require(f.extension() == factors_.front().extension(), "extension", "factors must share the extension rule");
    }
  }

  std::size_t dim() const noexcept { return factors_.size(); }
  const GridFunction& factor(std::size_t axis) const { return factors_[axis]; }
  const std::vector<GridFunction>& factors() const noexcept { return factors_; }

  GridFunction dense() const {
    GridFunction out = factors_.front();
    for (std::size_t a = 1; a < factors_.size(); ++a) out = tensor_product(out, factors_[a]);
    return out;
  }

private:
  std::vector<GridFunction> factors_;
};

inline TensorGridFunction pointwise_multiply(const TensorGridFunction& u, const TensorGridFunction& v) {
  require(u.dim() == v.dim(), "dimension", "tensor factors mismatch");
  std::vector<GridFunction> f;
  f.reserve(u.dim());
  for (std::size_t a = 0; a < u.dim(); ++a) f.push_back(pointwise_multiply(u.factor(a), v.factor(a)));
  return TensorGridFunction(std::move(f));
}

inline TensorGridFunction operator*(const TensorGridFunction& u, const TensorGridFunction& v) {
  return pointwise_multiply(u, v);
}

/// Applies a 1-d norm factor by factor and multiplies.
template <class Norm1d>
double cross_norm(const TensorGridFunction& u, Norm1d&& norm) {
  double out = 1.0;
  for (const auto& f : u.factors()) out *= norm(f);
  return out;
}

inline double lp_norm(const TensorGridFunction& u, double p) {
  require_exponent(p);
  return cross_norm(u, [p](const GridFunction& f) { return lp_norm(f, p); });
}

inline double sup_norm(const TensorGridFunction& u) {
  return cross_norm(u, [](const GridFunction& f) { return sup_norm(f); });
}

}  // namespace mixnorm
