#include "hatt/flop_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hatt/errors.hpp"
#include "hatt/linalg.hpp"

namespace hatt {

const std::vector<std::string_view>& flop_model_names() {
  static const std::vector<std::string_view> names{
      "partial-contraction-rl", "hpcrl-1",   "hpcrl-2", "tt-rounding", "orth-rand",
      "rand-orth",              "two-sided", "hatt-1",  "hatt-2"};
  return names;
}

FlopModelDetail flop_model_detail(std::string_view algorithm, const FlopModelParams& p) {
  if (p.d < 2 || p.n < 1 || p.r < 1 || p.s < 1 || p.ell < 1) {
    throw UsageError("flop_model: sizes must be positive and d >= 2");
  }
  const double d2 = double(p.d - 2);
  const double n = double(p.n), r = double(p.r), s = double(p.s), l = double(p.ell);
  const double rs = r * s;
  const double big_r = p.terms.value_or(l);
  if (big_r <= 0.0) throw UsageError("flop_model: retained terms must be positive");
  const double svd = d2 * double(kSvdFlopFactor) * rs * l * l;

  double leading = 0.0;
  bool with_svd = false;
  if (algorithm == "partial-contraction-rl") {
    leading = d2 * n * (2 * rs * l * l + 2 * rs * rs * l);
  } else if (algorithm == "hpcrl-1") {
    leading = d2 * (n * big_r * (2 * r * r * s + 2 * s * s * r + 2 * rs * l + 2 * l * l - 2 * rs) -
                    rs * l);
    with_svd = true;
  } else if (algorithm == "hpcrl-2") {
    leading = d2 * (n * l * (2 * r * r * s + 2 * s * s * r + 2 * rs * l + l - 2 * rs) - rs * l);
  } else if (algorithm == "tt-rounding") {
    leading = d2 * n * (5 * rs * rs * rs + 6 * rs * rs * l + 2 * rs * l * l);
  } else if (algorithm == "orth-rand") {
    leading = d2 * n * (5 * rs * rs * rs + 2 * rs * rs * l + 4 * rs * l * l);
  } else if (algorithm == "rand-orth") {
    leading = d2 * n * (4 * rs * rs * l + 6 * rs * l * l);
  } else if (algorithm == "two-sided") {
    leading = d2 * n * (6 * rs * rs * l + 6 * rs * l * l);
  } else if (algorithm == "hatt-1") {
    const double r_hat = (big_r + l) / 2.0;
    leading = d2 * n * rs * r_hat * (4 * r + 4 * s + 4 * l + 2 * l * l / r_hat);
    with_svd = true;
  } else if (algorithm == "hatt-2") {
    leading = d2 * n * rs * l * (4 * r + 4 * s + 6 * l);
  } else {
    throw UsageError("flop_model: unknown algorithm '" + std::string(algorithm) + "'");
  }
  FlopModelDetail out;
  out.leading = std::llround(leading);
  if (with_svd) {
    out.svd_bucket = std::llround(svd);
    out.approximate = true;
  }
  return out;
}

std::int64_t flop_model(std::string_view algorithm, const FlopModelParams& p) {
  return flop_model_detail(algorithm, p).total();
}

std::optional<Index> hatt_crossover(Index d, Index n, Index r, Index s, double terms, Index lo,
                                    Index hi) {
  for (Index l = lo; l <= hi; ++l) {
    FlopModelParams p{d, n, r, s, l, std::min(terms, double(l))};
    if (flop_model("hatt-1", p) < flop_model("hatt-2", p)) return l;
  }
  return std::nullopt;
}

}  // namespace hatt
