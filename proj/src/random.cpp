#include "hatt/random.hpp"

#include <cmath>
#include <random>
#include <string>

#include "hatt/errors.hpp"

namespace hatt {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

void validate_rank_chain(const Shape& shape, const std::vector<Index>& ranks) {
  if (ranks.size() != shape.order() + 1) {
    throw ShapeError("rank chain needs d + 1 = " + std::to_string(shape.order() + 1) +
                     " entries, got " + std::to_string(ranks.size()));
  }
  if (ranks.front() != 1 || ranks.back() != 1) throw ShapeError("boundary ranks must be 1");
  for (Index r : ranks) {
    if (r < 1) throw ShapeError("ranks must be positive");
  }
}

TTTensor random_tt(const RandomSpec& spec) {
  validate_rank_chain(spec.shape, spec.ranks);
  std::vector<TTCore> cores;
  cores.reserve(spec.shape.order());
  for (std::size_t k = 0; k < spec.shape.order(); ++k) {
    const Index left = spec.ranks[k];
    const Index n = spec.shape[k];
    const Index right = spec.ranks[k + 1];
    std::mt19937_64 engine(substream_seed(spec.seed, k + 1));
    std::vector<double> values(static_cast<std::size_t>(left * n * right));
    if (spec.kind == Distribution::gaussian) {
      std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(double(left * n * right)));
      for (double& v : values) v = dist(engine);
    } else {
      std::uniform_real_distribution<double> dist(0.0, 1.0);
      for (double& v : values) v = dist(engine);
    }
    cores.emplace_back(left, n, right, std::move(values));
  }
  return TTTensor(std::move(cores));
}

}  // namespace hatt
