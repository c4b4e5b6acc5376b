#pragma once

#include <cstdint>
#include <random>

namespace leanreg {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Child seed for task `index` under `seed`. Every replicate, bootstrap draw and
/// fuzz instance takes its generator from here, so results never depend on
/// which thread ran which task.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

inline Rng make_rng(std::uint64_t seed, std::uint64_t index) {
  return Rng(derive_seed(seed, index));
}

}  // namespace leanreg
