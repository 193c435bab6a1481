#ifndef PERMPRIME_CAPS_HPP
#define PERMPRIME_CAPS_HPP

#include <cstddef>

namespace permprime {

// Largest vertex count an operation will materialize eagerly.
inline constexpr std::size_t kDefaultMaterializationCap = 200000;

// Largest element count a subpower closure will accumulate.
inline constexpr std::size_t kDefaultClosureCap = 5000000;

}  // namespace permprime

#endif
