#pragma once

#include <polyrec/family.hpp>

// Shared families so the expensive constructions run once per test binary.
inline const polyrec::SequenceFamily& family122() {
  static polyrec::SequenceFamily f = polyrec::construct_family(1, 2, 2);
  return f;
}

inline const polyrec::SequenceFamily& family123() {
  static polyrec::SequenceFamily f = polyrec::construct_family(1, 2, 3);
  return f;
}
