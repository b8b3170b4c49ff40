#pragma once

#include "bcolab/error.hpp"
#include "bcolab/linalg.hpp"

#include <initializer_list>
#include <optional>

namespace testing {

inline bcolab::Vector vec(std::initializer_list<double> xs) {
  bcolab::Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Error code raised by fn, or nullopt when it returns normally.
template <class Fn>
std::optional<bcolab::Errc> errc_of(Fn&& fn) {
  try {
    fn();
  } catch (const bcolab::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace testing
