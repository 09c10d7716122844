#pragma once

#include <optional>

#include "twophase/error.hpp"

// Error code raised by f, empty when it returns normally.
template <class F>
std::optional<twophase::ErrorCode> code_of(F&& f) {
  try {
    f();
  } catch (const twophase::Error& e) {
    return e.code();
  }
  return std::nullopt;
}
