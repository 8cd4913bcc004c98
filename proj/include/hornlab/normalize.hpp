#pragma once

#include "normalize_incl.hpp"
#include "normalize_pred.hpp"

namespace hornlab {

inline NormalizeResult normalize_traced(const Formula& f, const NormalizeOptions& opt = {}) {
  return f.logic == Logic::INCL ? normalize_incl_traced(f, opt) : normalize_pred_like(f, opt);
}

inline Formula normalize(const Formula& f, const NormalizeOptions& opt = {}) {
  return normalize_traced(f, opt).formula;
}

}  // namespace hornlab
