#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace llfpca {

enum class KernelFamily { Epanechnikov, Triangular, Uniform };

// A symmetric probability density on [-1,1] together with its second moment
// nu2 = integral of t^2 K(t) dt.
struct KernelSpec {
  KernelFamily family = KernelFamily::Epanechnikov;
  double nu2 = 0.2;
};

inline KernelSpec make_kernel(KernelFamily family) {
  switch (family) {
    case KernelFamily::Epanechnikov: return {family, 0.2};
    case KernelFamily::Triangular:   return {family, 1.0 / 6.0};
    case KernelFamily::Uniform:      return {family, 1.0 / 3.0};
  }
  throw UnknownKernel("<invalid enum>");
}

inline KernelSpec kernel_by_name(std::string_view name) {
  if (name == "epanechnikov") return make_kernel(KernelFamily::Epanechnikov);
  if (name == "triangular") return make_kernel(KernelFamily::Triangular);
  if (name == "uniform") return make_kernel(KernelFamily::Uniform);
  throw UnknownKernel(std::string(name));
}

inline const char* kernel_name(const KernelSpec& k) {
  switch (k.family) {
    case KernelFamily::Epanechnikov: return "epanechnikov";
    case KernelFamily::Triangular:   return "triangular";
    case KernelFamily::Uniform:      return "uniform";
  }
  return "<invalid>";
}

// K(u); zero outside [-1,1].
inline double evaluate(const KernelSpec& k, double u) {
  double a = std::abs(u);
  if (a > 1.0) return 0.0;
  switch (k.family) {
    case KernelFamily::Epanechnikov: return 0.75 * (1.0 - u * u);
    case KernelFamily::Triangular:   return 1.0 - a;
    case KernelFamily::Uniform:      return 0.5;
  }
  return 0.0;
}

// K_h(v) = (1/h) K(v/h).
inline double scaled(const KernelSpec& k, double h, double v) {
  if (!(h > 0.0)) throw NonpositiveBandwidth(h);
  return evaluate(k, v / h) / h;
}

}  // namespace llfpca
