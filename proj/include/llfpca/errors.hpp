#pragma once

#include <stdexcept>
#include <string>

namespace llfpca {

// Base class for all library errors. `kind()` returns a stable identifier
// suitable for machine-readable error records.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct InvalidDataset : Error {
  explicit InvalidDataset(const std::string& msg) : Error("InvalidDataset", msg) {}
};

struct MalformedRow : Error {
  MalformedRow(std::size_t line, const std::string& msg)
      : Error("MalformedRow", "line " + std::to_string(line) + ": " + msg), line(line) {}
  std::size_t line;
};

struct EmptyFile : Error {
  explicit EmptyFile(const std::string& path) : Error("EmptyFile", "no data rows in " + path) {}
};

struct TimeOutOfDomain : Error {
  TimeOutOfDomain(std::size_t line, double t)
      : Error("TimeOutOfDomain",
              "line " + std::to_string(line) + ": time " + std::to_string(t) +
                  " outside declared domain"),
        line(line), time(t) {}
  std::size_t line;
  double time;
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error("IoError", msg) {}
};

struct InvalidGridSize : Error {
  explicit InvalidGridSize(long g)
      : Error("InvalidGridSize", "grid size must be >= 2, got " + std::to_string(g)) {}
};

struct InvalidGrid : Error {
  explicit InvalidGrid(const std::string& msg) : Error("InvalidGrid", msg) {}
};

struct NonpositiveBandwidth : Error {
  explicit NonpositiveBandwidth(double h)
      : Error("NonpositiveBandwidth", "bandwidth must be positive, got " + std::to_string(h)),
        bandwidth(h) {}
  double bandwidth;
};

// One-dimensional smoothing window cannot support a linear fit at `t`.
struct DegenerateWindow : Error {
  DegenerateWindow(double t, const std::string& why)
      : Error("DegenerateWindow", "degenerate window at t=" + std::to_string(t) + ": " + why),
        t(t) {}
  double t;
};

// Two-dimensional smoothing window cannot support a planar fit at (s, t).
struct DegenerateSurfaceWindow : Error {
  DegenerateSurfaceWindow(double s, double t, const std::string& why)
      : Error("DegenerateSurfaceWindow",
              "degenerate surface window at (s=" + std::to_string(s) +
                  ", t=" + std::to_string(t) + "): " + why),
        s(s), t(t) {}
  double s;
  double t;
};

struct NoPairableCurves : Error {
  NoPairableCurves()
      : Error("NoPairableCurves", "covariance smoothing needs at least one curve with m_i >= 2") {}
};

struct GridMismatch : Error {
  explicit GridMismatch(const std::string& msg) : Error("GridMismatch", msg) {}
};

struct AsymmetricInput : Error {
  explicit AsymmetricInput(double maxdev)
      : Error("AsymmetricInput",
              "matrix asymmetry " + std::to_string(maxdev) + " exceeds tolerance") {}
};

struct NoPositiveEigenvalues : Error {
  NoPositiveEigenvalues() : Error("NoPositiveEigenvalues", "no eigenvalue above threshold") {}
};

struct LengthMismatch : Error {
  LengthMismatch(std::size_t a, std::size_t b)
      : Error("LengthMismatch",
              "vector lengths differ: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

struct TooManyComponents : Error {
  TooManyComponents(int requested, std::size_t retained)
      : Error("TooManyComponents",
              "requested " + std::to_string(requested) + " components, retained " +
                  std::to_string(retained)) {}
};

struct InvalidModelSpec : Error {
  explicit InvalidModelSpec(const std::string& msg) : Error("InvalidModelSpec", msg) {}
};

struct UnknownCombination : Error {
  explicit UnknownCombination(const std::string& msg) : Error("UnknownCombination", msg) {}
};

struct UnknownKernel : Error {
  explicit UnknownKernel(const std::string& name)
      : Error("UnknownKernel", "unknown kernel family: " + name) {}
};

}  // namespace llfpca
