#pragma once

#include <stdexcept>
#include <string>

namespace ms4 {

// Base of every error raised by the library. `code()` is the stable
// machine-readable tag that the CLI copies into its error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Input data is geometrically invalid (non-finite values, degenerate
// metric, rank-deficient differential, inconsistent invariants).
class GeometryError : public Error {
 public:
  explicit GeometryError(const std::string& what) : Error("E_GEOMETRY", what) {}
};

// The Maurer-Cartan data is not integrable within tolerance.
class IntegrabilityBroken : public Error {
 public:
  explicit IntegrabilityBroken(const std::string& what)
      : Error("E_INTEGRABILITY", what) {}
};

// Every point of the patch lies on the circle locus; the ellipse-adapted
// frame does not exist anywhere.
class SuperminimalPatch : public Error {
 public:
  explicit SuperminimalPatch(const std::string& what)
      : Error("E_SUPERMINIMAL", what) {}
};

// Missing or malformed surface source (manifest, data file, catalog name).
class SourceError : public Error {
 public:
  explicit SourceError(const std::string& what) : Error("E_SOURCE", what) {}
};

}  // namespace ms4
