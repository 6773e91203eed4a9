#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netgeom/calculus.hpp"
#include "netgeom/codazzi.hpp"
#include "netgeom/nets.hpp"
#include "netgeom/parser.hpp"
#include "netgeom/product.hpp"
#include "netgeom/sampling.hpp"

namespace netgeom {

/// Manifest problem located by a JSON pointer into the document.
class ManifestError : public std::runtime_error {
 public:
  enum class Kind { Io, Json, Schema, Dimension, UnknownName, Expression };
  ManifestError(Kind kind, std::string pointer, const std::string& msg)
      : std::runtime_error((pointer.empty() ? std::string() : pointer + ": ") + msg),
        kind_(kind),
        pointer_(std::move(pointer)) {}
  Kind kind() const { return kind_; }
  const std::string& pointer() const { return pointer_; }

 private:
  Kind kind_;
  std::string pointer_;
};

struct NetEntry {
  std::string name;
  OrthogonalNet net;
  std::map<std::string, bool> expect;  // flag name -> expected to hold
};

struct TensorEntry {
  std::string name;
  SymTensorField phi;
  std::optional<std::string> h_name;
  std::optional<Expr> h;  // body in one variable
  std::optional<std::string> expect_case;
};

struct FactorizeSettings {
  std::optional<Point> base;
  int grid = 9;
  double tolerance = 1e-6;  // reconstruction error
};

struct Manifest {
  Chart chart;
  MetricField metric;
  std::optional<ProductSpec> product;
  FunctionTable functions;
  std::vector<NetEntry> nets;
  std::vector<TensorEntry> tensors;
  SamplePlan sampling;
  std::optional<double> tolerance;
  FactorizeSettings factorize;
};

Manifest parse_manifest(const std::string& text);
Manifest load_manifest(const std::filesystem::path& path);

}  // namespace netgeom
