#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netgeom/nets.hpp"
#include "netgeom/sampling.hpp"

namespace netgeom {

/// (1,1)-tensor field Phi^k_l with Expr entries.
class SymTensorField {
 public:
  SymTensorField(const Chart& chart, const std::vector<std::vector<Expr>>& components);
  static SymTensorField diagonal(const Chart& chart, const std::vector<Expr>& diag);

  int dim() const { return n_; }
  const Expr& component(int k, int l) const { return table(k, l).expr(); }
  const DiffTable& table(int k, int l) const { return tables_[k * n_ + l]; }
  Matrix at(const Point& p) const;
  std::vector<std::vector<Expr>> components() const;

 private:
  int n_ = 0;
  std::vector<DiffTable> tables_;
};

class CodazziError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fewer or more than two eigenvalue clusters.
class CoalescenceError : public CodazziError {
 public:
  using CodazziError::CodazziError;
};

inline constexpr double kDefaultGapMin = 1e-6;

/// max |g Phi - (g Phi)^T| relative to |g Phi|.
double self_adjoint_defect(const MetricField& g, const SymTensorField& phi, const Point& p);

/// max over coordinate pairs of |(nabla_a Phi) d_b - (nabla_b Phi) d_a|_g / (|d_a| |d_b|).
/// Throws CodazziError when Phi is not self-adjoint within `sa_tol`.
double codazzi_residual(const MetricField& g, const SymTensorField& phi, const Point& p, double sa_tol = 1e-8);

struct EigenPair {
  double lambda = 0, mu = 0;
  std::vector<Vector> basis_lambda, basis_mu;  // g-orthonormal
  double gap = 0;
};

/// Splits the spectrum into two clusters. Without `track`, lambda is the
/// cluster whose eigenspace holds the larger part of d_0; with `track`,
/// lambda is the cluster nearest to that value.
EigenPair eigen_two(const MetricField& g, const SymTensorField& phi, const Point& p, double gap_min = kDefaultGapMin,
                    std::optional<double> track = std::nullopt);

/// Smooth eigenvalue fields and eigenbundle frame fixed by the labeling at a
/// reference point.
struct EigenStructure {
  int rank_lambda = 0, rank_mu = 0;
  Expr lambda, mu;
  OrthogonalNet net;  // blocks: {E_lambda, E_mu}
};

EigenStructure eigen_structure(const MetricField& g, const SymTensorField& phi, const Point& ref,
                               double gap_min = kDefaultGapMin);

struct CriteriaRecord {
  Point p;
  double lambda = 0, mu = 0;
  double mcn = 0;
  std::optional<double> cpnet;  // empty where lambda + mu vanishes
  double mulambda1 = 0, mulambda2 = 0;
  double s1 = 0, s2 = 0;
  double pns = 0;
  double grad_lambda_on_lambda = 0;  // |(grad lambda)_{E_lambda}|
  double grad_mu_on_mu = 0;          // |(grad mu)_{E_mu}|
  double grad_lambda = 0, grad_mu = 0;
  double sphericity_lambda = 0;
  std::optional<double> h_residual;  // |lambda - h(mu)|
  std::optional<double> tilmu;       // differentiated relation along a rank-1 E_lambda
};

CriteriaRecord criteria_residuals(const MetricField& g, const SymTensorField& phi, const Point& p, double tol = 1e-8);
CriteriaRecord criteria_residuals(const MetricField& g, const SymTensorField& phi, const EigenStructure& es,
                                  const Point& p, double tol, const std::optional<Expr>& h_of_mu,
                                  double gap_min = kDefaultGapMin);

enum class WarpedCase { NotRequested, CaseI, CaseII, Outside };
std::string to_string(WarpedCase c);

struct CodazziReport {
  double tolerance = 0;
  double codazzi_residual = 0;
  double self_adjoint_defect = 0;
  int rank_lambda = 0, rank_mu = 0;
  std::vector<CriteriaRecord> points;
  double mcn = 0, mulambda1 = 0, mulambda2 = 0, s1 = 0, s2 = 0, pns = 0;
  std::optional<double> cpnet;  // empty when not applicable at every sample
  int cpnet_skipped = 0;
  Verdict isothermic = Verdict::NotApplicable;  // cpnet small everywhere
  Verdict mulambda_both = Verdict::Holds;
  Verdict cp_net = Verdict::Holds;  // CP flag of the eigenbundle net
  NetReport net;
  WarpedCase warped_case = WarpedCase::NotRequested;
  std::string case_note;
  std::optional<double> h_residual, tilmu_residual;
  std::optional<double> constant_lambda, constant_mu;  // case (i): A_0, A_1
  std::vector<std::string> inconsistencies;
};

CodazziReport classify_codazzi(const MetricField& g, const SymTensorField& phi, const std::optional<Expr>& h,
                               const SamplePlan& plan, double tol, double gap_min = kDefaultGapMin);
CodazziReport classify_codazzi(const MetricField& g, const SymTensorField& phi, const std::optional<Expr>& h,
                               const std::vector<Point>& samples, double tol, double gap_min = kDefaultGapMin);

struct CodazziCandidate {
  MetricField g;
  SymTensorField phi;
  double codazzi_residual = 0;  // max over a coarse grid
};

/// phi^2 (g_0 + g_1) with phi^{-1} = phi0 + phi1 and Phi = phi1 on E_0, -phi0 on E_1.
CodazziCandidate build_canonical_pair(const Chart& product_chart, const Expr& phi0, const Expr& phi1,
                                   const std::vector<std::vector<Expr>>& factor0,
                                   const std::vector<std::vector<Expr>>& factor1);

/// dt^2 + sigma^2 g_1 with Phi = h(mu) on E_0 and mu on E_1. Block 0 must be
/// one coordinate t; sigma and mu may only depend on t. Rejects inputs whose
/// differentiated relation mu' = (h(mu) - mu) (log sigma)' fails by more than tol.
CodazziCandidate build_warped_pair(const Chart& product_chart, const Expr& h, const Expr& sigma, const Expr& mu,
                                    const std::vector<std::vector<Expr>>& factor1, double tol = 1e-8);

}  // namespace netgeom
