#pragma once

#include "korn/inequalities.hpp"
#include "korn/measure.hpp"
#include "korn/projections.hpp"
#include "korn/rigidity.hpp"
#include "korn/witten.hpp"

namespace korn {

struct AnalysisOptions {
  /// Gauss-Hermite order per axis; 0 picks one from the degrees below.
  int quadrature_order = 0;
  int basis_degree = 4;
  /// Highest field degree the rule must integrate exactly (exact families only).
  int field_degree = 3;
  double nullspace_tolerance = kNullspaceTolerance;
};

/// Smallest order whose rule is exact for every integrand of a verification
/// with basis degree N and fields of degree p; at least 12 for inexact rules.
int default_quadrature_order(const Potential& p, const AnalysisOptions& opt);

/// Poincare constant: closed form for the standard Gaussian, 1 / Galerkin gap otherwise.
struct PoincareConstant {
  double value = 0.0;
  std::string provenance;
};
PoincareConstant poincare_constant(const Potential& p, const SpectralGap& gap);

/// Everything built for one potential, in dependency order.
class Analysis {
 public:
  Analysis(const PotentialSpec& spec, const AnalysisOptions& opt = {});

  Potential potential;
  AnalysisOptions options;
  Quadrature quadrature;
  RegularityConstants regularity;
  RotationBasis rotations;
  PhiDecomposition decomposition;
  GalerkinBasis basis;
  OperatorMatrix lambda;
  SpectralGap gap;
  PoincareConstant poincare;
  RigidityReport rigidity;
  ConstantsReport constants;

  VerificationContext context() const {
    return {potential, quadrature, rotations, decomposition, basis, lambda, constants};
  }
};

}  // namespace korn
