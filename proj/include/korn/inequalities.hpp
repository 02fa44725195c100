#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "korn/calculus.hpp"
#include "korn/measure.hpp"
#include "korn/projections.hpp"
#include "korn/rigidity.hpp"
#include "korn/witten.hpp"

namespace korn {

enum class InequalityTag {
  WKfull,
  WPKfull,
  WPKstrong,
  WPK,
  WK,
  WKZfull,
  WPKZfull,
  WPKzero,
  WPKL,
  strongpoincare,
  poincarelions,
  identity21,
  identity22,
};

const char* to_string(InequalityTag tag);
InequalityTag inequality_from_string(const std::string& name);
const std::vector<InequalityTag>& all_inequalities();
/// Tags that involve Lambda^{-1/2} and need u within the Galerkin span.
bool is_zeroth_order(InequalityTag tag);

enum class ConstantKind { chain, empirical, paper_optimal };
const char* to_string(ConstantKind kind);

/// Relative slack of every inequality check.
inline constexpr double kInequalitySlack = 1e-9;

inline bool holds_with_slack(double lhs, double rhs) { return lhs <= rhs + kInequalitySlack * (1.0 + rhs); }

struct InequalityResult {
  InequalityTag tag = InequalityTag::WKfull;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  ConstantKind kind = ConstantKind::chain;
  /// lhs over the principal right-hand form without its constant
  /// (||D^s u||^2, ||grad f||^2, ... ; rhs itself for the identities).
  double ratio = 0.0;
  bool holds = false;
  std::string note;
};

struct NamedConstant {
  std::string name;
  double value;
  std::string provenance;
};

/// Every named constant, with where its value came from.
struct ConstantsReport {
  int dimension = 0;
  double c_p = 0, c_phi = 0, c_phi_prime = 0, c_phi_second = 0, c_b = 0;
  double c_sp = 0, c_pl = 0, c_k = 0, c_pk = 0, c_spk = 0;
  double c_rv = 0, c_rd = 0, c_rv0 = 0, c_rvl = 0;
  double c_k_prime = 0, c_pk_prime = 0, c_pkl_prime = 0;
  double c_lpl = 0, c_rpl = 0;
  /// Primary zeroth-order constants carry the C_RPL factor; the *_alt values drop it.
  double c_k0 = 0, c_pk0 = 0, c_k0_alt = 0, c_pk0_alt = 0, c_pk0_prime = 0;
  std::string c_p_provenance = "paper-closed-form";
  std::string regularity_provenance = "paper-closed-form";
  std::string rigidity_provenance = "paper-closed-form";

  std::vector<NamedConstant> entries() const;
};

struct ChainInputs {
  int dimension = 2;
  double c_p = 1.0;
  double c_phi = 0.0;
  double c_phi_prime = 0.0;
  double c_phi_second = 0.0;
  double c_rv = 0.0;
  double c_rd = 0.0;
  double c_rv0 = 0.0;
  double c_rvl = 0.0;
};

/// Evaluates the explicit constant chain; throws naming the stage that
/// produced a non-positive or non-finite value.
ConstantsReport constant_chain(const ChainInputs& in);

/// The objects a verification needs, all built on the same rule.
struct VerificationContext {
  const Potential& potential;
  const Quadrature& quadrature;
  const RotationBasis& rotations;
  const PhiDecomposition& decomposition;
  const GalerkinBasis& basis;
  const OperatorMatrix& lambda;  // scalar Lambda on `basis`
  const ConstantsReport& constants;
};

/// Constant a tag uses from the report.
double chain_constant(InequalityTag tag, const ConstantsReport& c);

struct ConstantChoice {
  double value;
  ConstantKind kind;
};

InequalityResult verify_inequality(InequalityTag tag, const PolyVectorField& u, const VerificationContext& ctx,
                                   std::optional<ConstantChoice> constant = std::nullopt);

/// All tags for one field, sharing the nodal evaluation.
std::vector<InequalityResult> verify_all(const PolyVectorField& u, const VerificationContext& ctx);

/// Quadratic forms on vector (or scalar) Galerkin coefficients.
struct QuadraticForms {
  Eigen::MatrixXd identity;      // ||u||^2
  Eigen::MatrixXd mean;          // |<u>|^2
  Eigen::MatrixXd rotations;     // sum over R of <u . R>^2
  Eigen::MatrixXd rotations_phi; // same over R_phi
  Eigen::MatrixXd du;            // ||Du||^2
  Eigen::MatrixXd ds;            // ||D^s u||^2
  Eigen::MatrixXd mean_antisym;  // |<D^a u>|^2
  Eigen::MatrixXd mean_mphi;     // |P_phi(<Du>)|^2
  Eigen::MatrixXd gradphi_dot;   // ||grad phi . u||^2
  Eigen::MatrixXd gradphi_sq;    // <|grad phi|^2 |u|^2>
  Eigen::MatrixXd du0;           // ||Lambda^{-1/2} Du||^2
  Eigen::MatrixXd ds0;           // ||Lambda^{-1/2} D^s u||^2
  Eigen::MatrixXd gradphi_dot0;  // ||Lambda^{-1/2} grad phi . u||^2 (Galerkin projection)
  // scalar forms
  Eigen::MatrixXd s_identity, s_mean, s_grad, s_gradphi_sq, s_grad0;
};

QuadraticForms assemble_forms(const VerificationContext& ctx);

struct EmpiricalConstant {
  InequalityTag tag = InequalityTag::WKfull;
  /// Largest lhs/rhs over the span; +inf when lhs is positive on the rhs kernel.
  double value = 0.0;
  Eigen::VectorXd extremizer;
  int kernel_dimension = 0;
  bool finite = true;
  std::string diagnostic;
};

/// Maximum of x^T lhs x over x^T rhs x, excluding the rhs kernel (eigenvalues
/// below threshold times the largest). lhs need not be semidefinite.
EmpiricalConstant max_pencil_quotient(const Eigen::MatrixXd& lhs, const Eigen::MatrixXd& rhs,
                                      double threshold = 1e-8);

/// Galerkin lower bound on the best constant of an inequality. For the
/// precised tags the rigidity term is moved to the left with its chain value.
EmpiricalConstant empirical_constant(InequalityTag tag, const QuadraticForms& forms, const ConstantsReport& c);

/// Tags with an empirical estimate.
const std::vector<InequalityTag>& empirical_tags();

struct CertificateValue {
  std::string name;
  double value;
  double expected;
  bool matched;
};

/// Checks the table for u = (1 - x_2^2, x_1 x_2, 0, ...) under the standard Gaussian.
std::vector<CertificateValue> gaussian_certificates(const Quadrature& q, double tol = 1e-10);

/// The field (1 - x_2^2, x_1 x_2, 0, ...).
PolyVectorField gaussian_extremal_field(int d);

}  // namespace korn
