#include "korn/analysis.hpp"

#include <algorithm>
#include <string>

#include "korn/error.hpp"

namespace korn {

int default_quadrature_order(const Potential& p, const AnalysisOptions& opt) {
  const int g = std::max(p.gradient_degree(), 1);
  // Largest integrands: (1 + |grad phi|^2) |u|^2 and basis products with grad phi.
  const int needed = std::max({2 * opt.field_degree + 2 * g, 2 * opt.basis_degree + 2 * g, 2 * opt.basis_degree + g});
  int order = (needed + 2) / 2;
  if (!p.envelope_exact()) order = std::max(order, 12);
  return order;
}

PoincareConstant poincare_constant(const Potential& p, const SpectralGap& gap) {
  if (p.family() == Family::gaussian) return {1.0, "paper-closed-form"};
  return {gap.c_p_estimate, "galerkin-estimate"};
}

namespace {

// An automatic order is raised in steps of 4 while the mass defect is too large.
Quadrature make_rule(const Potential& p, const AnalysisOptions& opt) {
  if (opt.quadrature_order > 0) return build_quadrature(p, opt.quadrature_order);
  int order = default_quadrature_order(p, opt);
  for (;; order += 4) {
    try {
      return build_quadrature(p, order);
    } catch (const Error& e) {
      if (p.envelope_exact() || order >= 48 || std::string(e.what()).find("mass defect") == std::string::npos) throw;
    }
  }
}

}  // namespace

Analysis::Analysis(const PotentialSpec& spec, const AnalysisOptions& opt)
    : potential(build_potential(spec)),
      options(opt),
      quadrature(make_rule(potential, opt)),
      regularity(estimate_regularity_constants(potential, quadrature)),
      rotations(rotation_basis(quadrature, potential.dimension())),
      decomposition(detect_Rphi(potential, quadrature, rotations, opt.nullspace_tolerance)),
      basis(build_basis(potential, quadrature, opt.basis_degree)),
      lambda(assemble_lambda(basis, quadrature)),
      gap(spectral_gap(lambda, basis)),
      poincare(poincare_constant(potential, gap)),
      rigidity(rigidity_report(potential, quadrature, decomposition, basis, lambda)) {
  ChainInputs in;
  in.dimension = potential.dimension();
  in.c_p = poincare.value;
  in.c_phi = regularity.c_phi;
  in.c_phi_prime = regularity.c_phi_prime;
  in.c_phi_second = regularity.c_phi_second;
  in.c_rv = rigidity.rv.constant;
  in.c_rd = rigidity.rd.constant;
  in.c_rv0 = rigidity.rv0.constant;
  in.c_rvl = rigidity.rvl.constant;
  constants = constant_chain(in);
  constants.c_p_provenance = poincare.provenance;
  constants.regularity_provenance = regularity.certified ? "paper-closed-form" : "galerkin-estimate";
  constants.rigidity_provenance = quadrature.exact ? "paper-closed-form" : "galerkin-estimate";
}

}  // namespace korn
