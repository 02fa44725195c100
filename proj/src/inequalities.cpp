#include "korn/inequalities.hpp"

#include <cmath>
#include <limits>

#include "korn/error.hpp"

namespace korn {

namespace {

constexpr InequalityTag kTags[] = {
    InequalityTag::WKfull,   InequalityTag::WPKfull,        InequalityTag::WPKstrong,     InequalityTag::WPK,
    InequalityTag::WK,       InequalityTag::WKZfull,        InequalityTag::WPKZfull,      InequalityTag::WPKzero,
    InequalityTag::WPKL,     InequalityTag::strongpoincare, InequalityTag::poincarelions, InequalityTag::identity21,
    InequalityTag::identity22,
};

}  // namespace

const char* to_string(InequalityTag tag) {
  switch (tag) {
    case InequalityTag::WKfull: return "WKfull";
    case InequalityTag::WPKfull: return "WPKfull";
    case InequalityTag::WPKstrong: return "WPKstrong";
    case InequalityTag::WPK: return "WPK";
    case InequalityTag::WK: return "WK";
    case InequalityTag::WKZfull: return "WKZfull";
    case InequalityTag::WPKZfull: return "WPKZfull";
    case InequalityTag::WPKzero: return "WPKzero";
    case InequalityTag::WPKL: return "WPKL";
    case InequalityTag::strongpoincare: return "strongpoincare";
    case InequalityTag::poincarelions: return "poincarelions";
    case InequalityTag::identity21: return "identity21";
    case InequalityTag::identity22: return "identity22";
  }
  return "unknown";
}

InequalityTag inequality_from_string(const std::string& name) {
  for (auto t : kTags)
    if (name == to_string(t)) return t;
  throw Error("inequalities", "parse", "unknown inequality tag '" + name + "'");
}

const std::vector<InequalityTag>& all_inequalities() {
  static const std::vector<InequalityTag> tags(std::begin(kTags), std::end(kTags));
  return tags;
}

bool is_zeroth_order(InequalityTag tag) {
  return tag == InequalityTag::WKZfull || tag == InequalityTag::WPKZfull || tag == InequalityTag::WPKzero ||
         tag == InequalityTag::poincarelions;
}

const char* to_string(ConstantKind kind) {
  switch (kind) {
    case ConstantKind::chain: return "chain";
    case ConstantKind::empirical: return "empirical";
    case ConstantKind::paper_optimal: return "paper-optimal";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Constant chain

std::vector<NamedConstant> ConstantsReport::entries() const {
  const std::string chain = "chain-formula";
  return {
      {"C_P", c_p, c_p_provenance},
      {"C_phi", c_phi, regularity_provenance},
      {"C_phi_prime", c_phi_prime, regularity_provenance},
      {"C_phi_second", c_phi_second, regularity_provenance},
      {"C_B", c_b, chain},
      {"C_SP", c_sp, chain},
      {"C_PL", c_pl, chain},
      {"C_K", c_k, chain},
      {"C_PK", c_pk, chain},
      {"C_SPK", c_spk, chain},
      {"C_RV", c_rv, rigidity_provenance},
      {"C_RD", c_rd, rigidity_provenance},
      {"C_RV0", c_rv0, "galerkin-estimate"},
      {"C_RVL", c_rvl, rigidity_provenance},
      {"C_K_prime", c_k_prime, chain},
      {"C_PK_prime", c_pk_prime, chain},
      {"C_PKL_prime", c_pkl_prime, chain},
      {"C_LPL", c_lpl, chain},
      {"C_RPL", c_rpl, chain},
      {"C_K0", c_k0, chain},
      {"C_PK0", c_pk0, chain},
      {"C_K0_alt", c_k0_alt, chain},
      {"C_PK0_alt", c_pk0_alt, chain},
      {"C_PK0_prime", c_pk0_prime, chain},
  };
}

ConstantsReport constant_chain(const ChainInputs& in) {
  auto positive = [](const char* stage, double v) {
    if (!std::isfinite(v) || !(v > 0.0))
      throw Error("inequalities", "constant_chain", std::string(stage) + " = " + std::to_string(v) +
                                                        " is not finite and positive");
    return v;
  };
  auto nonnegative = [](const char* stage, double v) {
    if (!std::isfinite(v) || v < 0.0)
      throw Error("inequalities", "constant_chain", std::string(stage) + " must be finite and >= 0");
    return v;
  };
  if (!(in.c_phi > 8.0)) throw Error("inequalities", "constant_chain", "C_phi must exceed 8");
  ConstantsReport c;
  c.dimension = in.dimension;
  c.c_p = positive("C_P", in.c_p);
  c.c_phi = in.c_phi;
  c.c_phi_prime = positive("C_phi'", in.c_phi_prime);
  c.c_phi_second = nonnegative("C_phi''", in.c_phi_second);
  c.c_rv = nonnegative("C_RV", in.c_rv);
  c.c_rd = nonnegative("C_RD", in.c_rd);
  c.c_rv0 = nonnegative("C_RV0", in.c_rv0);
  c.c_rvl = nonnegative("C_RVL", in.c_rvl);

  c.c_b = positive("C_B", domain_toolbox_constant(c.c_phi, c.c_phi_prime, in.dimension));
  c.c_sp = positive("C_SP", c.c_phi * (1.0 + c.c_p));
  const double pl_factor = 1.0 + 0.25 * c.c_phi_prime * std::sqrt(c.c_b);
  c.c_pl = positive("C_PL", (1.0 + c.c_p) * (1.0 + c.c_p) * pl_factor * pl_factor);
  c.c_k = positive("C_K", 1.0 + 4.0 * c.c_pl);
  c.c_pk = positive("C_PK", c.c_p * c.c_k);
  c.c_spk = positive("C_SPK", c.c_sp * (c.c_k + 3.0 * c.c_phi * c.c_pk));
  c.c_pk_prime = positive("C_PK'", c.c_pk + 2.0 * c.c_rv * c.c_spk);
  c.c_pkl_prime = positive("C_PKL'", c.c_pk + 2.0 * c.c_rvl * c.c_spk);
  c.c_k_prime = positive("C_K'", c.c_k * (1.0 + 2.0 * c.c_rd * c.c_sp));
  c.c_lpl = positive("C_LPL", 4.0 * (1.0 + c.c_p) * (1.0 + c.c_p) * (1.0 + c.c_phi_second) * (1.0 + c.c_phi_second));
  const double rpl_factor = 1.0 + 0.25 * c.c_phi_prime * std::sqrt(c.c_b / c.c_phi);
  c.c_rpl = positive("C_RPL", rpl_factor * rpl_factor);
  c.c_k0 = positive("C_K0", 1.0 + 4.0 * c.c_lpl * c.c_rpl);
  c.c_k0_alt = positive("C_K0 (without C_RPL)", 1.0 + 4.0 * c.c_lpl);
  c.c_pk0 = positive("C_PK0", c.c_pl * (1.0 + 4.0 * c.c_lpl * c.c_rpl));
  c.c_pk0_alt = positive("C_PK0 (without C_RPL)", c.c_pl * (1.0 + 4.0 * c.c_lpl));
  c.c_pk0_prime = positive("C_PK0'", c.c_pk0 * (1.0 + 2.0 * c.c_rv0 * c.c_phi));
  return c;
}

double chain_constant(InequalityTag tag, const ConstantsReport& c) {
  switch (tag) {
    case InequalityTag::WKfull: return c.c_k;
    case InequalityTag::WPKfull: return c.c_pk;
    case InequalityTag::WPKstrong: return c.c_spk;
    case InequalityTag::WPK: return c.c_pk_prime;
    case InequalityTag::WK: return c.c_k_prime;
    case InequalityTag::WKZfull: return c.c_k0;
    case InequalityTag::WPKZfull: return c.c_pk0;
    case InequalityTag::WPKzero: return c.c_pk0_prime;
    case InequalityTag::WPKL: return c.c_pkl_prime;
    case InequalityTag::strongpoincare: return c.c_sp;
    case InequalityTag::poincarelions: return c.c_pl;
    case InequalityTag::identity21:
    case InequalityTag::identity22: return 1.0;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Verification on a concrete field

namespace {

double integrate_sq(const Eigen::MatrixXd& rows, const Quadrature& q) {
  return q.integrate(rows.colwise().squaredNorm().transpose());
}

struct FieldData {
  int d = 0;
  Eigen::MatrixXd u;                // d x n
  Eigen::VectorXd mean;             // <u>
  std::vector<Eigen::VectorXd> du;  // index i*d + j: d_j u_i
  Differential diff;
  Eigen::VectorXd gdot;             // grad phi . u
  Eigen::MatrixXd p_all;            // P(u) = p_all x
  Eigen::MatrixXd p_phi;            // P_phi(u) = p_phi x
  Eigen::MatrixXd mean_du;          // <Du>
  int degree = 0;

  FieldData(const PolyVectorField& field, const VerificationContext& ctx) : diff(differentiate(field)) {
    const Quadrature& q = ctx.quadrature;
    d = field.dimension();
    degree = field.degree();
    u.resize(d, q.size());
    for (int i = 0; i < d; ++i) u.row(i) = node_values(field[i], q).transpose();
    mean = u * q.weights;
    du.resize(static_cast<std::size_t>(d) * d);
    mean_du.resize(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        du[i * d + j] = node_values(diff.full(i, j), q);
        mean_du(i, j) = q.integrate(du[i * d + j]);
      }
    gdot = q.gradients.cwiseProduct(u).colwise().sum().transpose();
    p_all = Eigen::MatrixXd::Zero(d, d);
    for (const auto& m : ctx.rotations.matrices) p_all += q.integrate(u.cwiseProduct(m * q.nodes).colwise().sum().transpose()) * m;
    p_phi = Eigen::MatrixXd::Zero(d, d);
    for (const auto& m : ctx.decomposition.r_phi)
      p_phi += q.integrate(u.cwiseProduct(m * q.nodes).colwise().sum().transpose()) * m;
  }

  Eigen::VectorXd sym(int i, int j) const { return 0.5 * (du[i * d + j] + du[j * d + i]); }
  Eigen::VectorXd antisym(int i, int j) const { return 0.5 * (du[i * d + j] - du[j * d + i]); }

  double ds_sq(const Quadrature& q) const {
    double s = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) s += q.integrate(sym(i, j).cwiseAbs2());
    return s;
  }
  // sum_ij ||d_j u_i - c_ij||^2
  double du_minus_sq(const Eigen::MatrixXd& c, const Quadrature& q) const {
    double s = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) s += q.integrate((du[i * d + j].array() - c(i, j)).square().matrix());
    return s;
  }
};

double dual_sq(const Eigen::VectorXd& nodal, const VerificationContext& ctx) {
  return dual_norm_sq(ctx.lambda, ctx.basis.project(nodal, ctx.quadrature));
}

InequalityResult evaluate(InequalityTag tag, const FieldData& f, const VerificationContext& ctx,
                          std::optional<ConstantChoice> choice) {
  const Quadrature& q = ctx.quadrature;
  const ConstantsReport& k = ctx.constants;
  const int d = f.d;
  InequalityResult r;
  r.tag = tag;
  r.constant = choice ? choice->value : chain_constant(tag, k);
  r.kind = choice ? choice->kind : ConstantKind::chain;

  if (is_zeroth_order(tag) && f.degree > ctx.basis.degree)
    throw Error("inequalities", "verify",
                std::string(to_string(tag)) + " needs u of degree <= " + std::to_string(ctx.basis.degree) +
                    " (got " + std::to_string(f.degree) + ")",
                "raise the basis degree N");

  const Eigen::MatrixXd centred = f.u.colwise() - f.mean;
  auto residual_all = [&] { return centred - f.p_all * q.nodes; };  // u - <u> - P(u)
  double base = 0.0;

  switch (tag) {
    case InequalityTag::WKfull: {
      const Eigen::MatrixXd a = 0.5 * (f.mean_du - f.mean_du.transpose());
      r.lhs = f.du_minus_sq(a, q);
      base = f.ds_sq(q);
      r.rhs = r.constant * base;
      break;
    }
    case InequalityTag::WPKfull: {
      r.lhs = integrate_sq(residual_all(), q);
      base = f.ds_sq(q);
      r.rhs = r.constant * base;
      break;
    }
    case InequalityTag::WPKstrong: {
      const Eigen::MatrixXd w = residual_all();
      const Eigen::VectorXd weight = weight_values(q, Weight::gradphi_sq);
      r.lhs = q.integrate(w.colwise().squaredNorm().transpose().cwiseProduct(weight));
      base = f.ds_sq(q);
      r.rhs = r.constant * base;
      break;
    }
    case InequalityTag::WPK: {
      r.lhs = integrate_sq(f.u - f.p_phi * q.nodes, q);
      base = f.ds_sq(q);
      r.rhs = r.constant * base + 2.0 * k.c_rv * q.integrate(f.gdot.cwiseAbs2());
      if (ctx.decomposition.r_phi_c.empty() && f.mean.norm() > 0.0)
        r.note = "C_RV = 0 by convention while <u> != 0; the mean is not controlled by the right-hand side";
      break;
    }
    case InequalityTag::WK: {
      r.lhs = f.du_minus_sq(project_Mphi(f.mean_du, ctx.decomposition), q);
      base = f.ds_sq(q);
      r.rhs = r.constant * base + 2.0 * k.c_rd * q.integrate(f.gdot.cwiseAbs2());
      break;
    }
    case InequalityTag::WPKL: {
      r.lhs = integrate_sq(centred - f.p_phi * q.nodes, q);
      base = f.ds_sq(q);
      const Eigen::VectorXd gc = f.gdot - q.gradients.transpose() * f.mean;
      r.rhs = r.constant * base + 2.0 * k.c_rvl * q.integrate(gc.cwiseAbs2());
      break;
    }
    case InequalityTag::WKZfull: {
      const Eigen::MatrixXd a = 0.5 * (f.mean_du - f.mean_du.transpose());
      double lhs = 0.0, rhs_form = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          lhs += dual_sq(f.du[i * d + j].array() - a(i, j), ctx);
          rhs_form += dual_sq(f.sym(i, j), ctx);
        }
      r.lhs = lhs;
      base = rhs_form;
      r.rhs = r.constant * base;
      r.note = "Galerkin estimate";
      break;
    }
    case InequalityTag::WPKZfull:
    case InequalityTag::WPKzero: {
      double rhs_form = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) rhs_form += dual_sq(f.sym(i, j), ctx);
      base = rhs_form;
      if (tag == InequalityTag::WPKZfull) {
        r.lhs = integrate_sq(residual_all(), q);
        r.rhs = r.constant * base;
      } else {
        r.lhs = integrate_sq(f.u - f.p_phi * q.nodes, q);
        r.rhs = r.constant * base + 2.0 * k.c_rv0 * dual_sq(f.gdot, ctx);
        if (ctx.decomposition.r_phi_c.empty() && f.mean.norm() > 0.0)
          r.note = "C_RV0 = 0 by convention while <u> != 0; ";
      }
      r.note += "Galerkin estimate";
      break;
    }
    case InequalityTag::strongpoincare: {
      const Eigen::VectorXd weight = weight_values(q, Weight::gradphi_sq);
      r.lhs = q.integrate(centred.colwise().squaredNorm().transpose().cwiseProduct(weight));
      base = 0.0;
      for (const auto& v : f.du) base += q.integrate(v.cwiseAbs2());
      r.rhs = r.constant * base;
      r.note = "summed over coordinates";
      break;
    }
    case InequalityTag::poincarelions: {
      r.lhs = integrate_sq(centred, q);
      base = 0.0;
      for (const auto& v : f.du) base += dual_sq(v, ctx);
      r.rhs = r.constant * base;
      const bool upper = holds_with_slack(base, r.constant * r.lhs);
      r.note = "summed over coordinates; upper bound ||Lambda^{-1/2} grad f||^2 <= C_PL ||f - <f>||^2 " +
               std::string(upper ? "holds" : "fails") + "; Galerkin estimate";
      r.holds = upper && holds_with_slack(r.lhs, r.rhs);
      r.ratio = base > 0.0 ? r.lhs / base : (r.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      return r;
    }
    case InequalityTag::identity21:
    case InequalityTag::identity22: {
      double full = 0.0, sym = 0.0, anti = 0.0, hess = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          full += q.integrate(f.du[i * d + j].cwiseAbs2());
          sym += q.integrate(f.sym(i, j).cwiseAbs2());
          anti += q.integrate(f.antisym(i, j).cwiseAbs2());
          hess += q.integrate(q.hessians.row(i + j * d).transpose().cwiseProduct(f.u.row(i).transpose())
                                  .cwiseProduct(f.u.row(j).transpose()));
        }
      Eigen::VectorXd div = Eigen::VectorXd::Zero(q.size());
      for (int i = 0; i < d; ++i) div += f.du[i * d + i];
      const double phidiv = q.integrate((div - f.gdot).cwiseAbs2());
      if (tag == InequalityTag::identity21) {
        r.lhs = anti + phidiv;
        r.rhs = sym + hess;
        r.holds = std::abs(r.lhs - r.rhs) <= kInequalitySlack * (1.0 + std::abs(r.rhs));
        r.note = "identity; holds means |lhs - rhs| <= 1e-9 (1 + |rhs|)";
      } else {
        r.lhs = full;
        r.rhs = 2.0 * sym + hess;
        r.holds = holds_with_slack(r.lhs, r.rhs);
      }
      r.ratio = r.rhs != 0.0 ? r.lhs / r.rhs : 0.0;
      return r;
    }
  }
  r.holds = holds_with_slack(r.lhs, r.rhs);
  r.ratio = base > 0.0 ? r.lhs / base : (r.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  return r;
}

}  // namespace

InequalityResult verify_inequality(InequalityTag tag, const PolyVectorField& u, const VerificationContext& ctx,
                                   std::optional<ConstantChoice> constant) {
  if (u.dimension() != ctx.potential.dimension())
    throw Error("inequalities", "verify", "field dimension differs from the potential");
  return evaluate(tag, FieldData(u, ctx), ctx, constant);
}

std::vector<InequalityResult> verify_all(const PolyVectorField& u, const VerificationContext& ctx) {
  if (u.dimension() != ctx.potential.dimension())
    throw Error("inequalities", "verify", "field dimension differs from the potential");
  const FieldData f(u, ctx);
  std::vector<InequalityResult> out;
  for (auto tag : all_inequalities()) out.push_back(evaluate(tag, f, ctx, std::nullopt));
  return out;
}

// ---------------------------------------------------------------------------
// Quadratic forms and empirical constants

QuadraticForms assemble_forms(const VerificationContext& ctx) {
  const GalerkinBasis& b = ctx.basis;
  const Quadrature& q = ctx.quadrature;
  const int d = b.dimension;
  const int n = b.size();
  const int nv = d * n;
  QuadraticForms f;

  const Eigen::MatrixXd minv = lambda_power(ctx.lambda, -1.0);
  std::vector<Eigen::MatrixXd> dv(d);
  for (int i = 0; i < d; ++i) dv[i] = b.derivative_values(i);
  std::vector<std::vector<Eigen::MatrixXd>> h(d, std::vector<Eigen::MatrixXd>(d));
  std::vector<std::vector<Eigen::MatrixXd>> h0(d, std::vector<Eigen::MatrixXd>(d));
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      h[k][l] = dv[k].transpose() * q.weights.asDiagonal() * dv[l];
      h0[k][l] = b.derivatives[k].transpose() * minv * b.derivatives[l];
    }
  Eigen::MatrixXd trace = Eigen::MatrixXd::Zero(n, n), trace0 = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < d; ++k) {
    trace += h[k][k];
    trace0 += h0[k][k];
  }

  f.identity = Eigen::MatrixXd::Identity(nv, nv);
  f.mean = Eigen::MatrixXd::Zero(nv, nv);
  for (int i = 0; i < d; ++i) f.mean(i * n, i * n) = 1.0;

  auto rotation_form = [&](const std::vector<Eigen::MatrixXd>& mats) {
    Eigen::MatrixXd form = Eigen::MatrixXd::Zero(nv, nv);
    for (const auto& m : mats) {
      const Eigen::MatrixXd mx = m * q.nodes;
      Eigen::VectorXd rho(nv);
      for (int i = 0; i < d; ++i) rho.segment(i * n, n) = b.project(mx.row(i).transpose(), q);
      form += rho * rho.transpose();
    }
    return form;
  };
  f.rotations = rotation_form(ctx.rotations.matrices);
  f.rotations_phi = rotation_form(ctx.decomposition.r_phi);

  f.du = Eigen::MatrixXd::Zero(nv, nv);
  f.ds = Eigen::MatrixXd::Zero(nv, nv);
  f.du0 = Eigen::MatrixXd::Zero(nv, nv);
  f.ds0 = Eigen::MatrixXd::Zero(nv, nv);
  for (int i = 0; i < d; ++i) {
    f.du.block(i * n, i * n, n, n) = trace;
    f.du0.block(i * n, i * n, n, n) = trace0;
    for (int j = 0; j < d; ++j) {
      f.ds.block(i * n, j * n, n, n) = 0.5 * h[j][i] + (i == j ? Eigen::MatrixXd(0.5 * trace) : Eigen::MatrixXd::Zero(n, n));
      f.ds0.block(i * n, j * n, n, n) =
          0.5 * h0[j][i] + (i == j ? Eigen::MatrixXd(0.5 * trace0) : Eigen::MatrixXd::Zero(n, n));
    }
  }

  // Means of derivatives: t(l, a) = <d_l f_a>.
  Eigen::MatrixXd t(d, n);
  for (int l = 0; l < d; ++l) t.row(l) = (q.weights.transpose() * dv[l]);
  // Row (k, l) of <Du> as a functional of the coefficients.
  auto mean_du_row = [&](int k, int l) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    row.segment(k * n, n) = t.row(l).transpose();
    return row;
  };
  f.mean_antisym = Eigen::MatrixXd::Zero(nv, nv);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      const Eigen::VectorXd row = 0.5 * (mean_du_row(k, l) - mean_du_row(l, k));
      f.mean_antisym += row * row.transpose();
    }
  f.mean_mphi = Eigen::MatrixXd::Zero(nv, nv);
  for (const auto& bm : ctx.decomposition.m_phi) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) row += bm(k, l) * mean_du_row(k, l);
    f.mean_mphi += row * row.transpose();
  }

  f.gradphi_dot = Eigen::MatrixXd::Zero(nv, nv);
  Eigen::MatrixXd pg(n, nv);  // coefficients of grad phi . u
  for (int i = 0; i < d; ++i) {
    const Eigen::VectorXd gi = q.gradients.row(i).transpose();
    pg.middleCols(i * n, n) = b.values.transpose() * q.weights.cwiseProduct(gi).asDiagonal() * b.values;
    for (int j = 0; j < d; ++j) {
      const Eigen::VectorXd w = q.weights.cwiseProduct(gi).cwiseProduct(q.gradients.row(j).transpose());
      f.gradphi_dot.block(i * n, j * n, n, n) = b.values.transpose() * w.asDiagonal() * b.values;
    }
  }
  f.gradphi_dot0 = pg.transpose() * minv * pg;
  const Eigen::VectorXd gsq = q.weights.cwiseProduct(q.gradients.colwise().squaredNorm().transpose());
  const Eigen::MatrixXd k_scalar = b.values.transpose() * gsq.asDiagonal() * b.values;
  f.gradphi_sq = Eigen::MatrixXd::Zero(nv, nv);
  for (int i = 0; i < d; ++i) f.gradphi_sq.block(i * n, i * n, n, n) = k_scalar;

  f.s_identity = Eigen::MatrixXd::Identity(n, n);
  f.s_mean = Eigen::MatrixXd::Zero(n, n);
  f.s_mean(0, 0) = 1.0;
  f.s_grad = trace;
  f.s_grad0 = trace0;
  f.s_gradphi_sq = k_scalar;
  return f;
}

EmpiricalConstant max_pencil_quotient(const Eigen::MatrixXd& lhs, const Eigen::MatrixXd& rhs, double threshold) {
  EmpiricalConstant out;
  const Eigen::MatrixXd r = 0.5 * (rhs + rhs.transpose());
  const Eigen::MatrixXd l = 0.5 * (lhs + lhs.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r);
  const Eigen::VectorXd lam = es.eigenvalues();
  const double cut = threshold * std::max(1.0, lam.maxCoeff());
  int k = 0;
  while (k < lam.size() && lam[k] < cut) ++k;
  out.kernel_dimension = k;
  const int m = static_cast<int>(lam.size()) - k;
  if (m == 0) throw Error("inequalities", "empirical", "right-hand form vanishes on the whole span");
  const Eigen::MatrixXd uk = es.eigenvectors().leftCols(k);
  const Eigen::MatrixXd ur = es.eigenvectors().rightCols(m);
  Eigen::MatrixXd s = ur.transpose() * l * ur;
  Eigen::MatrixXd shift = Eigen::MatrixXd::Zero(k, m);  // kernel component of the optimizer per range vector

  if (k > 0) {
    const double lscale = std::max(1.0, l.cwiseAbs().maxCoeff());
    const Eigen::MatrixXd lkk = uk.transpose() * l * uk;
    const Eigen::MatrixXd lkr = uk.transpose() * l * ur;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ek(0.5 * (lkk + lkk.transpose()));
    for (int j = 0; j < k; ++j) {
      const double mu = ek.eigenvalues()[j];
      const Eigen::VectorXd z = ek.eigenvectors().col(j);
      const Eigen::RowVectorXd coupling = z.transpose() * lkr;
      if (mu > 1e-8 * lscale) {
        out.finite = false;
        out.diagnostic = "left-hand form is positive on the kernel of the right-hand form";
        out.value = std::numeric_limits<double>::infinity();
        out.extremizer = uk * z;
        return out;
      }
      if (mu >= -1e-8 * lscale) {
        if (coupling.cwiseAbs().maxCoeff() > 1e-7 * lscale) {
          out.finite = false;
          out.diagnostic = "left-hand form couples the right-hand kernel to its range";
          out.value = std::numeric_limits<double>::infinity();
          out.extremizer = uk * z;
          return out;
        }
        continue;
      }
      // Optimal kernel component along z is -(z^T L_kr y) / mu.
      s -= coupling.transpose() * coupling / mu;
      shift += -z * coupling / mu;
    }
  }
  const Eigen::VectorXd inv_sqrt = lam.tail(m).cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd reduced = inv_sqrt.asDiagonal() * s * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> er(0.5 * (reduced + reduced.transpose()));
  out.value = er.eigenvalues()[m - 1];
  const Eigen::VectorXd y = inv_sqrt.cwiseProduct(er.eigenvectors().col(m - 1));
  out.extremizer = ur * y + (k > 0 ? Eigen::VectorXd(uk * (shift * y)) : Eigen::VectorXd::Zero(ur.rows()));
  return out;
}

const std::vector<InequalityTag>& empirical_tags() {
  static const std::vector<InequalityTag> tags = {
      InequalityTag::WKfull, InequalityTag::WPKfull,  InequalityTag::WPKstrong, InequalityTag::WPK,
      InequalityTag::WK,     InequalityTag::WPKL,     InequalityTag::WKZfull,   InequalityTag::WPKZfull,
      InequalityTag::WPKzero, InequalityTag::strongpoincare, InequalityTag::poincarelions,
  };
  return tags;
}

EmpiricalConstant empirical_constant(InequalityTag tag, const QuadraticForms& f, const ConstantsReport& c) {
  const Eigen::MatrixXd centre = f.identity - f.mean;
  const Eigen::MatrixXd residual = f.identity - f.mean - f.rotations;  // ||u - <u> - P(u)||^2
  EmpiricalConstant e;
  switch (tag) {
    case InequalityTag::WKfull: e = max_pencil_quotient(f.du - f.mean_antisym, f.ds); break;
    case InequalityTag::WPKfull: e = max_pencil_quotient(residual, f.ds); break;
    case InequalityTag::WPKstrong: {
      // residual is the projector onto the complement of constants and rotations.
      e = max_pencil_quotient(residual * (f.identity + f.gradphi_sq) * residual, f.ds);
      break;
    }
    case InequalityTag::WPK:
      e = max_pencil_quotient(f.identity - f.rotations_phi - 2.0 * c.c_rv * f.gradphi_dot, f.ds);
      break;
    case InequalityTag::WK: e = max_pencil_quotient(f.du - f.mean_mphi - 2.0 * c.c_rd * f.gradphi_dot, f.ds); break;
    case InequalityTag::WPKL:
      e = max_pencil_quotient(centre - f.rotations_phi - 2.0 * c.c_rvl * centre * f.gradphi_dot * centre, f.ds);
      break;
    case InequalityTag::WKZfull: e = max_pencil_quotient(f.du0 - f.mean_antisym, f.ds0); break;
    case InequalityTag::WPKZfull: e = max_pencil_quotient(residual, f.ds0); break;
    case InequalityTag::WPKzero:
      e = max_pencil_quotient(f.identity - f.rotations_phi - 2.0 * c.c_rv0 * f.gradphi_dot0, f.ds0);
      break;
    case InequalityTag::strongpoincare: {
      const Eigen::MatrixXd sc = f.s_identity - f.s_mean;
      e = max_pencil_quotient(sc * (f.s_identity + f.s_gradphi_sq) * sc, f.s_grad);
      break;
    }
    case InequalityTag::poincarelions:
      e = max_pencil_quotient(f.s_identity - f.s_mean, f.s_grad0);
      break;
    default:
      throw Error("inequalities", "empirical", std::string("no empirical pencil for ") + to_string(tag));
  }
  e.tag = tag;
  return e;
}

// ---------------------------------------------------------------------------
// Gaussian certificates

PolyVectorField gaussian_extremal_field(int d) {
  if (d < 2) throw Error("inequalities", "gaussian_certificates", "needs d >= 2");
  PolyVectorField u(d);
  Multiindex zero(d, 0), x2sq(d, 0), x1x2(d, 0);
  x2sq[1] = 2;
  x1x2[0] = 1;
  x1x2[1] = 1;
  u[0].add_term(zero, 1.0);
  u[0].add_term(x2sq, -1.0);
  u[1].add_term(x1x2, 1.0);
  return u;
}

std::vector<CertificateValue> gaussian_certificates(const Quadrature& q, double tol) {
  const int d = q.dimension;
  const PolyVectorField u = gaussian_extremal_field(d);
  const RotationBasis rb = rotation_basis(q, d);
  const Differential du = differentiate(u);
  const IdentityTerms t = identity_terms(u, q);
  std::vector<CertificateValue> out;
  auto add = [&](std::string name, double v, double expected) {
    out.push_back({std::move(name), v, expected, std::abs(v - expected) <= tol});
  };
  add("|<u>|", mean(u, q).norm(), 0.0);
  add("||u||^2", weighted_inner(u, u, q), 3.0);
  add("|P(u)|", project_R(u, rb, q).coefficients.norm(), 0.0);
  add("|P(Du)|", project_Ma(du.full, q).norm(), 0.0);
  add("||D^s u||^2", t.sym, 1.5);
  add("||D^a u||^2", t.antisym, 4.5);
  add("||Du||^2", t.full, 6.0);
  add("identity21 residual", t.first_lhs() - t.first_rhs(), 0.0);
  return out;
}

}  // namespace korn
