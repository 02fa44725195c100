#include "korn/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include "korn/analysis.hpp"
#include "korn/error.hpp"
#include "korn/kinetic.hpp"

namespace korn {

using nlohmann::json;

const std::vector<std::string>& command_vocabulary() {
  static const std::vector<std::string> v = {"constants", "spectrum",       "rigidity", "verify",
                                             "empirical", "gaussian-check", "bgk-check"};
  return v;
}

namespace {

constexpr int kSchemaVersion = 1;

Error config_error(const std::string& message, const std::string& hint = {}) {
  return Error("cli", "config", message, hint);
}

// JSON has no infinity; non-finite numbers become strings.
json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
  return a;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vector_json(m.row(i).transpose()));
  return a;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw config_error(std::string("bad value for '") + key + "': " + e.what());
  }
}

json rigidity_json(const RigidityResult& r) {
  json j = {{"constant", number(r.constant)}, {"inverse", number(r.inverse)}, {"empty", r.empty}};
  if (!r.empty) {
    j["minimizer_matrix"] = matrix_json(r.a);
    j["minimizer_translation"] = vector_json(r.b);
  }
  return j;
}

json result_json(const InequalityResult& r) {
  return {{"tag", to_string(r.tag)}, {"lhs", number(r.lhs)},         {"rhs", number(r.rhs)},
          {"constant", number(r.constant)}, {"constant_kind", to_string(r.kind)}, {"ratio", number(r.ratio)},
          {"holds", r.holds}, {"note", r.note}};
}

class Runner {
 public:
  Runner(const RunConfig& c, RunOutcome& o) : cfg_(c), out_(o) {}

  void execute() {
    AnalysisOptions opt;
    opt.quadrature_order = cfg_.quadrature_order;
    opt.basis_degree = cfg_.basis_degree;
    opt.field_degree = cfg_.field_degree;
    opt.nullspace_tolerance = cfg_.nullspace_tolerance;
    a_ = std::make_unique<Analysis>(cfg_.potential, opt);

    json& r = out_.report;
    r["schema_version"] = kSchemaVersion;
    r["timestamp"] = utc_timestamp();
    r["config"] = {{"family", to_string(cfg_.potential.family)},
                   {"params", cfg_.potential.params},
                   {"dimension", cfg_.potential.dimension},
                   {"quadrature_order", a_->quadrature.order},
                   {"basis_degree", cfg_.basis_degree},
                   {"field_degree", cfg_.field_degree},
                   {"nullspace_tolerance", cfg_.nullspace_tolerance},
                   {"seed", cfg_.seed},
                   {"field_count", cfg_.field_count},
                   {"commands", cfg_.commands}};
    r["measure"] = measure_json();
    r["commands"] = json::object();

    std::ostringstream spectra;
    spectra << "operator,index,eigenvalue\n";
    spectra_ = &spectra;
    std::ostringstream ineq;
    ineq << "field,tag,lhs,rhs,constant,constant_kind,ratio,holds\n";
    ineq_ = &ineq;

    for (const auto& name : command_vocabulary()) {
      if (std::find(cfg_.commands.begin(), cfg_.commands.end(), name) == cfg_.commands.end()) continue;
      if (name == "constants") r["commands"][name] = constants();
      if (name == "spectrum") r["commands"][name] = spectrum();
      if (name == "rigidity") r["commands"][name] = rigidity();
      if (name == "verify") r["commands"][name] = verify();
      if (name == "empirical") r["commands"][name] = empirical();
      if (name == "gaussian-check") r["commands"][name] = gaussian_check();
      if (name == "bgk-check") r["commands"][name] = bgk_check();
    }
    r["all_ok"] = out_.all_ok;
    r["failures"] = out_.failures;
    out_.spectra_csv = spectra.str();
    out_.inequalities_csv = ineq.str();
  }

 private:
  void fail(const std::string& what) {
    out_.all_ok = false;
    out_.failures.push_back(what);
  }

  json measure_json() const {
    const Quadrature& q = a_->quadrature;
    const RegularityConstants& rc = a_->regularity;
    return {{"quadrature",
             {{"order", q.order},
              {"nodes", q.size()},
              {"exactness_degree", q.exactness_degree},
              {"exact", q.exact},
              {"mass_defect", q.mass_defect}}},
            {"regularity",
             {{"C_phi", rc.c_phi},
              {"C_phi_prime", rc.c_phi_prime},
              {"C_phi_second", rc.c_phi_second},
              {"method", rc.method == ConstantMethod::closed_form ? "closed-form" : "node-supremum"},
              {"certified", rc.certified},
              {"growth_detected", rc.growth_detected}}},
            {"offset", a_->potential.offset()},
            {"radial", a_->potential.radial()}};
  }

  json constants() {
    json entries = json::array();
    for (const auto& e : a_->constants.entries())
      entries.push_back({{"name", e.name}, {"value", number(e.value)}, {"provenance", e.provenance}});
    return {{"constants", entries},
            {"rigidity", rigidity()},
            {"poincare_provenance", a_->poincare.provenance}};
  }

  json spectrum() {
    const GalerkinBasis& b = a_->basis;
    const Quadrature& q = a_->quadrature;
    const OperatorMatrix ds = assemble_vector_operator(b, q, OperatorTag::deltaS);
    const OperatorMatrix dsp = assemble_vector_operator(b, q, OperatorTag::deltaSphi);
    auto op = [&](const char* name, const OperatorMatrix& m) {
      const Eigen::VectorXd s = m.spectrum();
      for (Eigen::Index i = 0; i < s.size(); ++i) *spectra_ << name << ',' << i << ',' << fmt(s[i]) << '\n';
      return json{{"eigenvalues", vector_json(s)},
                  {"kernel_dimension", m.kernel_dimension()},
                  {"assembly_discrepancy", m.assembly_discrepancy}};
    };
    const PhiDecomposition& dec = a_->decomposition;
    return {{"basis", {{"degree", b.degree}, {"size", b.size()}, {"orthonormality_residual", b.orthonormality_residual}}},
            {"minus_delta_phi", op("minus_delta_phi", a_->lambda)},
            {"minus_delta_S", op("minus_delta_S", ds)},
            {"minus_delta_S_phi", op("minus_delta_S_phi", dsp)},
            {"gap", a_->gap.gap},
            {"C_P_estimate", a_->gap.c_p_estimate},
            {"C_P_estimate_note", "Galerkin lower bound on C_P"},
            {"R_phi",
             {{"dimension", dec.r_phi.size()},
              {"complement_dimension", dec.r_phi_c.size()},
              {"gram_eigenvalues", vector_json(dec.gram_eigenvalues)},
              {"gap_ratio", number(dec.gap_ratio)},
              {"ill_conditioned", dec.ill_conditioned},
              {"warning", dec.warning}}}};
  }

  json rigidity() {
    const RigidityReport& r = a_->rigidity;
    json j = {{"C_RV", rigidity_json(r.rv)},
              {"C_RD", rigidity_json(r.rd)},
              {"C_RV0", rigidity_json(r.rv0)},
              {"C_RVL", rigidity_json(r.rvl)}};
    const bool order = r.rv.constant <= r.rv0.constant * (1.0 + kInequalitySlack) + kInequalitySlack;
    j["C_RV_le_C_RV0"] = order;
    if (!order) fail("rigidity: C_RV > C_RV0");
    return j;
  }

  std::vector<PolyVectorField> fields() const {
    std::vector<PolyVectorField> out = cfg_.user_fields;
    CoefficientStream rng(cfg_.seed);
    for (int k = 0; k < cfg_.field_count; ++k) out.push_back(random_field(cfg_.potential.dimension, cfg_.field_degree, rng));
    return out;
  }

  json verify() {
    const VerificationContext ctx = a_->context();
    const auto all = fields();
    std::vector<std::pair<double, bool>> summary(all_inequalities().size(), {0.0, true});
    int skipped = 0, failures = 0;
    // Identities are equalities only under an exact rule; elsewhere the
    // residual measures quadrature error and is reported, not judged.
    const bool judge_identities = a_->quadrature.exact;
    double identity_residual = 0.0;
    json rows = json::array();
    for (std::size_t f = 0; f < all.size(); ++f) {
      const PolyVectorField& u = all[f];
      if (u.dimension() != cfg_.potential.dimension)
        throw Error("cli", "verify", "field " + std::to_string(f) + " has the wrong dimension");
      json per = json::array();
      for (std::size_t t = 0; t < all_inequalities().size(); ++t) {
        const InequalityTag tag = all_inequalities()[t];
        if (is_zeroth_order(tag) && u.degree() > a_->basis.degree) {
          ++skipped;
          continue;
        }
        const InequalityResult res = verify_inequality(tag, u, ctx);
        const bool identity = tag == InequalityTag::identity21 || tag == InequalityTag::identity22;
        if (identity && !judge_identities) {
          identity_residual = std::max(identity_residual, std::abs(res.lhs - res.rhs) / (1.0 + std::abs(res.rhs)));
          ++skipped;
          continue;
        }
        *ineq_ << f << ',' << to_string(tag) << ',' << fmt(res.lhs) << ',' << fmt(res.rhs) << ','
               << fmt(res.constant) << ',' << to_string(res.kind) << ',' << fmt(res.ratio) << ','
               << (res.holds ? "true" : "false") << '\n';
        summary[t].first = std::max(summary[t].first, res.ratio);
        if (!res.holds) {
          summary[t].second = false;
          ++failures;
          fail("verify: " + std::string(to_string(tag)) + " fails on field " + std::to_string(f));
        }
        per.push_back(result_json(res));
      }
      const bool schwarz = schwarz_vanishes(schwarz_residual(u));
      if (!schwarz) fail("verify: Schwarz residual nonzero on field " + std::to_string(f));
      rows.push_back({{"field", f}, {"degree", u.degree()}, {"schwarz_vanishes", schwarz}, {"results", per}});
    }
    json tags = json::array();
    for (std::size_t t = 0; t < all_inequalities().size(); ++t) {
      const InequalityTag tag = all_inequalities()[t];
      if (!judge_identities && (tag == InequalityTag::identity21 || tag == InequalityTag::identity22)) continue;
      tags.push_back({{"tag", to_string(all_inequalities()[t])},
                      {"max_ratio", number(summary[t].first)},
                      {"constant", number(chain_constant(all_inequalities()[t], a_->constants))},
                      {"all_hold", summary[t].second}});
    }
    json out = {{"field_count", all.size()}, {"failures", failures}, {"skipped", skipped},
                {"summary", tags}, {"fields", rows}};
    if (!judge_identities)
      out["identities_not_judged"] = {{"reason", "quadrature rule is not exact for this potential"},
                                      {"max_relative_residual", identity_residual}};
    return out;
  }

  json empirical() {
    const QuadraticForms forms = assemble_forms(a_->context());
    json out = json::array();
    for (auto tag : empirical_tags()) {
      const EmpiricalConstant e = empirical_constant(tag, forms, a_->constants);
      const double chain = chain_constant(tag, a_->constants);
      out.push_back({{"tag", to_string(tag)},
                     {"value", number(e.value)},
                     {"finite", e.finite},
                     {"kernel_dimension", e.kernel_dimension},
                     {"chain", number(chain)},
                     {"dominated_by_chain", e.value <= chain * (1.0 + kInequalitySlack)},
                     {"diagnostic", e.diagnostic},
                     {"note", "Galerkin lower bound on the best constant"}});
    }
    return {{"basis_degree", a_->basis.degree}, {"constants", out}};
  }

  json gaussian_check() {
    if (a_->potential.family() != Family::gaussian)
      throw Error("cli", "gaussian-check", "needs the standard gaussian family",
                  "set potential.family to \"gaussian\"");
    json out = json::array();
    for (const auto& c : gaussian_certificates(a_->quadrature)) {
      out.push_back({{"name", c.name}, {"value", c.value}, {"expected", c.expected}, {"matched", c.matched}});
      if (!c.matched) fail("gaussian-check: " + c.name);
    }
    return {{"certificates", out}};
  }

  static constexpr int kPhaseDegree = 3;

  json bgk_check() {
    const int d = cfg_.potential.dimension;
    const PhaseQuadrature pq = build_phase_quadrature(a_->quadrature, kPhaseDegree + 2, kPhaseDegree + 2);
    constexpr double kZero = 1e-10;
    json eq = json::array();
    auto classify = [&](const Eigen::MatrixXd& m, const char* space) {
      const double res = stationary_residual(PolyVectorField::linear(m), 1.0, pq);
      const double sym = std::sqrt(a_->quadrature.integrate(
          a_->quadrature.gradients.cwiseProduct(m * a_->quadrature.nodes).colwise().sum().transpose().cwiseAbs2()));
      const bool in_rphi = std::string(space) == "R_phi";
      const bool consistent = in_rphi ? res <= kZero : res > kZero;
      if (!consistent) fail(std::string("bgk-check: residual misclassifies an element of ") + space);
      eq.push_back({{"space", space}, {"matrix", matrix_json(m)}, {"residual", res},
                    {"grad_phi_dot_R_norm", sym}, {"consistent", consistent}});
    };
    for (const auto& m : a_->decomposition.r_phi) classify(m, "R_phi");
    for (const auto& m : a_->decomposition.r_phi_c) classify(m, "R_phi_complement");
    const double constant_res = stationary_residual(PolyVectorField(d), 1.0, pq);
    if (constant_res > kZero) fail("bgk-check: constants are not stationary");

    json diss = json::array();
    CoefficientStream rng(cfg_.seed ^ 0x9e3779b97f4a7c15ULL);
    const int count = std::min(cfg_.field_count, 10);
    for (int k = 0; k < count; ++k) {
      const PhaseField h = random_phase_field(d, kPhaseDegree, rng);
      const DissipationIdentity di = dissipation_identity(h, pq);
      const Eigen::VectorXd inv = collision_invariants(h, pq);
      const bool ok = std::abs(di.lhs - di.rhs) <= 1e-10 * (1.0 + std::abs(di.rhs)) && inv.cwiseAbs().maxCoeff() <= 1e-10;
      if (!ok) fail("bgk-check: dissipation identity or invariants fail on phase field " + std::to_string(k));
      diss.push_back({{"lhs", di.lhs}, {"rhs", di.rhs}, {"invariants", vector_json(inv)}, {"holds", ok}});
    }
    return {{"equilibria", eq}, {"constant_residual", constant_res}, {"dissipation", diss}};
  }

  const RunConfig& cfg_;
  RunOutcome& out_;
  std::unique_ptr<Analysis> a_;
  std::ostringstream* spectra_ = nullptr;
  std::ostringstream* ineq_ = nullptr;
};

}  // namespace

Polynomial polynomial_from_json(const json& j) {
  try {
    const int d = j.at("dimension").get<int>();
    Polynomial p(d);
    for (const auto& term : j.at("terms")) {
      const Multiindex m = term.at(0).get<Multiindex>();
      if (static_cast<int>(m.size()) != d || std::any_of(m.begin(), m.end(), [](int e) { return e < 0; }))
        throw config_error("monomial exponent list must have 'dimension' nonnegative entries");
      p.add_term(m, term.at(1).get<double>());
    }
    return p;
  } catch (const json::exception& e) {
    throw config_error(std::string("bad polynomial: ") + e.what(),
                       "expected {\"dimension\": d, \"terms\": [[[e1, ..., ed], coefficient], ...]}");
  }
}

json polynomial_to_json(const Polynomial& p) {
  json terms = json::array();
  for (const auto& [m, c] : p.terms()) terms.push_back({m, c});
  return {{"dimension", p.dimension()}, {"terms", terms}};
}

PolyVectorField field_from_json(const json& j) {
  try {
    const int d = j.at("dimension").get<int>();
    const auto& coords = j.at("coordinates");
    if (static_cast<int>(coords.size()) != d) throw config_error("a field needs 'dimension' coordinates");
    std::vector<Polynomial> comps;
    for (const auto& c : coords) comps.push_back(polynomial_from_json({{"dimension", d}, {"terms", c}}));
    return PolyVectorField(std::move(comps));
  } catch (const json::exception& e) {
    throw config_error(std::string("bad field: ") + e.what());
  }
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw config_error("configuration must be a JSON object");
  RunConfig c;
  if (!j.contains("potential")) throw config_error("missing 'potential'");
  const json& p = j.at("potential");
  c.potential.family = family_from_string(get_or<std::string>(p, "family", "gaussian"));
  c.potential.params = get_or<std::vector<double>>(p, "params", {});
  c.potential.dimension = get_or<int>(p, "dimension", 2);
  c.potential.normalization_order = get_or<int>(p, "normalization_order", c.potential.normalization_order);
  if (p.contains("polynomial")) c.potential.polynomial = polynomial_from_json(p.at("polynomial"));
  c.quadrature_order = get_or<int>(p, "quadrature_order", 0);
  c.basis_degree = get_or<int>(j, "basis_degree", c.basis_degree);
  c.field_degree = get_or<int>(j, "field_degree", c.field_degree);
  c.nullspace_tolerance = get_or<double>(j, "nullspace_tolerance", c.nullspace_tolerance);
  c.commands = get_or<std::vector<std::string>>(j, "commands", {});
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.field_count = get_or<int>(j, "field_count", c.field_count);
  c.out_dir = get_or<std::string>(j, "out", ".");
  if (j.contains("user_fields"))
    for (const auto& f : j.at("user_fields")) c.user_fields.push_back(field_from_json(f));

  if (c.commands.empty()) throw config_error("no commands given", "e.g. \"commands\": [\"constants\"]");
  for (const auto& cmd : c.commands)
    if (std::find(command_vocabulary().begin(), command_vocabulary().end(), cmd) == command_vocabulary().end())
      throw config_error("unknown command '" + cmd + "'",
                         "use constants, spectrum, rigidity, verify, empirical, gaussian-check or bgk-check");
  if (c.basis_degree < 1) throw config_error("basis_degree must be >= 1");
  if (c.field_degree < 0) throw config_error("field_degree must be >= 0");
  if (c.field_count < 0) throw config_error("field_count must be >= 0");
  if (c.quadrature_order < 0) throw config_error("quadrature_order must be >= 0");
  if (!(c.nullspace_tolerance > 0.0)) throw config_error("nullspace_tolerance must be positive");
  return c;
}

RunOutcome run(const RunConfig& config) {
  RunOutcome out;
  Runner(config, out).execute();
  return out;
}

void write_outputs(const RunOutcome& outcome, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream f(out_dir / name);
    if (!f) throw Error("cli", "write", std::string("cannot open ") + (out_dir / name).string());
    f << text;
  };
  write("report.json", outcome.report.dump(2) + "\n");
  write("spectra.csv", outcome.spectra_csv);
  write("inequalities.csv", outcome.inequalities_csv);
}

}  // namespace korn
