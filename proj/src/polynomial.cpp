#include "korn/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "korn/error.hpp"

namespace korn {

int total_degree(const Multiindex& m) { return std::accumulate(m.begin(), m.end(), 0); }

namespace {

void append_with_degree(int dim, int degree, int var, Multiindex& current,
                        std::vector<Multiindex>& out) {
  if (var == dim - 1) {
    current[var] = degree;
    out.push_back(current);
    return;
  }
  for (int e = degree; e >= 0; --e) {
    current[var] = e;
    append_with_degree(dim, degree - e, var + 1, current, out);
  }
  current[var] = 0;
}

}  // namespace

std::vector<Multiindex> graded_monomials(int dim, int max_degree) {
  std::vector<Multiindex> out;
  Multiindex current(dim, 0);
  for (int k = 0; k <= max_degree; ++k) append_with_degree(dim, k, 0, current, out);
  return out;
}

Polynomial::Polynomial(int dim) : dim_(dim) {
  if (dim < 1) throw Error("calculus", "polynomial", "dimension must be >= 1");
}

Polynomial Polynomial::constant(int dim, double value) {
  Polynomial p(dim);
  p.add_term(Multiindex(dim, 0), value);
  return p;
}

Polynomial Polynomial::monomial(const Multiindex& exponents, double coefficient) {
  Polynomial p(static_cast<int>(exponents.size()));
  p.add_term(exponents, coefficient);
  return p;
}

Polynomial Polynomial::coordinate(int dim, int i) {
  Multiindex m(dim, 0);
  m.at(i) = 1;
  return monomial(m);
}

int Polynomial::degree() const {
  int deg = -1;
  for (const auto& [m, c] : terms_) deg = std::max(deg, total_degree(m));
  return deg;
}

double Polynomial::coefficient(const Multiindex& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Multiindex& m, double coefficient) {
  if (static_cast<int>(m.size()) != dim_)
    throw Error("calculus", "polynomial", "multiindex length does not match dimension");
  if (std::any_of(m.begin(), m.end(), [](int e) { return e < 0; }))
    throw Error("calculus", "polynomial", "negative exponent");
  if (coefficient == 0.0) return;
  auto [it, inserted] = terms_.emplace(m, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::max_abs_coefficient() const {
  double mx = 0.0;
  for (const auto& [m, c] : terms_) mx = std::max(mx, std::abs(c));
  return mx;
}

Polynomial Polynomial::pruned(double tol) const {
  Polynomial out(dim_);
  for (const auto& [m, c] : terms_)
    if (std::abs(c) > tol) out.terms_.emplace(m, c);
  return out;
}

Polynomial Polynomial::derivative(int i) const {
  Polynomial out(dim_);
  for (const auto& [m, c] : terms_) {
    if (m[i] == 0) continue;
    Multiindex dm = m;
    dm[i] -= 1;
    out.add_term(dm, c * m[i]);
  }
  return out;
}

Polynomial Polynomial::translated(std::span<const double> shift) const {
  if (static_cast<int>(shift.size()) != dim_)
    throw Error("calculus", "translate", "shift length does not match dimension");
  // (x_i + s_i)^e = sum_k binom(e,k) s_i^{e-k} x_i^k, expanded one variable at a time.
  Polynomial current = *this;
  for (int i = 0; i < dim_; ++i) {
    if (shift[i] == 0.0) continue;
    Polynomial next(dim_);
    for (const auto& [m, c] : current.terms_) {
      const int e = m[i];
      double binom = 1.0;
      for (int k = e; k >= 0; --k) {
        // binom(e, k) built incrementally from k = e downward.
        if (k < e) binom = binom * (k + 1) / (e - k);
        Multiindex mk = m;
        mk[i] = k;
        next.add_term(mk, c * binom * std::pow(shift[i], e - k));
      }
    }
    current = std::move(next);
  }
  return current;
}

double Polynomial::operator()(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = c;
    for (int i = 0; i < dim_; ++i)
      for (int e = 0; e < m[i]; ++e) t *= x[i];
    sum += t;
  }
  return sum;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (other.dim_ != dim_) throw Error("calculus", "polynomial", "dimension mismatch in sum");
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  if (other.dim_ != dim_) throw Error("calculus", "polynomial", "dimension mismatch in difference");
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.dim_ != b.dim_) throw Error("calculus", "polynomial", "dimension mismatch in product");
  Polynomial out(a.dim_);
  Multiindex m(a.dim_);
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) {
      for (int i = 0; i < a.dim_; ++i) m[i] = ma[i] + mb[i];
      out.add_term(m, ca * cb);
    }
  return out;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c;
    for (int i = 0; i < dim_; ++i)
      if (m[i] > 0) os << "*x" << (i + 1) << (m[i] > 1 ? "^" + std::to_string(m[i]) : "");
  }
  return os.str();
}

NodeEvaluator::NodeEvaluator(const Eigen::MatrixXd& points, int max_degree)
    : dim_(static_cast<int>(points.rows())), max_degree_(max_degree), n_(points.cols()) {
  powers_.reserve(dim_);
  for (int i = 0; i < dim_; ++i) {
    Eigen::MatrixXd table(max_degree_ + 1, n_);
    table.row(0).setOnes();
    for (int e = 1; e <= max_degree_; ++e)
      table.row(e) = table.row(e - 1).cwiseProduct(points.row(i));
    powers_.push_back(std::move(table));
  }
}

Eigen::VectorXd NodeEvaluator::monomial(const Multiindex& m) const {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n_);
  for (int i = 0; i < dim_; ++i) {
    if (m[i] == 0) continue;
    if (m[i] > max_degree_)
      throw Error("calculus", "evaluate", "monomial degree exceeds evaluator table",
                  "build the evaluator with a larger max degree");
    v.array() *= powers_[i].row(m[i]).transpose().array();
  }
  return v;
}

Eigen::VectorXd NodeEvaluator::evaluate(const Polynomial& p) const {
  if (p.dimension() != dim_) throw Error("calculus", "evaluate", "dimension mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
  for (const auto& [m, c] : p.terms()) out.noalias() += c * monomial(m);
  return out;
}

CoefficientStream::CoefficientStream(std::uint64_t seed) : state_(seed) {}

std::uint64_t CoefficientStream::next_word() {
  // splitmix64
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double CoefficientStream::next() {
  const double unit = static_cast<double>(next_word() >> 11) * 0x1.0p-53;
  return 2.0 * unit - 1.0;
}

Polynomial random_polynomial(int dim, int max_degree, CoefficientStream& rng) {
  Polynomial p(dim);
  for (const auto& m : graded_monomials(dim, max_degree)) p.add_term(m, rng.next());
  return p;
}

}  // namespace korn
