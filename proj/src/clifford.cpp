#include "cliffpen/clifford.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace cliffpen {
namespace {

constexpr double kAlgebraTol = 1e-10;

// Cayley-Dickson product on R^(2^p): (a,b)(c,d) = (ac - conj(d) b, d a + b conj(c)).
using Element = std::vector<int>;

Element conj(const Element& x) {
  Element r(x.size());
  r[0] = x[0];
  for (std::size_t i = 1; i < x.size(); ++i) r[i] = -x[i];
  return r;
}

Element add(const Element& x, const Element& y, int sign = 1) {
  Element r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + sign * y[i];
  return r;
}

Element multiply(const Element& x, const Element& y) {
  const std::size_t n = x.size();
  if (n == 1) return {x[0] * y[0]};
  const std::size_t h = n / 2;
  const Element a(x.begin(), x.begin() + h), b(x.begin() + h, x.end());
  const Element c(y.begin(), y.begin() + h), d(y.begin() + h, y.end());
  Element lo = add(multiply(a, c), multiply(conj(d), b), -1);
  Element hi = add(multiply(d, a), multiply(b, conj(c)));
  lo.insert(lo.end(), hi.begin(), hi.end());
  return lo;
}

// Left multiplication by the unit e_unit in the Cayley-Dickson algebra of dim n.
Matrix left_multiplication(int n, int unit) {
  Matrix m = Matrix::Zero(n, n);
  Element e(n, 0);
  e[unit] = 1;
  for (int j = 0; j < n; ++j) {
    Element b(n, 0);
    b[j] = 1;
    const Element p = multiply(e, b);
    for (int i = 0; i < n; ++i) m(i, j) = p[i];
  }
  return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

std::vector<Matrix> table_generators(int r) {
  std::vector<Matrix> gens;
  if (r <= 3) {
    const int n = (r == 1) ? 2 : 4;
    for (int l = 1; l <= r; ++l) gens.push_back(left_multiplication(n, l));
    return gens;
  }
  if (r <= 7) {
    for (int l = 1; l <= r; ++l) gens.push_back(left_multiplication(8, l));
    return gens;
  }
  // r == 8: diag(J, -J) for the seven octonion units plus the block rotation.
  for (int l = 1; l <= 7; ++l) {
    const Matrix j = left_multiplication(8, l);
    Matrix g = Matrix::Zero(16, 16);
    g.topLeftCorner(8, 8) = j;
    g.bottomRightCorner(8, 8) = -j;
    gens.push_back(g);
  }
  Matrix e8 = Matrix::Zero(16, 16);
  e8.topRightCorner(8, 8) = -Matrix::Identity(8, 8);
  e8.bottomLeftCorner(8, 8) = Matrix::Identity(8, 8);
  gens.push_back(e8);
  return gens;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) throw AlgebraError(std::string(what) + " must be square");
}

}  // namespace

SkewForm SkewForm::from_matrix(Matrix m) {
  require_square(m, "skew form");
  if (max_abs(m + m.transpose()) > 1e-12) throw AlgebraError("skew form is not antisymmetric");
  return SkewForm{std::move(m)};
}

InnerProduct InnerProduct::from_gram(Matrix g) {
  require_square(g, "gram matrix");
  if (max_abs(g - g.transpose()) > 1e-12) throw AlgebraError("gram matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
  if (g.rows() == 0 || es.eigenvalues().minCoeff() <= 0.0)
    throw AlgebraError("gram matrix is not positive definite");
  return InnerProduct{std::move(g)};
}

InnerProduct InnerProduct::identity(int n) { return InnerProduct{Matrix::Identity(n, n)}; }

int radon_hurwitz_max_rank(long n) {
  if (n < 1) throw AlgebraError("radon_hurwitz_max_rank needs n >= 1");
  int twos = 0;
  while (n % 2 == 0) {
    n /= 2;
    ++twos;
  }
  const int a = twos / 4;
  const int c = twos % 4;
  return 8 * a + (1 << c) - 1;
}

int minimal_module_dim(int r) {
  if (r < 1) throw AlgebraError("Clifford rank must be positive");
  static constexpr int base[9] = {1, 2, 4, 4, 8, 8, 8, 8, 16};
  int dim = 1;
  while (r > 8) {
    dim *= 16;
    r -= 8;
  }
  return dim * base[r];
}

CliffordModule build_clifford_module(int r) {
  if (r < 1) throw AlgebraError("Clifford rank must be positive");
  std::vector<Matrix> gens;
  if (r <= 8) {
    gens = table_generators(r);
  } else {
    // Period-8 step: J_l (x) Omega and I (x) E_a with Omega = E_1...E_8.
    const CliffordModule lower = build_clifford_module(r - 8);
    const std::vector<Matrix> e = table_generators(8);
    Matrix omega = Matrix::Identity(16, 16);
    for (const Matrix& ea : e) omega = omega * ea;
    for (const Matrix& j : lower.generators) gens.push_back(kron(j, omega));
    const Matrix id = Matrix::Identity(lower.dim_v, lower.dim_v);
    for (const Matrix& ea : e) gens.push_back(kron(id, ea));
  }
  const int n = static_cast<int>(gens.front().rows());
  return CliffordModule{n, r, std::move(gens), Matrix::Identity(n, n)};
}

CliffordModule build_clifford_module(int r, int dim_v) {
  const int base = minimal_module_dim(r);
  if (dim_v < base || dim_v % base != 0)
    throw AlgebraError("dim_v = " + std::to_string(dim_v) + " carries no Cl_" + std::to_string(r) +
                       " module (minimal dimension " + std::to_string(base) + ")");
  CliffordModule m = build_clifford_module(r);
  const int copies = dim_v / base;
  if (copies == 1) return m;
  for (Matrix& g : m.generators) g = kron(Matrix::Identity(copies, copies), g);
  m.dim_v = dim_v;
  m.metric = Matrix::Identity(dim_v, dim_v);
  return m;
}

ModuleReport verify_module(std::span<const Matrix> generators, const Matrix& metric) {
  require_square(metric, "metric");
  const Eigen::Index n = metric.rows();
  for (const Matrix& j : generators)
    if (j.rows() != n || j.cols() != n) throw AlgebraError("generator dimension mismatch");

  double orth = 0.0, sq = 0.0, anti = 0.0;
  const Matrix id = Matrix::Identity(n, n);
  for (std::size_t l = 0; l < generators.size(); ++l) {
    const Matrix& j = generators[l];
    orth = std::max(orth, max_abs(j.transpose() * metric * j - metric));
    sq = std::max(sq, max_abs(j * j + id));
    for (std::size_t m = l + 1; m < generators.size(); ++m)
      anti = std::max(anti, max_abs(j * generators[m] + generators[m] * j));
  }
  ModuleReport rep;
  rep.orthogonal = orth <= kAlgebraTol;
  rep.square_minus_id = sq <= kAlgebraTol;
  rep.anticommute = anti <= kAlgebraTol;
  rep.max_violation = std::max({orth, sq, anti});
  return rep;
}

Matrix operator_of(const SkewForm& form, const InnerProduct& metric) {
  if (form.matrix.rows() != metric.gram.rows()) throw AlgebraError("form/metric dimension mismatch");
  return metric.gram.ldlt().solve(form.matrix);
}

double pencil_pairing(const SkewForm& omega, const SkewForm& eta, const InnerProduct& metric) {
  if (omega.matrix.rows() != eta.matrix.rows()) throw AlgebraError("form dimension mismatch");
  return -(operator_of(omega, metric) * operator_of(eta, metric)).trace();
}

namespace {

// lambda with A^2 = -lambda I, plus the defect relative to max(1, lambda).
std::pair<double, double> square_scalar(const Matrix& a) {
  const Matrix sq = a * a;
  const double n = static_cast<double>(a.rows());
  const double lambda = -sq.trace() / n;
  const double defect = max_abs(sq + lambda * Matrix::Identity(a.rows(), a.cols()));
  return {lambda, defect / std::max(1.0, std::abs(lambda))};
}

}  // namespace

CompatibilityReport is_compatible(const Pencil& pencil) {
  CompatibilityReport rep;
  std::vector<Matrix> ops;
  for (const SkewForm& f : pencil.forms) ops.push_back(operator_of(f, pencil.metric));
  bool ok = true;
  for (const Matrix& a : ops) {
    const auto [lambda, defect] = square_scalar(a);
    rep.lambda.push_back(lambda);
    rep.max_defect = std::max(rep.max_defect, defect);
    ok = ok && defect <= kAlgebraTol && lambda > 0.0;
  }
  for (std::size_t i = 0; i < ops.size(); ++i)
    for (std::size_t j = i + 1; j < ops.size(); ++j) {
      const auto [lambda, defect] = square_scalar(ops[i] + ops[j]);
      rep.pair_lambda.push_back(lambda);
      rep.max_defect = std::max(rep.max_defect, defect);
      ok = ok && defect <= kAlgebraTol && lambda >= 0.0;
    }
  rep.compatible = ok;
  return rep;
}

void validate_pencil(const Pencil& pencil) {
  const int n = pencil.dim();
  if (pencil.forms.empty()) throw AlgebraError("pencil has no forms");
  Matrix stacked(n * n, pencil.rank());
  for (int l = 0; l < pencil.rank(); ++l) {
    if (pencil.forms[l].matrix.rows() != n) throw AlgebraError("form/metric dimension mismatch");
    stacked.col(l) = pencil.forms[l].matrix.reshaped();
  }
  Eigen::JacobiSVD<Matrix> svd(stacked);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) <= 1e-12 * s(0)) throw AlgebraError("pencil forms are linearly dependent");

  auto nondegenerate = [&](const Matrix& m) {
    Eigen::JacobiSVD<Matrix> sv(m);
    const auto& v = sv.singularValues();
    return v(v.size() - 1) > 1e-12 * std::max(1.0, v(0));
  };
  for (int i = 0; i < pencil.rank(); ++i) {
    if (!nondegenerate(pencil.forms[i].matrix)) throw AlgebraError("pencil contains a degenerate form");
    for (int j = i + 1; j < pencil.rank(); ++j)
      if (!nondegenerate(pencil.forms[i].matrix + pencil.forms[j].matrix))
        throw AlgebraError("pencil contains a degenerate combination");
  }
}

CliffordModule cliffordize(const Pencil& pencil) {
  validate_pencil(pencil);
  const CompatibilityReport compat = is_compatible(pencil);
  if (!compat.compatible) throw AlgebraError("pencil is not compatible with its metric");

  const int r = pencil.rank();
  const double n = pencil.dim();
  std::vector<Matrix> ops;
  for (const SkewForm& f : pencil.forms) ops.push_back(operator_of(f, pencil.metric));

  // Normalised pairing so that A_omega^2 = -|omega|^2 I.
  auto pair = [n](const Matrix& a, const Matrix& b) { return -(a * b).trace() / n; };
  Matrix gram(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) gram(i, j) = pair(ops[i], ops[j]);
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo <= 0.0 || hi / lo > 1e12) throw AlgebraError("pencil Gram matrix is numerically singular");

  std::vector<Matrix> basis;
  for (int i = 0; i < r; ++i) {
    Matrix a = ops[i];
    for (const Matrix& e : basis) a -= pair(a, e) * e;
    basis.push_back(a / std::sqrt(pair(a, a)));
  }
  CliffordModule m{pencil.dim(), r, std::move(basis), pencil.metric.gram};
  const ModuleReport rep = verify_module(m);
  if (!rep.ok()) throw AlgebraError("cliffordized generators fail the Clifford relations");
  return m;
}

Pencil pencil_of(const CliffordModule& module) {
  Pencil p{{}, InnerProduct{module.metric}};
  for (const Matrix& j : module.generators) p.forms.push_back(SkewForm{module.metric * j});
  return p;
}

SymbolReport symbol_invertible(const CliffordModule& module, std::span<const double> lambda) {
  if (static_cast<int>(lambda.size()) != module.rank) throw AlgebraError("symbol rank mismatch");
  double norm2 = 0.0;
  for (double v : lambda) norm2 += v * v;
  if (norm2 == 0.0) return {false, 0.0};
  if (verify_module(module).ok()) return {true, std::sqrt(norm2)};
  Matrix sigma = Matrix::Zero(module.dim_v, module.dim_v);
  for (int l = 0; l < module.rank; ++l) sigma += lambda[l] * module.generators[l];
  Eigen::JacobiSVD<Matrix> svd(sigma);
  const double smin = svd.singularValues().minCoeff();
  return {smin > 1e-12 * svd.singularValues().maxCoeff(), smin};
}

CliffordModule to_standard_metric(const CliffordModule& module) {
  Eigen::LLT<Matrix> llt(module.metric);
  if (llt.info() != Eigen::Success) throw AlgebraError("module metric is not positive definite");
  const Matrix r = llt.matrixU();
  CliffordModule out = module;
  for (Matrix& j : out.generators) j = r * j * r.inverse();
  out.metric = Matrix::Identity(module.dim_v, module.dim_v);
  return out;
}

}  // namespace cliffpen
