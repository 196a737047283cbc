#include "cliffpen/serialize.hpp"

#include <string>

namespace cliffpen {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw FormatError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(std::string("missing field '") + key + "'");
  return *it;
}

int int_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer()) throw FormatError(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

std::vector<double> reals(const json& j, const char* what) {
  if (!j.is_array()) throw FormatError(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const json& v : j) {
    if (!v.is_number()) throw FormatError(std::string(what) + " must contain numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<int> ints(const json& j, const char* what) {
  if (!j.is_array()) throw FormatError(std::string(what) + " must be an array");
  std::vector<int> out;
  for (const json& v : j) {
    if (!v.is_number_integer()) throw FormatError(std::string(what) + " must contain integers");
    out.push_back(v.get<int>());
  }
  return out;
}

json flat(const Matrix& m) {
  json row = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
  return row;
}

Matrix unflat(const json& j, int n, const char* what) {
  const std::vector<double> v = reals(j, what);
  if (v.size() != static_cast<std::size_t>(n) * n)
    throw FormatError(std::string(what) + " must hold dim_v^2 entries");
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) m(i, k) = v[static_cast<std::size_t>(i) * n + k];
  return m;
}

}  // namespace

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(std::move(row));
  }
  return out;
}

Matrix matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw FormatError(std::string(what) + " must be a non-empty array of rows");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) throw FormatError(std::string(what) + " rows must be non-empty arrays");
  Matrix m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::vector<double> row = reals(j[i], what);
    if (row.size() != cols) throw FormatError(std::string(what) + " is ragged");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = row[k];
  }
  return m;
}

json module_to_json(const CliffordModule& m) {
  json gens = json::array();
  for (const Matrix& g : m.generators) gens.push_back(flat(g));
  return {{"dim_v", m.dim_v}, {"rank", m.rank}, {"generators", gens}, {"metric", matrix_to_json(m.metric)}};
}

CliffordModule module_from_json(const json& j) {
  CliffordModule m;
  m.dim_v = int_field(j, "dim_v");
  m.rank = int_field(j, "rank");
  if (m.dim_v < 1 || m.rank < 0) throw FormatError("dim_v must be positive and rank non-negative");
  const json& gens = field(j, "generators");
  if (!gens.is_array() || gens.size() != static_cast<std::size_t>(m.rank))
    throw FormatError("generators must list exactly rank matrices");
  for (const json& g : gens) m.generators.push_back(unflat(g, m.dim_v, "generator"));
  if (j.contains("metric")) {
    m.metric = matrix_from_json(j["metric"], "metric");
    if (m.metric.rows() != m.dim_v || m.metric.cols() != m.dim_v)
      throw FormatError("metric must be dim_v x dim_v");
  } else {
    m.metric = Matrix::Identity(m.dim_v, m.dim_v);
  }
  return m;
}

json pencil_to_json(const Pencil& p) {
  json gens = json::array();
  for (const SkewForm& f : p.forms) gens.push_back(flat(f.matrix));
  return {{"dim_v", p.dim()}, {"rank", p.rank()}, {"generators", gens},
          {"metric", matrix_to_json(p.metric.gram)}};
}

Pencil pencil_from_json(const json& j) {
  const CliffordModule raw = module_from_json(j);
  Pencil p;
  try {
    for (const Matrix& g : raw.generators) p.forms.push_back(SkewForm::from_matrix(g));
    p.metric = InnerProduct::from_gram(raw.metric);
  } catch (const AlgebraError& e) {
    throw FormatError(std::string("invalid pencil: ") + e.what());
  }
  return p;
}

json field_to_json(const FourierField& f) {
  json modes = json::array();
  const ModeSet& ms = f.modes();
  for (std::size_t i = 0; i < ms.size(); ++i) {
    json k = json::array(), re = json::array(), im = json::array();
    if (i == 0)
      for (int a = 0; a < f.rank(); ++a) k.push_back(0);
    else
      for (int v : ms.k(i)) k.push_back(v);
    for (const cplx& c : f.mode(i)) {
      re.push_back(c.real());
      im.push_back(c.imag());
    }
    modes.push_back({{"k", k}, {"re", re}, {"im", im}});
  }
  return {{"rank", f.rank()}, {"dim_v", f.dim_v()}, {"cutoff", f.cutoff()}, {"modes", modes}};
}

FourierField field_from_json(const json& j) {
  const int rank = int_field(j, "rank");
  const int dim = int_field(j, "dim_v");
  const int cutoff = int_field(j, "cutoff");
  if (rank < 1 || dim < 1 || cutoff < 0) throw FormatError("invalid field shape");
  FourierField f(ModeSet::make(rank, cutoff), dim);
  const json& modes = field(j, "modes");
  if (!modes.is_array()) throw FormatError("modes must be an array");
  for (const json& m : modes) {
    const std::vector<int> k = ints(field(m, "k"), "k");
    if (k.size() != static_cast<std::size_t>(rank)) throw FormatError("mode k has wrong length");
    std::size_t idx = 0;
    if (std::any_of(k.begin(), k.end(), [](int v) { return v != 0; })) {
      const auto found = f.modes().find(k);
      if (!found) throw FormatError("mode outside the stored half-lattice");
      idx = *found;
    }
    const std::vector<double> re = reals(field(m, "re"), "re");
    const std::vector<double> im = reals(field(m, "im"), "im");
    if (re.size() != static_cast<std::size_t>(dim) || im.size() != re.size())
      throw FormatError("mode coefficients must have dim_v entries");
    auto c = f.mode(idx);
    for (int a = 0; a < dim; ++a) c[a] = cplx(re[a], im[a]);
  }
  if (f.zero_mode_imag() != 0.0) throw FormatError("zero mode must be real");
  return f;
}

json terms_to_json(const std::vector<TrigTerm>& terms) {
  json out = json::array();
  for (const TrigTerm& t : terms)
    out.push_back({{"m", t.m}, {"n", t.n}, {"cos", t.cos_coeff}, {"sin", t.sin_coeff}});
  return out;
}

std::vector<TrigTerm> terms_from_json(const json& j, int time_rank, int space_dim) {
  if (!j.is_array()) throw FormatError("hamiltonian must be an array of terms");
  std::vector<TrigTerm> out;
  for (const json& t : j) {
    if (!t.is_object()) throw FormatError("hamiltonian terms must be objects");
    for (const auto& [key, value] : t.items())
      if (key != "m" && key != "n" && key != "cos" && key != "sin")
        throw FormatError("unknown key '" + key + "' in hamiltonian term");
    TrigTerm term;
    term.m = t.contains("m") ? ints(t["m"], "m") : std::vector<int>(time_rank, 0);
    term.n = ints(field(t, "n"), "n");
    if (term.m.size() != static_cast<std::size_t>(time_rank))
      throw FormatError("term time mode m must have rank entries");
    if (term.n.size() != static_cast<std::size_t>(space_dim))
      throw FormatError("term space mode n must have dim_v entries");
    auto coeff = [&](const char* key) {
      if (!t.contains(key)) return 0.0;
      if (!t[key].is_number()) throw FormatError(std::string("term '") + key + "' must be a number");
      return t[key].get<double>();
    };
    term.cos_coeff = coeff("cos");
    term.sin_coeff = coeff("sin");
    out.push_back(std::move(term));
  }
  return out;
}

}  // namespace cliffpen
