#pragma once

// JSON forms of modules, pencils, Fourier fields and Hamiltonian terms.
// Doubles are written in shortest round-trip form, so reading back what was
// written reproduces every value exactly.

#include <nlohmann/json.hpp>

#include "cliffpen/hamiltonian.hpp"

namespace cliffpen {

using json = nlohmann::json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json matrix_to_json(const Matrix& m);  // [[row], ...]
Matrix matrix_from_json(const json& j, const char* what);

// {dim_v, rank, generators: [[row-major]], metric: [[...]]}
json module_to_json(const CliffordModule& m);
CliffordModule module_from_json(const json& j);

// Same layout; the generators are the skew form matrices.
json pencil_to_json(const Pencil& p);
Pencil pencil_from_json(const json& j);

// {rank, dim_v, cutoff, modes: [{k, re, im}]}, zero mode first.
json field_to_json(const FourierField& f);
FourierField field_from_json(const json& j);

// [{m, n, cos, sin}]
json terms_to_json(const std::vector<TrigTerm>& terms);
std::vector<TrigTerm> terms_from_json(const json& j, int time_rank, int space_dim);

}  // namespace cliffpen
