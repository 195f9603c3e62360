#pragma once

// JSON encodings of the library's value types. Integers are canonical
// representatives in [0, p^prec); matrices are row-major arrays of element
// encodings. Deserializers validate and rebuild derived data (Frobenius
// images are recomputed, never trusted from the file).

#include <json.hpp>

#include "eozip/dieudonne.hpp"
#include "eozip/group.hpp"
#include "eozip/orbits.hpp"
#include "eozip/witt.hpp"
#include "eozip/zip.hpp"

namespace eozip {

using nlohmann::json;

inline json ring_to_json(const WittRing& r) {
  return json{{"p", r.p},
              {"f", r.f},
              {"n", r.n},
              {"modulus", r.modulus}};
}

inline WittRingPtr ring_from_json(const json& j) {
  try {
    std::uint64_t p = j.at("p").get<std::uint64_t>();
    unsigned f = j.at("f").get<unsigned>();
    unsigned n = j.at("n").get<unsigned>();
    std::vector<std::uint64_t> modulus;
    if (j.contains("modulus")) modulus = j.at("modulus").get<std::vector<std::uint64_t>>();
    return make_witt_ring(p, f, n, std::move(modulus));
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("ring: ") + e.what());
  }
}

inline json elem_to_json(const WittElem& e) {
  return json{{"coeffs", e.coeffs()}, {"prec", e.precision()}};
}

inline WittElem elem_from_json(const json& j, const WittRingPtr& ring) {
  try {
    auto coeffs = j.at("coeffs").get<std::vector<std::uint64_t>>();
    unsigned prec = j.at("prec").get<unsigned>();
    if (coeffs.size() != ring->f)
      throw InvalidInput("element has wrong number of coefficients");
    const std::uint64_t bound = ring->pow_p(prec);
    for (auto c : coeffs)
      if (c >= bound)
        throw InvalidInput("coefficient exceeds the canonical range");
    return WittElem(ring, std::move(coeffs), prec);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("element: ") + e.what());
  }
}

inline json mat_to_json(const Mat<WittElem>& m) {
  json rows = json::array();
  for (unsigned i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (unsigned j = 0; j < m.cols(); ++j) row.push_back(elem_to_json(m.at(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Mat<WittElem> mat_from_json(const json& j, const WittRingPtr& ring) {
  try {
    if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty())
      throw InvalidInput("matrix must be a non-empty array of rows");
    const unsigned rows = static_cast<unsigned>(j.size());
    const unsigned cols = static_cast<unsigned>(j[0].size());
    Mat<WittElem> m(rows, cols, WittElem::zero(ring, ring->n));
    for (unsigned i = 0; i < rows; ++i) {
      if (j[i].size() != cols) throw InvalidInput("ragged matrix rows");
      for (unsigned c = 0; c < cols; ++c) m.at(i, c) = elem_from_json(j[i][c], ring);
    }
    return m;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("matrix: ") + e.what());
  }
}

inline json spec_to_json(const GroupSpec& s) {
  return json{{"kind", s.kind == GroupKind::GL ? "GL" : "GSp"},
              {"m", s.m},
              {"mu", s.mu}};
}

inline GroupSpecPtr spec_from_json(const json& j) {
  try {
    std::string kind = j.at("kind").get<std::string>();
    unsigned m = j.at("m").get<unsigned>();
    auto mu = j.at("mu").get<std::vector<int>>();
    if (kind != "GL" && kind != "GSp") throw InvalidInput("kind must be GL or GSp");
    return make_group(kind == "GL" ? GroupKind::GL : GroupKind::GSp, m, std::move(mu));
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("group spec: ") + e.what());
  }
}

inline json module_to_json(const DieudonneModule<WittElem>& d) {
  return json{{"ring", ring_to_json(*d.frob.at(0, 0).ring())},
              {"spec", spec_to_json(*d.spec)},
              {"F", mat_to_json(d.frob)},
              {"V", mat_to_json(d.versch)},
              {"hodge", mat_to_json(d.hodge)}};
}

inline DieudonneModule<WittElem> module_from_json(const json& j) {
  try {
    WittRingPtr ring = ring_from_json(j.at("ring"));
    GroupSpecPtr spec = spec_from_json(j.at("spec"));
    Mat<WittElem> f = mat_from_json(j.at("F"), ring);
    Mat<WittElem> v = mat_from_json(j.at("V"), ring);
    Mat<WittElem> hodge = mat_from_json(j.at("hodge"), ring);
    return DieudonneModule<WittElem>{spec, std::move(f), std::move(v),
                                     std::move(hodge)};
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("module: ") + e.what());
  }
}

inline json invariant_to_json(const ZipInvariant<WittElem>& inv) {
  return json{{"integral", mat_to_json(inv.integral_part.mat())},
              {"coset_rep", mat_to_json(inv.coset.rep.mat())}};
}

inline json orbit_table_to_json(const OrbitTable& t) {
  json orbits = json::array();
  for (std::size_t i = 0; i < t.orbits.size(); ++i) {
    orbits.push_back(json{{"rep", mat_to_json(t.representative(i).mat())},
                          {"size", t.orbits[i].size},
                          {"suborbit_sizes", t.orbits[i].suborbit_sizes}});
  }
  return json{{"spec", spec_to_json(*t.spec)},
              {"q", t.q},
              {"group_order", t.group_order},
              {"emu_order", t.emu_order},
              {"orbits", std::move(orbits)}};
}

}  // namespace eozip
