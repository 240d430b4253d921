#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "hopfimage/dita.hpp"
#include "hopfimage/duality.hpp"
#include "hopfimage/errors.hpp"
#include "hopfimage/hadamard.hpp"
#include "hopfimage/spectra.hpp"

namespace hopfimage {

using nlohmann::json;

/// Rounds to 15 significant digits so that the shortest round-trip form
/// printed by the JSON writer has at most 15 digits.
inline double round_sig15(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return std::strtod(buf, nullptr);
}

inline std::string format_sig15(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

// Matrix file: { "n": N, "entries": [[ [re, im], ... N ], ... N rows ] }.
// Doubles are written at full precision so a reload is bit-identical.

inline json matrix_to_json(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw InputError("matrix_to_json: matrix must be square");
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return json{{"n", m.rows()}, {"entries", std::move(rows)}};
}

inline ComplexMatrix matrix_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("entries")) {
    throw InputError("matrix file: expected an object with \"n\" and \"entries\"");
  }
  if (!doc["n"].is_number_integer() || doc["n"].get<long long>() < 1) {
    throw InputError("matrix file: \"n\" must be a positive integer");
  }
  const auto n = doc["n"].get<long long>();
  const json& rows = doc["entries"];
  if (!rows.is_array() || static_cast<long long>(rows.size()) != n) {
    throw InputError("matrix file: \"entries\" must hold exactly n rows");
  }
  ComplexMatrix m(n, n);
  for (long long i = 0; i < n; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<long long>(row.size()) != n) {
      throw InputError("matrix file: row " + std::to_string(i) + " must hold exactly n entries");
    }
    for (long long j = 0; j < n; ++j) {
      const json& z = row[static_cast<std::size_t>(j)];
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
        throw InputError("matrix file: entry (" + std::to_string(i) + "," +
                         std::to_string(j) + ") must be [re, im]");
      }
      const double re = z[0].get<double>();
      const double im = z[1].get<double>();
      if (!std::isfinite(re) || !std::isfinite(im)) {
        throw InputError("matrix file: non-finite entry");
      }
      m(i, j) = Complex(re, im);
    }
  }
  return m;
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

inline ComplexMatrix read_matrix_file(const std::filesystem::path& path) {
  return matrix_from_json(read_json_file(path));
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

inline void write_matrix_file(const std::filesystem::path& path, const ComplexMatrix& m) {
  write_text_file(path, matrix_to_json(m).dump() + "\n");
}

// Phase file: { "m": M, "n": N, "angles": [[theta, ...], ...] } in radians.

inline PhaseParameterMatrix phases_from_json(const json& doc, std::string source) {
  if (!doc.is_object() || !doc.contains("m") || !doc.contains("n") || !doc.contains("angles")) {
    throw InputError("phase file: expected an object with \"m\", \"n\", \"angles\"");
  }
  if (!doc["m"].is_number_integer() || !doc["n"].is_number_integer() ||
      doc["m"].get<long long>() < 1 || doc["n"].get<long long>() < 1) {
    throw InputError("phase file: \"m\" and \"n\" must be positive integers");
  }
  const auto m = doc["m"].get<long long>();
  const auto n = doc["n"].get<long long>();
  const json& rows = doc["angles"];
  if (!rows.is_array() || static_cast<long long>(rows.size()) != m) {
    throw InputError("phase file: \"angles\" must hold exactly m rows");
  }
  Eigen::MatrixXd angles(m, n);
  for (long long i = 0; i < m; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<long long>(row.size()) != n) {
      throw InputError("phase file: row " + std::to_string(i) + " must hold exactly n angles");
    }
    for (long long b = 0; b < n; ++b) {
      if (!row[static_cast<std::size_t>(b)].is_number()) {
        throw InputError("phase file: angles must be numbers");
      }
      angles(i, b) = row[static_cast<std::size_t>(b)].get<double>();
    }
  }
  return PhaseParameterMatrix::from_angles(std::move(angles), std::move(source));
}

inline PhaseParameterMatrix read_phase_file(const std::filesystem::path& path) {
  return phases_from_json(read_json_file(path), "file=" + path.string());
}

inline json phases_to_json(const PhaseParameterMatrix& q) {
  json rows = json::array();
  for (std::size_t i = 0; i < q.rows(); ++i) {
    json row = json::array();
    for (std::size_t b = 0; b < q.cols(); ++b) row.push_back(q.angle(i, b));
    rows.push_back(std::move(row));
  }
  return json{{"m", q.rows()}, {"n", q.cols()}, {"angles", std::move(rows)}};
}

inline json to_json(const ValidationReport& r) {
  return json{{"n", r.n},
              {"finite", r.finite},
              {"unimodularity_deviation", r.unimodularity_deviation},
              {"orthogonality_deviation", r.orthogonality_deviation},
              {"pass", r.pass}};
}

inline json to_json(const SpectralMeasure& m) {
  json atoms = json::array();
  for (const Atom& a : m.atoms) {
    atoms.push_back(json{{"x", round_sig15(a.location)}, {"w", round_sig15(a.weight)}});
  }
  return json{{"N", m.n}, {"r", m.r}, {"atoms", std::move(atoms)},
              {"cluster_tol", round_sig15(m.cluster_tol)}};
}

inline json grid_to_json(const std::vector<std::vector<double>>& grid) {
  json out = json::array();
  for (const auto& row : grid) {
    json jr = json::array();
    for (double v : row) jr.push_back(round_sig15(v));
    out.push_back(std::move(jr));
  }
  return out;
}

/// "c"[p-1][r] = c_p^r for r = 0..r_max, likewise "gamma".
inline json to_json(const MomentTable& t) {
  return json{{"N", t.n},
              {"c", grid_to_json(t.c)},
              {"gamma", grid_to_json(t.gamma)},
              {"p_max", t.p_max},
              {"r_max", t.r_max}};
}

inline json to_json(const CesaroSequence& s) {
  json moments = json::array(), averages = json::array();
  for (double v : s.moments) moments.push_back(round_sig15(v));
  for (double v : s.averages) averages.push_back(round_sig15(v));
  return json{{"p", s.p},
              {"moments", std::move(moments)},
              {"averages", std::move(averages)},
              {"last_increment", round_sig15(s.last_increment)}};
}

inline json to_json(const HaarMomentEstimate& e) {
  json out = to_json(e.sequence);
  out["estimate"] = round_sig15(e.estimate);
  out["rounded"] = e.rounded;
  out["converged"] = e.converged;
  return out;
}

/// Wall time is left out so the output depends only on the inputs.
inline json to_json(const DualityReport& r) {
  json out{{"matrix", r.matrix},
           {"p_max", r.p_max},
           {"r_max", r.r_max},
           {"max_residual", round_sig15(r.max_residual)},
           {"grid", grid_to_json(r.grid)},
           {"pass", r.pass},
           {"tolerance", r.tolerance}};
  if (r.has_atom_check) {
    out["atoms_match"] = r.atoms_match;
    out["mismatched_depths"] = r.mismatched_depths;
  }
  return out;
}

inline json to_json(const BenchReport& b) {
  return json{{"M", b.m},
              {"N", b.n},
              {"p", b.p},
              {"r", b.r},
              {"repetitions", b.repetitions},
              {"dense_ms", round_sig15(b.dense_ms)},
              {"structured_ms", round_sig15(b.structured_ms)},
              {"speedup", round_sig15(b.speedup)},
              {"verified", b.verified},
              {"dense_value", round_sig15(b.dense_value)},
              {"structured_value", round_sig15(b.structured_value)},
              {"dense_entries", b.dense_entries},
              {"structured_entries", b.structured_entries}};
}

inline SpectralMeasure measure_from_json(const json& doc) {
  SpectralMeasure m;
  m.n = doc.at("N").get<std::size_t>();
  m.r = doc.at("r").get<std::size_t>();
  m.cluster_tol = doc.at("cluster_tol").get<double>();
  for (const json& a : doc.at("atoms")) {
    m.atoms.push_back({a.at("x").get<double>(), a.at("w").get<double>()});
  }
  return m;
}

}  // namespace hopfimage
