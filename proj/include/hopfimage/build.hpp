#pragma once

#include <string_view>

#include "hopfimage/hadamard.hpp"
#include "hopfimage/io.hpp"
#include "hopfimage/matrix_spec.hpp"

namespace hopfimage {

inline PhaseParameterMatrix load_phases(const MatrixSpec& spec) {
  if (spec.phases.kind == PhaseSource::Kind::Seed) {
    return PhaseParameterMatrix::from_seed(spec.m, spec.n, spec.phases.seed);
  }
  PhaseParameterMatrix q = read_phase_file(spec.phases.path);
  if (q.rows() != spec.m || q.cols() != spec.n) {
    throw InputError("phase file " + spec.phases.path + " is " +
                     std::to_string(q.rows()) + "x" + std::to_string(q.cols()) +
                     ", spec asks for " + std::to_string(spec.m) + "x" +
                     std::to_string(spec.n));
  }
  return q;
}

/// Entries described by a spec, without the Hadamard check, so that files
/// holding non-Hadamard data can still be reported on.
inline ComplexMatrix build_entries(const MatrixSpec& spec) {
  switch (spec.kind) {
    case SpecKind::Fourier:
      return detail::fourier_entries(spec.orders.at(0));
    case SpecKind::FourierGroup: {
      ComplexMatrix acc = ComplexMatrix::Ones(1, 1);
      for (std::size_t order : spec.orders) acc = detail::kron(acc, detail::fourier_entries(order));
      return acc;
    }
    case SpecKind::Tensor:
      return detail::kron(build_entries(spec.children.at(0)), build_entries(spec.children.at(1)));
    case SpecKind::Dita:
      return detail::dita_entries(load_phases(spec));
    case SpecKind::Conjugate:
      return build_entries(spec.children.at(0)).conjugate();
    case SpecKind::Transpose:
      return build_entries(spec.children.at(0)).transpose();
    case SpecKind::Adjoint:
      return build_entries(spec.children.at(0)).adjoint();
    case SpecKind::File:
      return read_matrix_file(spec.path);
  }
  throw InputError("unhandled spec kind");
}

inline HadamardMatrix build_hadamard(const MatrixSpec& spec, const Tolerances& tol = {}) {
  return HadamardMatrix::from_matrix(build_entries(spec), to_string(spec), tol);
}

inline HadamardMatrix build_hadamard(std::string_view text, const Tolerances& tol = {}) {
  return build_hadamard(parse_matrix_spec(text), tol);
}

}  // namespace hopfimage
