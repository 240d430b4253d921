#pragma once

#include <cctype>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "hopfimage/errors.hpp"

namespace hopfimage {

// Grammar (whitespace between tokens is ignored):
//
//   spec := "fourier:" INT
//         | "fouriergroup:" INT ("x" INT)*
//         | "tensor(" spec "," spec ")"
//         | "dita(" INT "," INT ";" qsrc ")"
//         | "conj(" spec ")" | "transpose(" spec ")" | "adjoint(" spec ")"
//         | "file=" PATH
//   qsrc := "seed=" UINT64 | "file=" PATH
//
// PATH runs up to the next ',' ';' ')' or the end of input.

enum class SpecKind { Fourier, FourierGroup, Tensor, Dita, Conjugate, Transpose, Adjoint, File };

struct PhaseSource {
  enum class Kind { Seed, File };
  Kind kind = Kind::Seed;
  std::uint64_t seed = 0;
  std::string path;

  bool operator==(const PhaseSource&) const = default;
};

struct MatrixSpec {
  SpecKind kind = SpecKind::Fourier;
  std::vector<std::size_t> orders;  // Fourier: one entry; FourierGroup: all factors
  std::size_t m = 0;                // Dita row-factor order
  std::size_t n = 0;                // Dita column-factor order
  PhaseSource phases;               // Dita only
  std::string path;                 // File only
  std::vector<MatrixSpec> children; // Tensor: two; Conj/Transpose/Adjoint: one

  bool operator==(const MatrixSpec&) const = default;
};

namespace detail {

class SpecParser {
 public:
  explicit SpecParser(std::string_view text) : text_(text) {}

  MatrixSpec parse() {
    MatrixSpec spec = parse_spec();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return spec;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, pos_);
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view token) {
    if (!accept(token)) fail("expected '" + std::string(token) + "'");
  }

  std::uint64_t parse_uint64() {
    skip_space();
    const std::size_t start = pos_;
    std::uint64_t value = 0;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      const auto digit = static_cast<std::uint64_t>(text_[pos_] - '0');
      if (value > (std::numeric_limits<std::uint64_t>::max() - digit) / 10) {
        pos_ = start;
        fail("integer does not fit in 64 bits");
      }
      value = value * 10 + digit;
      ++pos_;
    }
    if (pos_ == start) fail("expected an unsigned integer");
    return value;
  }

  std::size_t parse_order() {
    skip_space();
    const std::size_t start = pos_;
    const std::uint64_t value = parse_uint64();
    if (value == 0) {
      pos_ = start;
      fail("order must be positive");
    }
    if (value > std::numeric_limits<std::size_t>::max()) {
      pos_ = start;
      fail("order too large");
    }
    return static_cast<std::size_t>(value);
  }

  std::string parse_path() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ';' &&
           text_[pos_] != ')') {
      ++pos_;
    }
    std::string_view path = text_.substr(start, pos_ - start);
    while (!path.empty() &&
           std::isspace(static_cast<unsigned char>(path.back()))) {
      path.remove_suffix(1);
    }
    if (path.empty()) {
      pos_ = start;
      fail("empty file path");
    }
    return std::string(path);
  }

  MatrixSpec parse_unary(SpecKind kind) {
    MatrixSpec spec;
    spec.kind = kind;
    spec.children.push_back(parse_spec());
    expect(")");
    return spec;
  }

  MatrixSpec parse_spec() {
    skip_space();
    MatrixSpec spec;
    // longest keywords first: "fouriergroup:" shares a prefix with "fourier:"
    if (accept("fouriergroup:")) {
      spec.kind = SpecKind::FourierGroup;
      spec.orders.push_back(parse_order());
      while (accept("x")) spec.orders.push_back(parse_order());
      return spec;
    }
    if (accept("fourier:")) {
      spec.kind = SpecKind::Fourier;
      spec.orders.push_back(parse_order());
      return spec;
    }
    if (accept("tensor(")) {
      spec.kind = SpecKind::Tensor;
      spec.children.push_back(parse_spec());
      expect(",");
      spec.children.push_back(parse_spec());
      expect(")");
      return spec;
    }
    if (accept("dita(")) {
      spec.kind = SpecKind::Dita;
      spec.m = parse_order();
      expect(",");
      spec.n = parse_order();
      expect(";");
      if (accept("seed=")) {
        spec.phases.kind = PhaseSource::Kind::Seed;
        spec.phases.seed = parse_uint64();
      } else if (accept("file=")) {
        spec.phases.kind = PhaseSource::Kind::File;
        spec.phases.path = parse_path();
      } else {
        fail("expected 'seed=' or 'file='");
      }
      expect(")");
      return spec;
    }
    if (accept("conj(")) return parse_unary(SpecKind::Conjugate);
    if (accept("transpose(")) return parse_unary(SpecKind::Transpose);
    if (accept("adjoint(")) return parse_unary(SpecKind::Adjoint);
    if (accept("file=")) {
      spec.kind = SpecKind::File;
      spec.path = parse_path();
      return spec;
    }
    if (pos_ >= text_.size()) fail("unexpected end of input");
    std::size_t end = pos_;
    while (end < text_.size() &&
           std::isalpha(static_cast<unsigned char>(text_[end]))) {
      ++end;
    }
    if (end > pos_) {
      fail("unknown constructor '" +
           std::string(text_.substr(pos_, end - pos_)) + "'");
    }
    fail("expected a matrix spec");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline MatrixSpec parse_matrix_spec(std::string_view text) {
  return detail::SpecParser(text).parse();
}

/// Canonical text form; parse_matrix_spec(to_string(s)) == s.
inline std::string to_string(const MatrixSpec& spec) {
  switch (spec.kind) {
    case SpecKind::Fourier:
      return "fourier:" + std::to_string(spec.orders.at(0));
    case SpecKind::FourierGroup: {
      std::string out = "fouriergroup:";
      for (std::size_t k = 0; k < spec.orders.size(); ++k) {
        out += (k ? "x" : "") + std::to_string(spec.orders[k]);
      }
      return out;
    }
    case SpecKind::Tensor:
      return "tensor(" + to_string(spec.children.at(0)) + "," +
             to_string(spec.children.at(1)) + ")";
    case SpecKind::Dita:
      return "dita(" + std::to_string(spec.m) + "," + std::to_string(spec.n) +
             ";" +
             (spec.phases.kind == PhaseSource::Kind::Seed
                  ? "seed=" + std::to_string(spec.phases.seed)
                  : "file=" + spec.phases.path) +
             ")";
    case SpecKind::Conjugate:
      return "conj(" + to_string(spec.children.at(0)) + ")";
    case SpecKind::Transpose:
      return "transpose(" + to_string(spec.children.at(0)) + ")";
    case SpecKind::Adjoint:
      return "adjoint(" + to_string(spec.children.at(0)) + ")";
    case SpecKind::File:
      return "file=" + spec.path;
  }
  return {};
}

}  // namespace hopfimage
