// hopfimage: command-line front end for truncated spectral measures of
// complex Hadamard matrices.
//
// Exit codes: 0 pass, 1 mathematical check failed, 2 usage or parse error,
// 3 resource cap exceeded.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#if __has_include("CLI11.hpp")
#include "CLI11.hpp"
#else
#include <CLI/CLI.hpp>
#endif
#include "hopfimage/hopfimage.hpp"

namespace {

using namespace hopfimage;

enum ExitCode { kPass = 0, kCheckFailed = 1, kUsage = 2, kCap = 3 };

struct Globals {
  std::optional<double> tol;
  std::size_t cap = kDefaultCap;
  std::string out;
  std::string format = "json";
};

class UsageError : public Error {
 public:
  using Error::Error;
};

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text_file(g.out, text);
  }
}

void require_format(const Globals& g, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed) {
    if (g.format == f) return;
  }
  throw UsageError("format '" + g.format + "' is not supported by this subcommand");
}

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string line;
  for (const auto& c : cells) line += (line.empty() ? "" : ",") + c;
  return line + "\n";
}

std::string num(double v) { return format_sig15(v); }

PhaseParameterMatrix phases_from_cli(std::size_t m, std::size_t n, const std::string& qsrc) {
  const MatrixSpec spec = parse_matrix_spec("dita(" + std::to_string(m) + "," +
                                            std::to_string(n) + ";" + qsrc + ")");
  return load_phases(spec);
}

int cmd_validate(const Globals& g, const std::string& text, const std::string& dump,
                 double ortho_tol) {
  require_format(g, {"json"});
  const MatrixSpec spec = parse_matrix_spec(text);
  const ComplexMatrix m = build_entries(spec);
  Tolerances tol;
  if (g.tol) tol.unimodular = *g.tol;
  tol.orthogonality_per_n = ortho_tol;
  const ValidationReport report = validate(m, tol);
  if (!dump.empty()) write_matrix_file(dump, m);
  json out = to_json(report);
  out["matrix"] = to_string(spec);
  emit(g, out.dump(2) + "\n");
  return report.pass ? kPass : kCheckFailed;
}

int cmd_gen(const Globals& g, const std::string& text) {
  require_format(g, {"json"});
  const HadamardMatrix h = build_hadamard(text);
  emit(g, matrix_to_json(h.matrix()).dump() + "\n");
  return kPass;
}

int cmd_measure(const Globals& g, const std::string& text, std::size_t r,
                double cluster_tol_per_n) {
  require_format(g, {"json", "csv", "svg"});
  const HadamardMatrix h = build_hadamard(text);
  LawOptions options;
  options.cap = g.cap;
  options.cluster_tol_per_n = cluster_tol_per_n;
  const SpectralMeasure m = truncated_law(h, r, options);
  if (g.format == "csv") {
    std::string csv = "x,w\n";
    for (const Atom& a : m.atoms) csv += csv_line({num(a.location), num(a.weight)});
    emit(g, csv);
  } else if (g.format == "svg") {
    emit(g, measure_svg(m));
  } else {
    emit(g, to_json(m).dump(2) + "\n");
  }
  return kPass;
}

int cmd_moments(const Globals& g, const std::string& text, std::size_t p_max,
                std::size_t r_max) {
  require_format(g, {"json", "csv"});
  const HadamardMatrix h = build_hadamard(text);
  const MomentTable t = moment_table(h, p_max, r_max, g.cap);
  if (g.format == "csv") {
    std::string csv = "p,r,c,gamma\n";
    for (std::size_t p = 1; p <= p_max; ++p) {
      for (std::size_t r = 0; r <= r_max; ++r) {
        csv += csv_line({std::to_string(p), std::to_string(r), num(t.c[p - 1][r]),
                         num(t.gamma[p - 1][r])});
      }
    }
    emit(g, csv);
  } else {
    emit(g, to_json(t).dump(2) + "\n");
  }
  return kPass;
}

int cmd_cesaro(const Globals& g, const std::string& text, std::size_t p, std::size_t k_max) {
  require_format(g, {"json", "csv"});
  const HadamardMatrix h = build_hadamard(text);
  const HaarMomentEstimate e = haar_moment_estimate(h, p, k_max, g.tol.value_or(1e-8), g.cap);
  if (g.format == "csv") {
    std::string csv = "k,c,s\n";
    for (std::size_t k = 0; k < e.sequence.averages.size(); ++k) {
      csv += csv_line({std::to_string(k + 1), num(e.sequence.moments[k]),
                       num(e.sequence.averages[k])});
    }
    emit(g, csv);
  } else {
    json out = to_json(e);
    out["matrix"] = h.provenance();
    emit(g, out.dump(2) + "\n");
  }
  return kPass;
}

std::string duality_csv(const DualityReport& r) {
  std::string csv = "p,r,residual\n";
  for (std::size_t p = 0; p < r.p_max; ++p) {
    for (std::size_t q = 0; q < r.r_max; ++q) {
      csv += csv_line({std::to_string(p + 1), std::to_string(q + 1), num(r.grid[p][q])});
    }
  }
  return csv;
}

int cmd_duality(const Globals& g, const std::string& text, std::size_t p_max,
                std::size_t r_max, std::size_t probe_depth) {
  require_format(g, {"json", "csv"});
  const HadamardMatrix h = build_hadamard(text);
  DualityOptions options;
  options.cap = g.cap;
  options.tolerance = g.tol.value_or(1e-8);
  const DualityReport report = duality_residual(h, p_max, r_max, options);
  if (g.format == "csv") {
    emit(g, duality_csv(report));
  } else {
    json out = to_json(report);
    if (probe_depth > 0) {
      const TopMassProbe probe = top_mass_duality(h, probe_depth, options);
      out["top_mass"] = json{{"depth", probe_depth},
                             {"mass_h", round_sig15(probe.mass_h)},
                             {"mass_ht", round_sig15(probe.mass_ht)},
                             {"gap", round_sig15(probe.gap)}};
    }
    emit(g, out.dump(2) + "\n");
  }
  return report.pass ? kPass : kCheckFailed;
}

int cmd_dita_check(const Globals& g, std::size_t m, std::size_t n, const std::string& qsrc,
                   std::size_t p_max, std::size_t r_max) {
  require_format(g, {"json", "csv"});
  const PhaseParameterMatrix q = phases_from_cli(m, n, qsrc);
  DualityOptions options;
  options.cap = g.cap;
  options.tolerance = g.tol.value_or(1e-8);
  const DualityReport report = dita_selfduality_residual(m, n, q, p_max, r_max, options);
  emit(g, g.format == "csv" ? duality_csv(report) : to_json(report).dump(2) + "\n");
  return report.pass ? kPass : kCheckFailed;
}

int cmd_bench(const Globals& g, std::size_t m, std::size_t n, const std::string& qsrc,
              std::size_t p, std::size_t r, std::size_t reps) {
  require_format(g, {"json"});
  const PhaseParameterMatrix q = phases_from_cli(m, n, qsrc);
  const BenchReport report = bench_structured_vs_dense(q, p, r, reps, g.cap);
  emit(g, to_json(report).dump(2) + "\n");
  return report.verified ? kPass : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated spectral measures of complex Hadamard matrices"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--tol", g.tol, "Pass tolerance (validate: unimodularity)")
      ->check(CLI::PositiveNumber);
  app.add_option("--cap", g.cap, "Largest dense dimension to materialize")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output path (default stdout)");
  app.add_option("--format", g.format, "json, csv, or svg")
      ->check(CLI::IsMember({"json", "csv", "svg"}));

  std::string spec_text, dump, qsrc;
  double ortho_tol = Tolerances{}.orthogonality_per_n;
  double cluster_tol = LawOptions{}.cluster_tol_per_n;
  std::size_t r = 1, p = 1, p_max = 4, r_max = 4, k_max = 20, reps = 5, probe = 0, m = 2, n = 2;

  auto* validate_cmd = app.add_subcommand("validate", "Check unimodularity and orthogonality");
  validate_cmd->add_option("spec", spec_text, "Matrix spec")->required();
  validate_cmd->add_option("--dump", dump, "Write the matrix entries to this JSON file");
  validate_cmd->add_option("--ortho-tol", ortho_tol, "Orthogonality tolerance per unit of N")
      ->check(CLI::PositiveNumber);

  auto* gen_cmd = app.add_subcommand("gen", "Write a spec'd matrix as JSON");
  gen_cmd->add_option("spec", spec_text, "Matrix spec")->required();

  auto* measure_cmd = app.add_subcommand("measure", "Truncated measure mu^r");
  measure_cmd->add_option("spec", spec_text, "Matrix spec")->required();
  measure_cmd->add_option("-r,--depth", r, "Truncation depth")->required();
  measure_cmd->add_option("--cluster-tol", cluster_tol, "Eigenvalue clustering tolerance per unit of N")
      ->check(CLI::PositiveNumber);

  auto* moments_cmd = app.add_subcommand("moments", "Moment table c_p^r and gamma_p^r");
  moments_cmd->add_option("spec", spec_text, "Matrix spec")->required();
  moments_cmd->add_option("--p-max", p_max, "Largest moment order")->check(CLI::PositiveNumber);
  moments_cmd->add_option("--r-max", r_max, "Largest truncation depth");

  auto* cesaro_cmd = app.add_subcommand("cesaro", "Cesaro averages and Haar moment estimate");
  cesaro_cmd->add_option("spec", spec_text, "Matrix spec")->required();
  cesaro_cmd->add_option("-p,--order", p, "Moment order")->check(CLI::PositiveNumber);
  cesaro_cmd->add_option("--k-max", k_max, "Number of Cesaro terms")->check(CLI::PositiveNumber);

  auto* duality_cmd = app.add_subcommand("duality", "Moment/truncation duality residuals");
  duality_cmd->add_option("spec", spec_text, "Matrix spec")->required();
  duality_cmd->add_option("--p-max", p_max, "Largest moment order")->check(CLI::PositiveNumber);
  duality_cmd->add_option("--r-max", r_max, "Largest truncation depth")->check(CLI::PositiveNumber);
  duality_cmd->add_option("--probe-depth", probe, "Also probe the top masses at this depth");

  auto* dita_cmd = app.add_subcommand("dita-check", "Dita self-duality residuals");
  dita_cmd->add_option("M", m, "Row factor order")->required()->check(CLI::PositiveNumber);
  dita_cmd->add_option("N", n, "Column factor order")->required()->check(CLI::PositiveNumber);
  dita_cmd->add_option("qsrc", qsrc, "seed=<u64> or file=<path>")->required();
  dita_cmd->add_option("--p-max", p_max, "Largest moment order")->check(CLI::PositiveNumber);
  dita_cmd->add_option("--r-max", r_max, "Largest truncation depth")->check(CLI::PositiveNumber);

  auto* bench_cmd = app.add_subcommand("bench", "Structured vs dense Dita moments");
  bench_cmd->add_option("M", m, "Row factor order")->required()->check(CLI::PositiveNumber);
  bench_cmd->add_option("N", n, "Column factor order")->required()->check(CLI::PositiveNumber);
  bench_cmd->add_option("qsrc", qsrc, "seed=<u64> or file=<path>")->required();
  bench_cmd->add_option("-p,--order", p, "Moment order")->check(CLI::PositiveNumber);
  bench_cmd->add_option("-r,--depth", r, "Truncation depth")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--reps", reps, "Timing repetitions")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    self_test();
    if (*validate_cmd) return cmd_validate(g, spec_text, dump, ortho_tol);
    if (*gen_cmd) return cmd_gen(g, spec_text);
    if (*measure_cmd) return cmd_measure(g, spec_text, r, cluster_tol);
    if (*moments_cmd) return cmd_moments(g, spec_text, p_max, r_max);
    if (*cesaro_cmd) return cmd_cesaro(g, spec_text, p, k_max);
    if (*duality_cmd) return cmd_duality(g, spec_text, p_max, r_max, probe);
    if (*dita_cmd) return cmd_dita_check(g, m, n, qsrc, p_max, r_max);
    if (*bench_cmd) return cmd_bench(g, m, n, qsrc, p, r, reps);
  } catch (const CapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCap;
  } catch (const NotHadamard& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const Error& e) {
    // ParseError, InputError, UsageError
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
