#pragma once

// Command-line front end. run() never touches std::cout/std::cerr directly
// so it can be driven from tests.
//
// Exit codes: 0 success, 1 invalid input, 2 internal inconsistency.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "unirigid/certify.hpp"
#include "unirigid/errors.hpp"
#include "unirigid/io.hpp"
#include "unirigid/oracle.hpp"
#include "unirigid/report.hpp"
#include "unirigid/spectra.hpp"

namespace unirigid::cli {

enum ExitCode { Ok = 0, BadInput = 1, Inconsistent = 2 };

namespace detail {

inline VertexPair parse_pair(const std::string& s) {
  int a = 0;
  int b = 0;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%d,%d%c", &a, &b, &tail) != 2) {
    throw InvalidInput("expected a pair k,l, got \"" + s + "\"");
  }
  if (a == b) throw InvalidInput("pair " + s + " repeats a vertex");
  return VertexPair::one_based(a, b);
}

inline std::pair<double, double> parse_range(const std::string& s) {
  double lo = 0.0;
  double hi = 0.0;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%lf:%lf%c", &lo, &hi, &tail) != 2 || !(lo < hi)) {
    throw InvalidInput("expected a range lo:hi with lo < hi, got \"" + s + "\"");
  }
  return {lo, hi};
}

inline std::string fmt(const char* spec, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

inline int missing_slot(const Framework& fw, VertexPair p) {
  const int k = fw.graph().missing_index(p);
  if (k < 0) throw InvalidInput("pair {" + p.label() + "} is not a missing edge");
  return k;
}

}  // namespace detail

/// CSV over the 2-D slice spanned by two missing pairs; all other y are 0.
/// Header y_<i>_<j> for every missing pair, then lambda_min,member.
inline void write_slice(std::ostream& out, const Framework& fw, VertexPair first, VertexPair second, double lo,
                        double hi, int steps, const ToleranceConfig& cfg) {
  if (steps < 2) throw InvalidInput("steps must be at least 2");
  const int a = detail::missing_slot(fw, first);
  const int b = detail::missing_slot(fw, second);
  if (a == b) throw InvalidInput("slice pairs must differ");
  const CayleySpectrahedron sp = build_spectrahedron(fw, cfg);
  for (const auto& p : sp.missing) out << "y_" << p.i + 1 << "_" << p.j + 1 << ",";
  out << "lambda_min,member\n";
  Vector y = Vector::Zero(sp.dimension());
  for (int s = 0; s < steps; ++s) {
    for (int t = 0; t < steps; ++t) {
      y(a) = lo + (hi - lo) * s / (steps - 1);
      y(b) = lo + (hi - lo) * t / (steps - 1);
      const Membership m = membership(sp, y, cfg);
      for (Index k = 0; k < y.size(); ++k) out << detail::fmt("%.10g", y(k)) << ",";
      out << detail::fmt("%.17g", m.lambda_min) << "," << (m.member ? "true" : "false") << "\n";
    }
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stress-matrix certificates for universal rigidity of bar frameworks"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<double> tol;
  std::uint64_t seed = 1;
  app.add_option("--tol", tol, "Rank and PSD tolerance")->envname("RIGIDITY_TOL");
  app.add_option("--seed", seed, "Seed for every randomized search");

  std::string file;
  auto add_file = [&](CLI::App* sub) { sub->add_option("file", file, "Framework JSON file")->required(); };

  auto* analyze_cmd = app.add_subcommand("analyze", "Full certificate report");
  add_file(analyze_cmd);
  std::string out_path;
  bool timing = false;
  analyze_cmd->add_option("--out", out_path, "Write the report here instead of stdout");
  analyze_cmd->add_flag("--timing", timing, "Record elapsed_ms per certificate (breaks byte-identical output)");

  auto* stress_cmd = app.add_subcommand("stress", "PSD stress search");
  add_file(stress_cmd);

  auto* linked_cmd = app.add_subcommand("linked", "Universal linkage of one missing pair");
  add_file(linked_cmd);
  std::string pair_text;
  linked_cmd->add_option("--pair", pair_text, "Missing pair k,l (1-based)")->required();

  auto* slice_cmd = app.add_subcommand("slice", "CSV grid of lambda_min over a 2-D slice of the spectrahedron");
  add_file(slice_cmd);
  std::string pairs_text;
  std::string range_text = "-5:5";
  int steps = 101;
  slice_cmd->add_option("--pairs", pairs_text, "Two missing pairs a,b:c,d")->required();
  slice_cmd->add_option("--range", range_text, "Grid range lo:hi")->capture_default_str();
  slice_cmd->add_option("--steps", steps, "Grid points per axis")->capture_default_str();

  auto* oracle_cmd = app.add_subcommand("oracle", "Randomized search for equivalent frameworks");
  add_file(oracle_cmd);
  std::optional<int> dim;
  int restarts = 200;
  oracle_cmd->add_option("--dim", dim, "Target dimension (default: the input's)");
  oracle_cmd->add_option("--restarts", restarts, "Random starts")->capture_default_str();

  auto* check_cmd = app.add_subcommand("check-file", "Validate a framework file");
  add_file(check_cmd);

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return BadInput;
  }

  try {
    ToleranceConfig cfg;
    if (tol) {
      cfg.rank_tol = *tol;
      cfg.psd_tol = *tol;
    }
    cfg.validate();
    const Framework fw = load_framework(file, cfg);

    if (*analyze_cmd) {
      const Report rep = analyze(fw, cfg, seed, timing);
      const std::string text = to_json(rep, fw).dump(2) + "\n";
      if (out_path.empty()) {
        out << text;
      } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw InvalidInput("cannot write " + out_path);
        f << text;
      }
    } else if (*stress_cmd) {
      out << to_json(find_psd_stress(fw, cfg, seed)).dump(2) << "\n";
    } else if (*linked_cmd) {
      const VertexPair p = detail::parse_pair(pair_text);
      detail::missing_slot(fw, p);
      const PsdStressSearch search = find_psd_stress(fw, cfg, seed);
      Certificate c;
      if (search.status == SearchStatus::Found) {
        c = linked_check(fw, search.stress->omega, p, cfg);
      } else {
        c.property = {PropertyKind::UniversallyLinked, p};
        c.tolerances = cfg;
        c.note = "no nonzero PSD stress";
      }
      out << to_json(c, fw.graph().missing_edges()).dump(2) << "\n";
    } else if (*slice_cmd) {
      const auto colon = pairs_text.find(':');
      if (colon == std::string::npos) throw InvalidInput("expected --pairs a,b:c,d");
      const auto [lo, hi] = detail::parse_range(range_text);
      write_slice(out, fw, detail::parse_pair(pairs_text.substr(0, colon)),
                  detail::parse_pair(pairs_text.substr(colon + 1)), lo, hi, steps, cfg);
    } else if (*oracle_cmd) {
      out << to_json(search_equivalent(fw, dim.value_or(fw.dimension()), restarts, seed, cfg)).dump(2) << "\n";
    } else if (*check_cmd) {
      out << "ok: " << fw.vertex_count() << " vertices, " << fw.graph().edges().size() << " edges, dimension "
          << fw.dimension() << ", " << fw.graph().missing_edges().size() << " missing pairs\n";
    }
  } catch (const InternalInconsistency& e) {
    err << "internal inconsistency: " << e.what() << "\n";
    return Inconsistent;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return BadInput;
  }
  return Ok;
}

}  // namespace unirigid::cli
