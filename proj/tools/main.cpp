// dirac-torus: spectral experiments on deformed Dirac blocks over the
// noncommutative torus. Subcommands: spectrum, hill-compare, commutator,
// growth, example1d. All data files are deterministic: fixed ordering, 17
// significant digits, no timestamps.

#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dirac_torus/config.hpp"
#include "dirac_torus/dirac_spectral.hpp"
#include "dirac_torus/errors.hpp"
#include "dirac_torus/fredholm.hpp"
#include "dirac_torus/hill_solver.hpp"
#include "dirac_torus/output.hpp"
#include "dirac_torus/parallel.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace dirac_torus;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitTolerance = 4;

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;
  double tolerance = -1.0;  // subcommand-specific default when negative
};

std::vector<long> config_levels(const RunConfig& cfg, bool allow_zero) {
  std::vector<long> ns;
  if (cfg.has("n_list")) {
    for (double v : cfg.get_list("n_list")) ns.push_back(static_cast<long>(std::llround(v)));
  } else if (cfg.has("n_range")) {
    const auto r = cfg.get_list("n_range");
    if (r.size() != 2) throw ConfigError("n_range must be [lo, hi]");
    for (long n = static_cast<long>(r[0]); n <= static_cast<long>(r[1]); ++n) ns.push_back(n);
  } else {
    throw ConfigError("missing n_list or n_range");
  }
  if (ns.empty()) throw ConfigError("empty level selection");
  if (!allow_zero)
    for (long n : ns)
      if (n == 0) throw ConfigError("n = 0 is not allowed here (kernel block)");
  return ns;
}

DiracVariant config_variant(const RunConfig& cfg) {
  const std::string v = cfg.get_string("variant", "standard");
  if (v == "standard") return DiracVariant::standard;
  if (v == "growth_weighted") return DiracVariant::growth_weighted;
  throw ConfigError("variant must be standard or growth_weighted");
}

int cmd_spectrum(const CommonOpts& opts) {
  const RunConfig cfg = RunConfig::parse_file(opts.config_path);
  const CircleDiffeo f = cfg.diffeo();
  const std::vector<long> ns = config_levels(cfg, true);
  const int M = static_cast<int>(cfg.get_long("M", 32));
  const double eta = cfg.get_double("eta", 0.0);
  const DiracVariant variant = config_variant(cfg);
  if (M < 8) throw ConfigError("M must be >= 8");
  if (eta < 0.0 || eta > 1.0) throw ConfigError("eta must be in [0,1]");

  std::vector<SpectrumReport> reports(ns.size());
  parallel_for(static_cast<int>(ns.size()), resolve_threads(opts.threads), [&](int i) {
    reports[static_cast<size_t>(i)] =
        block_spectrum(assemble_block(f, ns[static_cast<size_t>(i)], M, eta, variant));
  });

  CsvTable spec;
  spec.header = {"n", "lambda", "method", "residual"};
  json jspec = json::array();
  std::vector<double> plot_x, plot_y;
  long idx = 0;
  for (const auto& rep : reports) {
    for (const auto& e : rep.entries) {
      spec.rows.push_back({std::to_string(e.n), format_g17(e.lambda), e.method,
                           format_g17(e.residual)});
      jspec.push_back({{"n", e.n}, {"lambda", e.lambda}, {"method", e.method},
                       {"residual", e.residual}});
      plot_x.push_back(static_cast<double>(idx++));
      plot_y.push_back(e.lambda);
    }
  }
  spec.write((fs::path(opts.out_dir) / "spectrum.csv").string());
  write_text((fs::path(opts.out_dir) / "spectrum.json").string(), jspec.dump(1) + "\n");
  write_plot_data((fs::path(opts.out_dir) / "spectrum.dat").string(), plot_x, plot_y);

  std::vector<long> nonzero;
  for (long n : ns)
    if (n != 0) nonzero.push_back(n);
  if (!nonzero.empty() && variant == DiracVariant::standard) {
    CsvTable inv;
    inv.header = {"n", "inv_norm", "bound", "bound_satisfied"};
    for (const auto& r : inverse_norm_report(f, nonzero, M))
      inv.rows.push_back({std::to_string(r.n), format_g17(r.inv_norm), format_g17(r.bound),
                          r.satisfied ? "true" : "false"});
    inv.write((fs::path(opts.out_dir) / "inverse_norms.csv").string());
  }
  std::cout << "spectrum: wrote " << spec.rows.size() << " eigenvalues for " << ns.size()
            << " blocks (M=" << M << ", eta=" << eta << ")\n";
  return 0;
}

int cmd_hill_compare(const CommonOpts& opts) {
  const RunConfig cfg = RunConfig::parse_file(opts.config_path);
  const CircleDiffeo f = cfg.diffeo();
  const std::vector<long> ns = config_levels(cfg, false);
  const int M = static_cast<int>(cfg.get_long("M", 64));
  const int count = static_cast<int>(cfg.get_long("count", 10));
  const int steps = static_cast<int>(cfg.get_long("steps", 65536));
  if (count < 1 || count > M) throw ConfigError("count must be in [1, M]");
  if (steps < 1024) throw ConfigError("steps must be >= 1024");
  if (M < 8) throw ConfigError("M must be >= 8");
  const bool printed = cfg.get_long("printed_eta_coefficient", 0) != 0;
  std::vector<double> etas = cfg.has("eta_list") ? cfg.get_list("eta_list")
                                                 : std::vector<double>{cfg.get_double("eta", 0.0)};
  for (double eta : etas)
    if (eta < 0.0 || eta > 1.0) throw ConfigError("eta must be in [0,1]");
  const double tol = opts.tolerance > 0 ? opts.tolerance : 1e-5;
  const int grid = next_power_of_two(std::max(4 * (2 * M + 1), 64));

  CsvTable table;
  table.header = {"n", "eta", "idx", "lambda_matrix", "lambda_hill", "lambda_monodromy",
                  "rel_gap", "periodicity_residual"};
  if (printed) {
    table.header.push_back("lambda_hill_printed");
    table.header.push_back("rel_gap_printed");
  }

  double worst_gap = 0.0;
  for (long n : ns) {
    const Cocycle coc(f, n, grid);
    for (double eta : etas) {
      const SpectrumReport block = block_spectrum(assemble_block(f, n, M, eta));
      std::vector<double> lam_matrix;
      for (const auto& e : block.entries)
        if (e.lambda > 0) lam_matrix.push_back(e.lambda);
      std::sort(lam_matrix.begin(), lam_matrix.end());

      const HillSpectrum hill = hill_eigenvalues(hill_assemble(coc, n, eta, M, false));
      std::vector<double> lam_printed;
      if (printed)
        lam_printed = hill_eigenvalues(hill_assemble(coc, n, eta, M, true)).lambda_abs;

      const HillIntegrator integ(coc, n, eta);
      for (int i = 0; i < count; ++i) {
        const double lm = lam_matrix[static_cast<size_t>(i)];
        const double lh = hill.lambda_abs[static_cast<size_t>(i)];
        const LocatedRoot root = integ.locate(lh, steps);
        const double gap = std::max(std::abs(lm - lh), std::abs(lm - root.lambda)) / lm;
        worst_gap = std::max(worst_gap, gap);
        std::vector<std::string> row = {std::to_string(n), format_g17(eta), std::to_string(i),
                                        format_g17(lm), format_g17(lh),
                                        format_g17(root.lambda), format_g17(gap),
                                        format_g17(root.periodicity_residual)};
        if (printed) {
          const double lp = lam_printed[static_cast<size_t>(i)];
          row.push_back(format_g17(lp));
          row.push_back(format_g17(std::abs(lm - lp) / lm));
        }
        table.rows.push_back(std::move(row));
      }
    }
  }
  table.write((fs::path(opts.out_dir) / "hill_compare.csv").string());
  std::cout << "hill-compare: worst rel_gap " << format_g17(worst_gap) << " over "
            << table.rows.size() << " rows (tolerance " << format_g17(tol) << ")\n";
  return worst_gap <= tol ? 0 : kExitTolerance;
}

int cmd_commutator(const CommonOpts& opts) {
  const RunConfig cfg = RunConfig::parse_file(opts.config_path);
  const CircleDiffeo f = cfg.diffeo();
  const int cutoff = static_cast<int>(cfg.get_long("N", 2));
  const int levels = static_cast<int>(cfg.get_long("levels", cutoff + 2));
  const bool want_svals = cfg.get_long("singular_values", 0) != 0;
  std::vector<double> etas = cfg.has("eta_list") ? cfg.get_list("eta_list")
                                                 : std::vector<double>{cfg.get_double("eta", 0.0)};
  for (double eta : etas)
    if (eta < 0.0 || eta > 1.0) throw ConfigError("eta must be in [0,1]");
  std::vector<double> ms = cfg.has("M_list") ? cfg.get_list("M_list")
                                             : std::vector<double>{static_cast<double>(
                                                   cfg.get_long("M", 32))};
  std::vector<std::pair<int, int>> elements;  // (m, l)
  if (cfg.has("elements")) {
    for (const auto& t : cfg.get_tuple_list("elements")) {
      if (t.size() != 2) throw ConfigError("elements entries must be (m, l)");
      elements.push_back({static_cast<int>(t[0]), static_cast<int>(t[1])});
    }
  } else {
    elements = {{1, 0}, {0, 1}};
  }

  json out = json::array();
  for (double m_raw : ms) {
    const int M = static_cast<int>(m_raw);
    for (double eta : etas) {
      const DeformedPhaseCalculus calc = make_phase_calculus(f, levels, M, eta);
      for (const auto& [m, l] : elements) {
        ElementSpec a;
        if (m == 0 && l == 0)
          a = ElementSpec::identity(cutoff);
        else if (l == 0)
          a = ElementSpec::diagonal_monomial(m, cutoff);
        else if (m == 0)
          a = ElementSpec::shift(l, cutoff);
        else
          a = ElementSpec::product_monomial(m, l, cutoff);
        const CommutatorReport rep = fredholm_commutator(a, calc, want_svals);
        json j = {{"element_m", m},
                  {"element_l", l},
                  {"M", M},
                  {"eta", eta},
                  {"N", levels},
                  {"cutoff", cutoff},
                  {"gap", rep.gap},
                  {"gap_frobenius", rep.gap_frobenius},
                  {"norm_a", rep.norm_a},
                  {"norm_derivation", rep.norm_derivation},
                  {"triple_norm", rep.triple_norm},
                  {"conj_norm_plus", rep.conj_norm_plus},
                  {"conj_norm_minus", rep.conj_norm_minus}};
        if (want_svals) {
          j["singular_values"] = rep.singular_values;
          const std::string name = "svals_m" + std::to_string(m) + "_l" + std::to_string(l) +
                                   "_M" + std::to_string(M) + "_eta" + format_g17(eta) + ".csv";
          CsvTable sv;
          sv.header = {"k", "sigma"};
          for (size_t i = 0; i < rep.singular_values.size(); ++i)
            sv.rows.push_back({std::to_string(i), format_g17(rep.singular_values[i])});
          sv.write((fs::path(opts.out_dir) / name).string());
        }
        out.push_back(std::move(j));
      }
    }
  }
  write_text((fs::path(opts.out_dir) / "commutator_report.json").string(), out.dump(1) + "\n");
  double worst = 0.0;
  for (const auto& j : out) worst = std::max(worst, j["gap_frobenius"].get<double>());
  std::cout << "commutator: " << out.size() << " runs, worst interior gap "
            << format_g17(worst) << "\n";
  return 0;
}

int cmd_growth(const CommonOpts& opts) {
  const RunConfig cfg = RunConfig::parse_file(opts.config_path);
  const CircleDiffeo f = cfg.diffeo();
  const int n_max = static_cast<int>(cfg.get_long("n_max", 20));
  const int grid = static_cast<int>(cfg.get_long("grid", 4096));
  const GrowthTable g = growth_sequence(f, n_max, grid);
  CsvTable table;
  table.header = {"n", "gamma", "refinement_gap"};
  for (int n = 0; n <= n_max; ++n)
    table.rows.push_back({std::to_string(n), format_g17(g.gamma[static_cast<size_t>(n)]),
                          format_g17(g.refinement_gap[static_cast<size_t>(n)])});
  table.write((fs::path(opts.out_dir) / "growth.csv").string());
  std::cout << "growth: wrote gamma_f(0.." << n_max << ") on grid " << grid << "\n";
  return 0;
}

int cmd_example1d(const CommonOpts& opts) {
  const RunConfig cfg = RunConfig::parse_file(opts.config_path);
  const int l = static_cast<int>(cfg.get_long("l", 2));
  const int K = static_cast<int>(cfg.get_long("K", 10));
  if (K < std::abs(l) + 2) throw ConfigError("K must be >= |l| + 2");
  const double tol = opts.tolerance > 0 ? opts.tolerance : 1e-12;

  const Eigen::MatrixXd deformed = circle_example(l, K, true);
  const Eigen::MatrixXd undeformed = circle_example(l, K, false);
  const Eigen::MatrixXcd machinery = circle_example_via_machinery(l, K);
  const double mismatch = (machinery - deformed.cast<cd>()).cwiseAbs().maxCoeff();

  auto dump = [&](const Eigen::MatrixXd& m, const std::string& name) {
    CsvTable t;
    for (int k = -K; k <= K; ++k) t.header.push_back("c" + std::to_string(k));
    for (int r = 0; r < m.rows(); ++r) {
      std::vector<std::string> row;
      for (int c = 0; c < m.cols(); ++c) row.push_back(format_g17(m(r, c)));
      t.rows.push_back(std::move(row));
    }
    t.write((fs::path(opts.out_dir) / name).string());
  };
  dump(deformed, "example1d_deformed.csv");
  dump(undeformed, "example1d_undeformed.csv");

  json j = {{"l", l}, {"K", K}, {"machinery_mismatch", mismatch}};
  write_text((fs::path(opts.out_dir) / "example1d.json").string(), j.dump(1) + "\n");
  std::cout << "example1d: l=" << l << " K=" << K << " machinery mismatch "
            << format_g17(mismatch) << "\n";
  return mismatch <= tol ? 0 : kExitTolerance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deformed Dirac spectra on the noncommutative torus"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string command;
  for (const auto& name :
       {"spectrum", "hill-compare", "commutator", "growth", "example1d"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config_path, "run configuration file")->required();
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--threads", opts.threads, "worker threads (default: env/hardware)");
    sub->add_option("--tolerance", opts.tolerance, "pass/fail tolerance where applicable");
    sub->callback([&command, name] { command = name; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(opts.out_dir);
    if (command == "spectrum") return cmd_spectrum(opts);
    if (command == "hill-compare") return cmd_hill_compare(opts);
    if (command == "commutator") return cmd_commutator(opts);
    if (command == "growth") return cmd_growth(opts);
    if (command == "example1d") return cmd_example1d(opts);
    std::cerr << "unknown subcommand\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
