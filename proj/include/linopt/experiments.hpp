#pragma once

#include <cstdio>
#include <random>
#include <sstream>

#include <json.hpp>

#include "linopt/amplifier_oracle.hpp"

namespace linopt {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Experiment configuration (JSON schema version 1)
// ---------------------------------------------------------------------------

/// Finite arithmetic progression start, start+step, ..., up to stop.
struct GridSpec {
  double start{};
  double stop{};
  double step{1.0};

  std::vector<double> values() const {
    if (step <= 0.0) throw std::invalid_argument("grid step must be positive");
    if (stop < start) throw std::invalid_argument("grid stop before start");
    auto n = static_cast<size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> v(n);
    for (size_t i = 0; i < n; ++i) v[i] = start + static_cast<double>(i) * step;
    return v;
  }
};

struct ExperimentConfig {
  std::string experiment;
  json parameters = json::object();
  std::string format = "csv";
  std::string output_path;  ///< empty means stdout
  std::uint64_t seed = 1;
};

namespace detail {

inline const std::map<std::string, std::vector<std::string>>& allowed_parameters() {
  static const std::map<std::string, std::vector<std::string>> allowed = {
      {"partial_symmetrizer", {"eta"}},
      {"cloner", {"M", "eta"}},
      {"partial_swap", {"phi"}},
      {"amplifier_oracle", {"M", "lambda"}},
      {"formulas", {"M"}},
  };
  return allowed;
}

inline GridSpec grid_from_json(const json& v) {
  if (v.is_number()) {
    double x = v.get<double>();
    return GridSpec{x, x, 1.0};
  }
  if (v.is_object()) {
    for (const auto& [key, val] : v.items()) {
      if (key != "start" && key != "stop" && key != "step")
        throw std::invalid_argument("unknown grid key: " + key);
    }
    GridSpec g;
    g.start = v.at("start").get<double>();
    g.stop = v.at("stop").get<double>();
    g.step = v.value("step", 1.0);
    return g;
  }
  throw std::invalid_argument("grid must be a number or {start, stop, step}");
}

}  // namespace detail

/// Parses and validates a schema-1 config; unknown keys are rejected.
inline ExperimentConfig parse_config(const json& j) {
  static const std::set<std::string> top_keys = {"schema", "experiment", "parameters",
                                                 "output", "seed"};
  for (const auto& [key, val] : j.items()) {
    if (!top_keys.count(key)) throw std::invalid_argument("unknown config key: " + key);
  }
  if (j.value("schema", 0) != 1)
    throw std::invalid_argument("config requires \"schema\": 1");

  ExperimentConfig c;
  c.experiment = j.at("experiment").get<std::string>();
  const auto& allowed = detail::allowed_parameters();
  auto it = allowed.find(c.experiment);
  if (it == allowed.end())
    throw std::invalid_argument("unknown experiment: " + c.experiment);

  if (j.contains("parameters")) {
    c.parameters = j.at("parameters");
    for (const auto& [key, val] : c.parameters.items()) {
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
        throw std::invalid_argument("unknown parameter \"" + key + "\" for " +
                                    c.experiment);
    }
  }
  if (j.contains("output")) {
    const json& out = j.at("output");
    for (const auto& [key, val] : out.items()) {
      if (key != "format" && key != "path")
        throw std::invalid_argument("unknown output key: " + key);
    }
    c.format = out.value("format", "csv");
    if (c.format != "csv" && c.format != "json")
      throw std::invalid_argument("format must be csv or json");
    c.output_path = out.value("path", "");
  }
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

// ---------------------------------------------------------------------------
// Result tables
// ---------------------------------------------------------------------------

struct Column {
  std::string name;
  std::string provenance;  ///< parameter | simulated | closed_form | difference
};

struct Table {
  std::string experiment;
  std::vector<Column> columns;
  std::vector<std::vector<double>> rows;
};

/// Full-precision (17 significant digit) decimal form, locale-independent.
inline std::string format_cell(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_csv(const Table& t) {
  std::ostringstream out;
  out << "# schema: 1\n# experiment: " << t.experiment << "\n# provenance:";
  for (size_t i = 0; i < t.columns.size(); ++i)
    out << (i ? "," : " ") << t.columns[i].name << "=" << t.columns[i].provenance;
  out << "\n";
  for (size_t i = 0; i < t.columns.size(); ++i)
    out << (i ? "," : "") << t.columns[i].name;
  out << "\n";
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i]);
    out << "\n";
  }
  return out.str();
}

inline std::string to_json_text(const Table& t) {
  json j;
  j["schema"] = 1;
  j["experiment"] = t.experiment;
  j["columns"] = json::array();
  for (const auto& c : t.columns)
    j["columns"].push_back({{"name", c.name}, {"provenance", c.provenance}});
  j["rows"] = json::array();
  for (const auto& row : t.rows) {
    json r = json::array();
    for (double v : row) r.push_back(format_cell(v));
    j["rows"].push_back(r);
  }
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Experiment runners
// ---------------------------------------------------------------------------

namespace detail {

inline FockState psi_perp_pair(const std::string& ma = "A_in",
                               const std::string& mb = "B_in") {
  return tensor(polarization_qubit(ma, 1.0, 0.0), polarization_qubit(mb, 0.0, 1.0));
}

inline Table run_partial_symmetrizer_experiment(const ExperimentConfig& c) {
  GridSpec grid = c.parameters.contains("eta")
                      ? grid_from_json(c.parameters.at("eta"))
                      : GridSpec{0.0, 1.0, 0.05};
  Table t;
  t.experiment = c.experiment;
  t.columns = {{"eta", "parameter"},
               {"p_sym_sim", "simulated"},
               {"p_sym_formula", "closed_form"},
               {"p_sym_absdiff", "difference"},
               {"map_deviation", "difference"}};
  for (double eta : grid.values()) {
    auto result = run_partial_symmetrizer(psi_perp_pair(), eta);
    double formula = success_probability_formula(0.5, 0.5, eta);
    double map_dev = max_abs_difference(
        reconstruct_conditional_map(build_partial_symmetrizer(eta)),
        expected_symmetrizer_map(cplx{eta, 0.0}));
    t.rows.push_back({eta, result.probability, formula,
                      std::abs(result.probability - formula), map_dev});
  }
  return t;
}

inline Table run_cloner_experiment(const ExperimentConfig& c) {
  int M = c.parameters.value("M", 2);
  GridSpec grid = c.parameters.contains("eta")
                      ? grid_from_json(c.parameters.at("eta"))
                      : GridSpec{0.0, 1.0, 0.05};
  Table t;
  t.experiment = c.experiment;
  t.columns = {{"eta", "parameter"},
               {"q", "parameter"},
               {"fidelity_sim", "simulated"},
               {"fidelity_formula", "closed_form"},
               {"fidelity_absdiff", "difference"},
               {"p_sym", "simulated"},
               {"p_epr", "simulated"},
               {"p_tot", "simulated"},
               {"overlap_with_target", "simulated"}};
  CloningTarget target = target_state(M);
  for (double eta : grid.values()) {
    ClonerResult r = run_cloner(M, eta);
    // reference fidelity from the covariant output form, built by operator
    // algebra rather than circuit simulation
    double f_ref;
    if (M == 2) {
      f_ref = fidelity_F2(r.q);
    } else {
      OperatorPolynomial form;
      form.add_term({{ModeSlot{"A_out", kPolPsi}, 1}, {ModeSlot{"B_out", kPolPerp}, 1}},
                    1.0);
      form.add_term({{ModeSlot{"A_out", kPolPerp}, 1}, {ModeSlot{"B_out", kPolPsi}, 1}},
                    r.q);
      FockState ref = monomial_to_state(
          poly_mul(poly_pow(pair_creation_operator("A_out", "B_out"), M - 1), form),
          {"A_out", "B_out"});
      f_ref = single_photon_fidelity(ref, "A_out", kPolPsi);
    }
    t.rows.push_back({eta, r.q, r.clone_fidelity, f_ref,
                      std::abs(r.clone_fidelity - f_ref), r.p_sym, r.p_epr,
                      r.probability, std::abs(inner_product(target.target, r.joint))});
  }
  return t;
}

inline Table run_partial_swap_experiment(const ExperimentConfig& c) {
  GridSpec grid = c.parameters.contains("phi")
                      ? grid_from_json(c.parameters.at("phi"))
                      : GridSpec{0.0, std::numbers::pi, std::numbers::pi / 8.0};
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  Table t;
  t.experiment = c.experiment;
  t.columns = {{"phi", "parameter"},
               {"probability_sim", "simulated"},
               {"probability_formula", "closed_form"},
               {"probability_absdiff", "difference"},
               {"map_deviation", "difference"},
               {"half_angle_twice_deviation", "difference"}};
  for (double phi : grid.values()) {
    // random two-photon polarization input, seeded for reproducibility
    FockState in(std::set<std::string>{"A_in", "B_in"});
    for (int p = 0; p < 2; ++p)
      for (int pp = 0; pp < 2; ++pp)
        in.add_term({{ModeSlot{"A_in", p}, 1}, {ModeSlot{"B_in", pp}, 1}},
                    cplx{coeff(rng), coeff(rng)});
    in = in.normalized();
    auto result = run(build_partial_swap(phi), in);
    double map_dev =
        max_abs_difference(reconstruct_conditional_map(build_partial_swap(phi)),
                           expected_symmetrizer_map(std::exp(cplx{0.0, phi})));
    // two phi/2 stages against one phi stage
    auto half = run(build_partial_swap(phi / 2.0), in);
    auto twice = run(build_partial_swap(phi / 2.0),
                     relabel_spatial(half.conditional,
                                     {{"A_out", "A_in"}, {"B_out", "B_in"}}));
    double compose_dev =
        std::abs(std::abs(inner_product(twice.conditional, result.conditional)) - 1.0);
    t.rows.push_back({phi, result.probability, 0.125,
                      std::abs(result.probability - 0.125), map_dev, compose_dev});
  }
  return t;
}

inline Table run_amplifier_experiment(const ExperimentConfig& c) {
  int M = c.parameters.value("M", 2);
  GridSpec grid = c.parameters.contains("lambda")
                      ? grid_from_json(c.parameters.at("lambda"))
                      : GridSpec{0.1, 0.5, 0.1};
  Table t;
  t.experiment = c.experiment;
  t.columns = {{"lambda", "parameter"},
               {"q_fit", "simulated"},
               {"fit_residual", "difference"},
               {"fidelity_sim", "simulated"},
               {"dense_oracle_deviation", "difference"}};
  const int truncation = std::max(12, 2 * M);
  for (double lambda : grid.values()) {
    AmplifierModel model = AmplifierModel::from_lambda(lambda, truncation);
    AmplifierOutput out = amplifier_output(model, M);
    FockState dense = oracle::dense_evolve_block(lambda, 30);
    double dev = oracle::max_sector_difference(dense, amplifier_evolve(model),
                                               truncation);
    t.rows.push_back({lambda, out.q_fit, out.residual,
                      single_photon_fidelity(out.state, "A", kPolPsi), dev});
  }
  return t;
}

inline Table run_formulas_experiment(const ExperimentConfig& c) {
  GridSpec grid = c.parameters.contains("M") ? grid_from_json(c.parameters.at("M"))
                                             : GridSpec{1.0, 10.0, 1.0};
  Table t;
  t.experiment = c.experiment;
  t.columns = {{"M", "parameter"},
               {"alpha_sq_sum", "closed_form"},
               {"F_perp", "closed_form"},
               {"alpha_weighted_F", "closed_form"},
               {"F_absdiff", "difference"},
               {"q_opt", "closed_form"}};
  for (double m_raw : grid.values()) {
    int M = static_cast<int>(std::lround(m_raw));
    if (M < 1) throw std::invalid_argument("M must be >= 1");
    double norm = 0.0, weighted = 0.0;
    for (int j = 0; j <= M; ++j) {
      double a2 = alpha(j, M) * alpha(j, M);
      norm += a2;
      weighted += a2 * static_cast<double>(M - j) / M;
    }
    double f = fidelity_Fperp(M);
    t.rows.push_back({static_cast<double>(M), norm, f, weighted,
                      std::abs(weighted - f), M >= 2 ? optimal_q(M) : 0.0});
  }
  return t;
}

}  // namespace detail

/// Runs one experiment and returns its table; deterministic for a fixed
/// (config, seed).
inline Table run_experiment(const ExperimentConfig& c) {
  if (c.experiment == "partial_symmetrizer")
    return detail::run_partial_symmetrizer_experiment(c);
  if (c.experiment == "cloner") return detail::run_cloner_experiment(c);
  if (c.experiment == "partial_swap") return detail::run_partial_swap_experiment(c);
  if (c.experiment == "amplifier_oracle") return detail::run_amplifier_experiment(c);
  if (c.experiment == "formulas") return detail::run_formulas_experiment(c);
  throw std::invalid_argument("unknown experiment: " + c.experiment);
}

inline std::string render(const Table& t, const std::string& format) {
  if (format == "csv") return to_csv(t);
  if (format == "json") return to_json_text(t);
  throw std::invalid_argument("format must be csv or json");
}

}  // namespace linopt
