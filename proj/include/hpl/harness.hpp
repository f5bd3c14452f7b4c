#pragma once

// Monte Carlo experiment harness: replication seeding, cell runners for the
// rejection-rate tables and the estimator sweeps, checkpoint/resume via a
// JSON manifest, and report emission.
//
// Determinism contract: every replication's randomness is a pure function of
// (config seed, sweep value, case, horizon, replication index), results land
// in slot arrays keyed by replication index, and aggregation is sequential.
// A run therefore produces byte-identical reports for any worker count; the
// only nondeterministic output is timings.json.
//
// Seeding fine print: inside a variance sweep the horizon is deliberately
// left out of the seed and paths of different horizons are drawn as nested
// prefixes of one factorization, so the sweep sees common random numbers
// across its T grid. Table cells and standalone replications hash the
// horizon in, matching the documented per-replication seed exactly.

#include <Eigen/Dense>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hpl/asymptotics.hpp"
#include "hpl/config.hpp"
#include "hpl/errors.hpp"
#include "hpl/estimator.hpp"
#include "hpl/io.hpp"
#include "hpl/mvn.hpp"
#include "hpl/pathgen.hpp"
#include "hpl/pool.hpp"
#include "hpl/stats.hpp"

namespace hpl {

// --- seeding -----------------------------------------------------------------

inline std::uint64_t replication_seed(std::uint64_t base, double alpha,
                                      std::uint64_t case_fingerprint,
                                      std::size_t t, std::uint64_t replication,
                                      bool include_horizon = true) {
  std::uint64_t h = mix64(base);
  h = hash_combine(h, double_bits(alpha));
  h = hash_combine(h, case_fingerprint);
  if (include_horizon) h = hash_combine(h, static_cast<std::uint64_t>(t));
  return hash_combine(h, replication);
}

// --- one replication ---------------------------------------------------------

struct ReplicationOutcome {
  std::uint64_t seed = 0;
  ZetaTriple triple;          // deviation functionals at the true parameters
  bool has_triple = false;
  TrigParams theta_hat;       // estimation modes
  bool estimated = false;
  bool converged = false;
  double objective = 0.0;     // Q_T at the estimate
  Eigen::VectorXd deviation;  // normalized deviation of the estimate
};

namespace detail {

inline ReplicationOutcome replicate_zeta(const SamplePath& xi,
                                         const TransformSpec& transform,
                                         const TrigParams& theta) {
  ReplicationOutcome out;
  out.seed = xi.seed;
  const SamplePath eps = transform_path(transform, xi);
  out.triple = zeta_functionals(eps, theta);
  out.has_triple = true;
  return out;
}

inline ReplicationOutcome replicate_lse(const SamplePath& xi,
                                        const TransformSpec& transform,
                                        const TrigParams& theta,
                                        const LseOptions& lse = {}) {
  ReplicationOutcome out;
  out.seed = xi.seed;
  SamplePath x = transform_path(transform, xi);
  for (std::size_t i = 0; i < x.values.size(); ++i)
    x.values[i] += regression_value(theta, static_cast<double>(i + 1));
  const WalkerSet walker(x.values.size(), theta.phi_lower, theta.phi_upper);
  const LseResult est = walker_lse(x, theta.harmonics.size(), walker, lse);
  out.theta_hat = est.theta;
  out.estimated = true;
  out.converged = est.diagnostics.converged;
  out.objective = est.objective;
  out.deviation = normalized_deviation(est.theta, theta, x.values.size());
  return out;
}

/// Shared per-cell path source; thread-safe sampling after construction.
class CellSampler {
 public:
  CellSampler(const NoiseModel& model, std::size_t t, const PathGenOptions& opt) {
    const bool dense = opt.route == PathRoute::kCholesky ||
                       (opt.route == PathRoute::kAuto && t <= opt.cholesky_max);
    if (dense) {
      if (t > opt.cholesky_max)
        throw size_error("cell sampler: horizon " + std::to_string(t) +
                         " exceeds cholesky_max");
      dense_ = std::make_shared<CholeskyFactor>(model, t, opt.nugget);
    } else {
      circulant_ = std::make_shared<CirculantEmbedding>(
          model, t, opt.padding_factor, opt.clip_tolerance);
    }
  }

  bool prefix_capable() const { return dense_ != nullptr; }

  SamplePath sample(std::uint64_t seed) const {
    return dense_ ? dense_->sample(seed) : circulant_->sample(seed);
  }

  SamplePath sample_prefix(std::size_t t, std::uint64_t seed) const {
    if (!dense_)
      throw config_error("cell sampler: prefix sampling needs the dense route");
    return dense_->sample_prefix(t, seed);
  }

 private:
  std::shared_ptr<const CholeskyFactor> dense_;
  std::shared_ptr<const CirculantEmbedding> circulant_;
};

struct SweepPoint {
  double alpha = 0.0;
  NoiseModel model;
};

inline std::vector<SweepPoint> sweep_models(const ExperimentConfig& config) {
  std::vector<SweepPoint> out;
  if (config.alphas.empty()) {
    out.push_back({config.noise_template.alpha_min(), config.noise_template});
    return out;
  }
  out.reserve(config.alphas.size());
  for (double a : config.alphas)
    out.push_back({a, model_for_alpha(config.noise_template, a)});
  return out;
}

inline std::string compact(double v) {
  std::ostringstream ss;
  ss.precision(12);
  ss << v;
  return ss.str();
}

inline std::string table_cell_id(double alpha, const std::string& case_name,
                                 std::size_t t) {
  return "zeta_a" + compact(alpha) + "_" + case_name + "_T" + std::to_string(t);
}

inline std::string lse_cell_id(double alpha, const std::string& case_name) {
  return "lse_a" + compact(alpha) + "_" + case_name;
}

}  // namespace detail

/// Standalone replication with the documented seed derivation. Cell runners
/// use the same logic around a shared factorization.
inline ReplicationOutcome run_replication(const ExperimentConfig& config,
                                          double alpha,
                                          const std::string& case_name,
                                          std::size_t t,
                                          std::uint64_t replication_index) {
  validate(config);
  const NoiseModel model = model_for_alpha(config.noise_template, alpha);
  const TransformSpec transform = transform_from_json(json(case_name));
  const std::uint64_t seed =
      replication_seed(config.seed, alpha, fingerprint(transform), t,
                       replication_index, /*include_horizon=*/true);
  const SamplePath xi = generate_gaussian_path(model, t, seed, config.generation);
  if (config.mode == ExperimentMode::kZetaNormality)
    return detail::replicate_zeta(xi, transform, config.theta);
  return detail::replicate_lse(xi, transform, config.theta);
}

// --- cell records ------------------------------------------------------------

struct TableCellRecord {
  double alpha = 0.0;
  std::string case_name;
  std::size_t t = 0;
  int n_sets = 0;
  int reps_per_set = 0;
  std::vector<double> p_hz, p_dh;  // per-set p-values, set order
  double rate_hz = 0.0, rate_dh = 0.0;
};

struct SweepRow {
  std::size_t t = 0;
  std::size_t harmonic = 0;  // 1-based
  double mean_a = 0.0, mean_b = 0.0, mean_phi = 0.0;
  double var_a = 0.0, var_b = 0.0, var_phi = 0.0;
  int included = 0, excluded = 0;
};

struct NormalitySummary {
  std::size_t t = 0;
  int dim = 0;
  std::vector<double> emp_cov;  // row-major dim x dim
  std::vector<double> gamma;    // empty when the limit matrix is undefined
  double stat_hz = 0.0, p_hz = -1.0;
  double stat_dh = 0.0, p_dh = -1.0;  // -1 marks "not computed"
  int included = 0, excluded = 0;
  double max_rel_diag_err = -1.0;
};

struct LseCellRecord {
  double alpha = 0.0;
  std::string case_name;
  bool crn = false;  // nested-prefix common random numbers across the T grid
  std::vector<SweepRow> rows;                // (T, harmonic) in grid order
  std::vector<NormalitySummary> normality;   // per T; lse_normality mode only
};

struct ExperimentReport {
  ExperimentConfig config;
  std::uint64_t config_fingerprint = 0;
  std::vector<TableCellRecord> table_cells;
  std::vector<LseCellRecord> lse_cells;
  std::map<std::string, std::string> artifacts;  // cell id -> relative path
  // Volatile fields; emitted to timings.json only.
  std::map<std::string, double> cell_seconds;
  double total_seconds = 0.0;
  unsigned workers_used = 1;
};

struct RunOptions {
  unsigned workers = 1;
  std::string artifact_dir;  // empty: no side files, no checkpointing
  bool resume = false;       // reuse finished cells from an existing manifest
};

// --- manifest (de)serialization -----------------------------------------------

inline json to_json(const TableCellRecord& cell) {
  return {{"kind", "table"},       {"alpha", cell.alpha},
          {"case", cell.case_name}, {"T", cell.t},
          {"n_sets", cell.n_sets}, {"reps_per_set", cell.reps_per_set},
          {"p_hz", cell.p_hz},     {"p_dh", cell.p_dh},
          {"rate_hz", cell.rate_hz}, {"rate_dh", cell.rate_dh}};
}

inline TableCellRecord table_cell_from_json(const json& j) {
  TableCellRecord cell;
  cell.alpha = j.at("alpha").get<double>();
  cell.case_name = j.at("case").get<std::string>();
  cell.t = j.at("T").get<std::size_t>();
  cell.n_sets = j.at("n_sets").get<int>();
  cell.reps_per_set = j.at("reps_per_set").get<int>();
  cell.p_hz = j.at("p_hz").get<std::vector<double>>();
  cell.p_dh = j.at("p_dh").get<std::vector<double>>();
  cell.rate_hz = j.at("rate_hz").get<double>();
  cell.rate_dh = j.at("rate_dh").get<double>();
  return cell;
}

inline json to_json(const SweepRow& row) {
  return {{"T", row.t},           {"harmonic", row.harmonic},
          {"mean_A", row.mean_a}, {"mean_B", row.mean_b},
          {"mean_phi", row.mean_phi},
          {"var_A", row.var_a},   {"var_B", row.var_b},
          {"var_phi", row.var_phi},
          {"included", row.included}, {"excluded", row.excluded}};
}

inline SweepRow sweep_row_from_json(const json& j) {
  SweepRow row;
  row.t = j.at("T").get<std::size_t>();
  row.harmonic = j.at("harmonic").get<std::size_t>();
  row.mean_a = j.at("mean_A").get<double>();
  row.mean_b = j.at("mean_B").get<double>();
  row.mean_phi = j.at("mean_phi").get<double>();
  row.var_a = j.at("var_A").get<double>();
  row.var_b = j.at("var_B").get<double>();
  row.var_phi = j.at("var_phi").get<double>();
  row.included = j.at("included").get<int>();
  row.excluded = j.at("excluded").get<int>();
  return row;
}

inline json to_json(const NormalitySummary& s) {
  return {{"T", s.t},
          {"dim", s.dim},
          {"emp_cov", s.emp_cov},
          {"gamma", s.gamma},
          {"stat_hz", s.stat_hz},
          {"p_hz", s.p_hz},
          {"stat_dh", s.stat_dh},
          {"p_dh", s.p_dh},
          {"included", s.included},
          {"excluded", s.excluded},
          {"max_rel_diag_err", s.max_rel_diag_err}};
}

inline NormalitySummary normality_summary_from_json(const json& j) {
  NormalitySummary s;
  s.t = j.at("T").get<std::size_t>();
  s.dim = j.at("dim").get<int>();
  s.emp_cov = j.at("emp_cov").get<std::vector<double>>();
  s.gamma = j.at("gamma").get<std::vector<double>>();
  s.stat_hz = j.at("stat_hz").get<double>();
  s.p_hz = j.at("p_hz").get<double>();
  s.stat_dh = j.at("stat_dh").get<double>();
  s.p_dh = j.at("p_dh").get<double>();
  s.included = j.at("included").get<int>();
  s.excluded = j.at("excluded").get<int>();
  s.max_rel_diag_err = j.at("max_rel_diag_err").get<double>();
  return s;
}

inline json to_json(const LseCellRecord& cell) {
  json rows = json::array();
  for (const auto& r : cell.rows) rows.push_back(to_json(r));
  json normality = json::array();
  for (const auto& s : cell.normality) normality.push_back(to_json(s));
  return {{"kind", "lse"},         {"alpha", cell.alpha},
          {"case", cell.case_name}, {"crn", cell.crn},
          {"rows", rows},          {"normality", normality}};
}

inline LseCellRecord lse_cell_from_json(const json& j) {
  LseCellRecord cell;
  cell.alpha = j.at("alpha").get<double>();
  cell.case_name = j.at("case").get<std::string>();
  cell.crn = j.at("crn").get<bool>();
  for (const auto& r : j.at("rows")) cell.rows.push_back(sweep_row_from_json(r));
  for (const auto& s : j.at("normality"))
    cell.normality.push_back(normality_summary_from_json(s));
  return cell;
}

inline json manifest_json(const ExperimentReport& report) {
  json cells = json::object();
  for (const auto& cell : report.table_cells)
    cells[detail::table_cell_id(cell.alpha, cell.case_name, cell.t)] =
        to_json(cell);
  for (const auto& cell : report.lse_cells)
    cells[detail::lse_cell_id(cell.alpha, cell.case_name)] = to_json(cell);
  return {{"format", "hpl-manifest-1"},
          {"mode", mode_name(report.config.mode)},
          {"fingerprint", report.config_fingerprint},
          {"config", to_json(report.config)},
          {"cells", cells},
          {"artifacts", report.artifacts}};
}

namespace detail {

inline void save_checkpoint(const ExperimentReport& report,
                            const std::filesystem::path& path) {
  if (path.empty()) return;
  atomic_write_text(path, manifest_json(report).dump(2) + "\n");
}

/// Finished cells of a matching manifest, keyed by cell id.
inline std::map<std::string, json> load_checkpoint(
    const std::filesystem::path& path, const ExperimentReport& report,
    std::map<std::string, std::string>* artifacts) {
  std::map<std::string, json> cells;
  if (path.empty() || !std::filesystem::exists(path)) return cells;
  std::ifstream in(path);
  if (!in) throw io_error("cannot open manifest: " + path.string());
  json manifest = json::parse(in, nullptr, true);
  if (manifest.value("format", "") != "hpl-manifest-1")
    throw io_error("unrecognized manifest format in " + path.string());
  if (manifest.value("fingerprint", std::uint64_t{0}) !=
      report.config_fingerprint)
    throw config_error("manifest " + path.string() +
                       " belongs to a different configuration");
  for (const auto& [key, value] : manifest.at("cells").items())
    cells[key] = value;
  if (artifacts && manifest.contains("artifacts"))
    for (const auto& [key, value] : manifest.at("artifacts").items())
      (*artifacts)[key] = value.get<std::string>();
  return cells;
}

inline Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& rows) {
  const Eigen::Index n = rows.rows();
  const Eigen::MatrixXd centered = rows.rowwise() - rows.colwise().mean();
  return centered.transpose() * centered / static_cast<double>(n - 1);
}

inline std::vector<double> flatten(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

inline void write_qq_artifacts(const Eigen::MatrixXd& pooled,
                               const std::string& cell_id,
                               const std::filesystem::path& dir,
                               ExperimentReport* report) {
  const auto d2 = mahalanobis_squared(pooled);
  const auto pairs = chi_square_qq(d2, static_cast<std::size_t>(pooled.cols()));
  std::string csv = "theoretical,empirical\n";
  for (const auto& [q, v] : pairs)
    csv += format_double(q) + "," + format_double(v) + "\n";
  const std::string qq_name = "qq_" + cell_id + ".csv";
  atomic_write_text(dir / qq_name, csv);
  report->artifacts["qq|" + cell_id] = qq_name;

  const Eigen::VectorXd mean = pooled.colwise().mean();
  const Eigen::MatrixXd cov = sample_covariance(pooled);
  const double c = 3.0;
  const ContourEllipsoid ell = contour_ellipsoid(mean, cov, c);
  std::size_t inside = 0;
  for (double v : d2)
    if (v <= c * c) ++inside;
  json out = {{"c", c},
              {"inside_fraction",
               static_cast<double>(inside) / static_cast<double>(d2.size())},
              {"n", d2.size()},
              {"mean", std::vector<double>(mean.data(), mean.data() + mean.size())},
              {"half_lengths",
               std::vector<double>(ell.half_lengths.data(),
                                   ell.half_lengths.data() + ell.half_lengths.size())},
              {"directions", json::array()}};
  for (Eigen::Index i = 0; i < ell.directions.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < ell.directions.cols(); ++j)
      row.push_back(ell.directions(i, j));
    out["directions"].push_back(row);
  }
  const std::string ell_name = "ellipsoid_" + cell_id + ".json";
  atomic_write_text(dir / ell_name, out.dump(2) + "\n");
  report->artifacts["ellipsoid|" + cell_id] = ell_name;
}

}  // namespace detail

// --- rejection-rate tables -----------------------------------------------------

inline ExperimentReport run_table_experiment(const ExperimentConfig& config,
                                             const RunOptions& opt = {}) {
  validate(config);
  if (config.theta.harmonics.size() != 1)
    throw config_error(
        "table experiment: deviation functionals need exactly one harmonic");

  ExperimentReport report;
  report.config = config;
  report.config_fingerprint = fingerprint(config);
  report.workers_used = opt.workers;

  const std::filesystem::path dir = opt.artifact_dir;
  std::filesystem::path checkpoint;
  if (!dir.empty()) {
    std::filesystem::create_directories(dir);
    checkpoint = dir / "manifest.json";
  }
  std::map<std::string, json> done;
  if (opt.resume)
    done = detail::load_checkpoint(checkpoint, report, &report.artifacts);

  const auto t_start = std::chrono::steady_clock::now();
  const int reps = config.replications_per_set;
  const int sets = config.n_sets;
  const std::size_t total = static_cast<std::size_t>(reps) * sets;

  for (const auto& sweep : detail::sweep_models(config)) {
    for (std::size_t t : config.t_values) {
      bool any_pending = false;
      for (const auto& case_name : config.cases)
        if (!done.count(detail::table_cell_id(sweep.alpha, case_name, t)))
          any_pending = true;
      std::optional<detail::CellSampler> sampler;
      if (any_pending)
        sampler.emplace(sweep.model, t, config.generation);

      for (const auto& case_name : config.cases) {
        const std::string id = detail::table_cell_id(sweep.alpha, case_name, t);
        if (auto it = done.find(id); it != done.end()) {
          report.table_cells.push_back(table_cell_from_json(it->second));
          continue;
        }
        const auto cell_start = std::chrono::steady_clock::now();
        const TransformSpec transform = transform_from_json(json(case_name));
        const std::uint64_t case_fp = fingerprint(transform);

        std::vector<std::array<double, 3>> triples(total);
        parallel_for(total, opt.workers, [&](std::size_t i) {
          const std::uint64_t seed = replication_seed(
              config.seed, sweep.alpha, case_fp, t, i, /*include_horizon=*/true);
          const SamplePath xi = sampler->sample(seed);
          const auto outcome =
              detail::replicate_zeta(xi, transform, config.theta);
          triples[i] = {outcome.triple.zeta_a, outcome.triple.zeta_b,
                        outcome.triple.zeta_phi};
        });

        TableCellRecord cell;
        cell.alpha = sweep.alpha;
        cell.case_name = case_name;
        cell.t = t;
        cell.n_sets = sets;
        cell.reps_per_set = reps;
        int reject_hz = 0, reject_dh = 0;
        for (int s = 0; s < sets; ++s) {
          Eigen::MatrixXd block(reps, 3);
          for (int r = 0; r < reps; ++r)
            for (int c = 0; c < 3; ++c)
              block(r, c) = triples[static_cast<std::size_t>(s) * reps + r]
                                   [static_cast<std::size_t>(c)];
          const MvnTestResult hz = henze_zirkler(block);
          const MvnTestResult dh = doornik_hansen(block);
          cell.p_hz.push_back(hz.p_value);
          cell.p_dh.push_back(dh.p_value);
          if (hz.p_value < config.significance) ++reject_hz;
          if (dh.p_value < config.significance) ++reject_dh;
        }
        cell.rate_hz = static_cast<double>(reject_hz) / sets;
        cell.rate_dh = static_cast<double>(reject_dh) / sets;

        if (!dir.empty() && t == config.t_values.back()) {
          Eigen::MatrixXd pooled(static_cast<Eigen::Index>(total), 3);
          for (std::size_t i = 0; i < total; ++i)
            for (int c = 0; c < 3; ++c)
              pooled(static_cast<Eigen::Index>(i), c) =
                  triples[i][static_cast<std::size_t>(c)];
          detail::write_qq_artifacts(pooled, id, dir, &report);
        }

        report.table_cells.push_back(cell);
        report.cell_seconds[id] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          cell_start)
                .count();
        detail::save_checkpoint(report, checkpoint);
      }
    }
  }
  report.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  detail::save_checkpoint(report, checkpoint);
  return report;
}

// --- estimator sweeps ------------------------------------------------------------

namespace detail {

struct EstimateSlot {
  std::vector<double> params;  // (A, B, phi) per harmonic
  bool ok = false;
  bool converged = false;
};

}  // namespace detail

/// Variance decay of the estimator over the T grid (lse_variance_sweep) and
/// normalized-deviation normality checks (lse_normality).
inline ExperimentReport run_variance_sweep(const ExperimentConfig& config,
                                           const RunOptions& opt = {}) {
  validate(config);
  ExperimentReport report;
  report.config = config;
  report.config_fingerprint = fingerprint(config);
  report.workers_used = opt.workers;

  const std::filesystem::path dir = opt.artifact_dir;
  std::filesystem::path checkpoint;
  if (!dir.empty()) {
    std::filesystem::create_directories(dir);
    checkpoint = dir / "manifest.json";
  }
  std::map<std::string, json> done;
  if (opt.resume)
    done = detail::load_checkpoint(checkpoint, report, &report.artifacts);

  const auto t_start = std::chrono::steady_clock::now();
  const bool want_normality = config.mode == ExperimentMode::kLseNormality;
  const std::size_t n_harmonics = config.theta.harmonics.size();
  const std::size_t dim = 3 * n_harmonics;
  const std::size_t reps_total =
      static_cast<std::size_t>(config.replications_per_set) *
      static_cast<std::size_t>(config.n_sets);
  const std::size_t t_count = config.t_values.size();
  const std::size_t t_max = config.t_values.back();

  for (const auto& sweep : detail::sweep_models(config)) {
    const bool crn = config.generation.route != PathRoute::kCirculant &&
                     t_max <= config.generation.cholesky_max;
    bool any_pending = false;
    for (const auto& case_name : config.cases)
      if (!done.count(detail::lse_cell_id(sweep.alpha, case_name)))
        any_pending = true;

    std::shared_ptr<const CholeskyFactor> factor;
    std::vector<detail::CellSampler> per_t;
    if (any_pending) {
      if (crn) {
        factor = std::make_shared<CholeskyFactor>(sweep.model, t_max,
                                                  config.generation.nugget);
      } else {
        per_t.reserve(t_count);
        for (std::size_t t : config.t_values)
          per_t.emplace_back(sweep.model, t, config.generation);
      }
    }

    for (const auto& case_name : config.cases) {
      const std::string id = detail::lse_cell_id(sweep.alpha, case_name);
      if (auto it = done.find(id); it != done.end()) {
        report.lse_cells.push_back(lse_cell_from_json(it->second));
        continue;
      }
      const auto cell_start = std::chrono::steady_clock::now();
      const TransformSpec transform = transform_from_json(json(case_name));
      const std::uint64_t case_fp = fingerprint(transform);

      std::vector<detail::EstimateSlot> slots(t_count * reps_total);
      parallel_for(slots.size(), opt.workers, [&](std::size_t i) {
        const std::size_t ti = i / reps_total;
        const std::size_t rep = i % reps_total;
        const std::size_t t = config.t_values[ti];
        const std::uint64_t seed =
            replication_seed(config.seed, sweep.alpha, case_fp, t, rep,
                             /*include_horizon=*/!crn);
        const SamplePath xi = crn ? factor->sample_prefix(t, seed)
                                  : per_t[ti].sample(seed);
        auto& slot = slots[i];
        try {
          const auto outcome =
              detail::replicate_lse(xi, transform, config.theta);
          slot.converged = outcome.converged;
          slot.ok = true;
          slot.params.reserve(dim);
          for (const auto& h : outcome.theta_hat.harmonics) {
            slot.params.push_back(h.a);
            slot.params.push_back(h.b);
            slot.params.push_back(h.phi);
          }
        } catch (const numerical_error&) {
          slot.ok = false;  // counted as an excluded replication
        }
      });

      LseCellRecord cell;
      cell.alpha = sweep.alpha;
      cell.case_name = case_name;
      cell.crn = crn;
      for (std::size_t ti = 0; ti < t_count; ++ti) {
        const std::size_t t = config.t_values[ti];
        std::vector<std::size_t> kept;
        for (std::size_t rep = 0; rep < reps_total; ++rep) {
          const auto& slot = slots[ti * reps_total + rep];
          if (slot.ok && slot.converged) kept.push_back(ti * reps_total + rep);
        }
        const int excluded = static_cast<int>(reps_total - kept.size());

        for (std::size_t k = 0; k < n_harmonics; ++k) {
          std::vector<double> va, vb, vphi;
          va.reserve(kept.size());
          vb.reserve(kept.size());
          vphi.reserve(kept.size());
          for (std::size_t idx : kept) {
            const auto& p = slots[idx].params;
            va.push_back(p[3 * k]);
            vb.push_back(p[3 * k + 1]);
            vphi.push_back(p[3 * k + 2]);
          }
          SweepRow row;
          row.t = t;
          row.harmonic = k + 1;
          row.included = static_cast<int>(kept.size());
          row.excluded = excluded;
          if (kept.size() >= 2) {
            row.mean_a = sample_mean(va);
            row.mean_b = sample_mean(vb);
            row.mean_phi = sample_mean(vphi);
            row.var_a = sample_variance(va);
            row.var_b = sample_variance(vb);
            row.var_phi = sample_variance(vphi);
          }
          cell.rows.push_back(row);
        }

        if (want_normality) {
          NormalitySummary summary;
          summary.t = t;
          summary.dim = static_cast<int>(dim);
          summary.included = static_cast<int>(kept.size());
          summary.excluded = excluded;
          if (kept.size() >= 8) {
            Eigen::MatrixXd dev(static_cast<Eigen::Index>(kept.size()),
                                static_cast<Eigen::Index>(dim));
            const double root_t = std::sqrt(static_cast<double>(t));
            for (std::size_t r = 0; r < kept.size(); ++r) {
              const auto& p = slots[kept[r]].params;
              for (std::size_t k = 0; k < n_harmonics; ++k) {
                const auto& truth = config.theta.harmonics[k];
                dev(static_cast<Eigen::Index>(r),
                    static_cast<Eigen::Index>(3 * k)) =
                    root_t * (p[3 * k] - truth.a);
                dev(static_cast<Eigen::Index>(r),
                    static_cast<Eigen::Index>(3 * k + 1)) =
                    root_t * (p[3 * k + 1] - truth.b);
                dev(static_cast<Eigen::Index>(r),
                    static_cast<Eigen::Index>(3 * k + 2)) =
                    root_t * static_cast<double>(t) * (p[3 * k + 2] - truth.phi);
              }
            }
            const MvnTestResult hz = henze_zirkler(dev);
            const MvnTestResult dh = doornik_hansen(dev);
            summary.stat_hz = hz.statistic;
            summary.p_hz = hz.p_value;
            summary.stat_dh = dh.statistic;
            summary.p_dh = dh.p_value;
            const Eigen::MatrixXd emp = detail::sample_covariance(dev);
            summary.emp_cov = detail::flatten(emp);
            try {
              const GammaMatrix gamma =
                  gamma_matrix(config.theta, sweep.model, transform);
              const Eigen::MatrixXd limit = gamma.assembled();
              summary.gamma = detail::flatten(limit);
              double worst = 0.0;
              for (Eigen::Index i = 0; i < limit.rows(); ++i)
                worst = std::max(worst, std::fabs(emp(i, i) - limit(i, i)) /
                                            limit(i, i));
              summary.max_rel_diag_err = worst;
            } catch (const numerical_error&) {
              // limit matrix undefined in this regime; leave gamma empty
            }
          }
          cell.normality.push_back(summary);
        }
      }

      report.lse_cells.push_back(cell);
      report.cell_seconds[id] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        cell_start)
              .count();
      detail::save_checkpoint(report, checkpoint);
    }
  }
  report.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  detail::save_checkpoint(report, checkpoint);
  return report;
}

/// Mode dispatch.
inline ExperimentReport run_experiment(const ExperimentConfig& config,
                                       const RunOptions& opt = {}) {
  if (config.mode == ExperimentMode::kZetaNormality)
    return run_table_experiment(config, opt);
  return run_variance_sweep(config, opt);
}

// --- report emission -------------------------------------------------------------

inline void emit_report(const ExperimentReport& report,
                        const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  if (!report.table_cells.empty()) {
    std::map<std::string, const TableCellRecord*> by_id;
    for (const auto& cell : report.table_cells)
      by_id[detail::table_cell_id(cell.alpha, cell.case_name, cell.t)] = &cell;
    std::string csv = "alpha,case,test";
    for (std::size_t t : report.config.t_values)
      csv += ",T" + std::to_string(t);
    csv += "\n";
    for (const auto& sweep : detail::sweep_models(report.config)) {
      for (const auto& case_name : report.config.cases) {
        for (const char* test : {"HZ", "DH"}) {
          csv += detail::compact(sweep.alpha) + "," + case_name + "," + test;
          for (std::size_t t : report.config.t_values) {
            const auto it =
                by_id.find(detail::table_cell_id(sweep.alpha, case_name, t));
            if (it == by_id.end()) {
              csv += ",NA";
            } else {
              const double rate = test[0] == 'H' ? it->second->rate_hz
                                                 : it->second->rate_dh;
              csv += "," + detail::compact(rate);
            }
          }
          csv += "\n";
        }
      }
    }
    atomic_write_text(out_dir / "rates.csv", csv);
  }

  bool any_rows = false, any_normality = false;
  for (const auto& cell : report.lse_cells) {
    if (!cell.rows.empty()) any_rows = true;
    if (!cell.normality.empty()) any_normality = true;
  }

  if (any_rows) {
    std::string csv =
        "alpha,case,harmonic,T,mean_A,mean_B,mean_phi,var_A,var_B,var_phi,"
        "included,excluded\n";
    for (const auto& cell : report.lse_cells)
      for (const auto& row : cell.rows) {
        csv += detail::compact(cell.alpha) + "," + cell.case_name + "," +
               std::to_string(row.harmonic) + "," + std::to_string(row.t) + "," +
               format_double(row.mean_a) + "," + format_double(row.mean_b) +
               "," + format_double(row.mean_phi) + "," +
               format_double(row.var_a) + "," + format_double(row.var_b) + "," +
               format_double(row.var_phi) + "," + std::to_string(row.included) +
               "," + std::to_string(row.excluded) + "\n";
      }
    atomic_write_text(out_dir / "variance_sweep.csv", csv);
  }

  if (any_normality) {
    std::string csv =
        "alpha,case,T,dim,stat_hz,p_hz,stat_dh,p_dh,included,excluded,"
        "max_rel_diag_err\n";
    for (const auto& cell : report.lse_cells)
      for (const auto& s : cell.normality) {
        csv += detail::compact(cell.alpha) + "," + cell.case_name + "," +
               std::to_string(s.t) + "," + std::to_string(s.dim) + "," +
               format_double(s.stat_hz) + "," +
               (s.p_hz < 0 ? "NA" : format_double(s.p_hz)) + "," +
               format_double(s.stat_dh) + "," +
               (s.p_dh < 0 ? "NA" : format_double(s.p_dh)) + "," +
               std::to_string(s.included) + "," + std::to_string(s.excluded) +
               "," +
               (s.max_rel_diag_err < 0 ? "NA"
                                       : format_double(s.max_rel_diag_err)) +
               "\n";
        const std::string id =
            detail::lse_cell_id(cell.alpha, cell.case_name) + "_T" +
            std::to_string(s.t);
        if (!s.gamma.empty()) {
          Eigen::MatrixXd limit(s.dim, s.dim);
          for (int i = 0; i < s.dim; ++i)
            for (int j = 0; j < s.dim; ++j)
              limit(i, j) = s.gamma[static_cast<std::size_t>(i) * s.dim + j];
          write_matrix_csv(limit, out_dir / ("gamma_" + id + ".csv"));
        }
        if (!s.emp_cov.empty()) {
          Eigen::MatrixXd emp(s.dim, s.dim);
          for (int i = 0; i < s.dim; ++i)
            for (int j = 0; j < s.dim; ++j)
              emp(i, j) = s.emp_cov[static_cast<std::size_t>(i) * s.dim + j];
          write_matrix_csv(emp, out_dir / ("cov_" + id + ".csv"));
        }
      }
    atomic_write_text(out_dir / "normality.csv", csv);
  }

  atomic_write_text(out_dir / "manifest.json",
                    manifest_json(report).dump(2) + "\n");

  json timings = {{"workers", report.workers_used},
                  {"total_seconds", report.total_seconds},
                  {"cell_seconds", report.cell_seconds}};
  atomic_write_text(out_dir / "timings.json", timings.dump(2) + "\n");
}

}  // namespace hpl
