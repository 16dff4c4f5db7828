#include "biaslab/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "biaslab/classification.hpp"
#include "biaslab/csv.hpp"
#include "biaslab/descent.hpp"
#include "biaslab/errors.hpp"
#include "biaslab/factorization.hpp"
#include "biaslab/models.hpp"
#include "biaslab/numerics.hpp"
#include "biaslab/oracles.hpp"
#include "biaslab/regularizers.hpp"
#include "biaslab/rng.hpp"

namespace biaslab {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::SparseRegressionSweep: return "sparse_regression_sweep";
    case ExperimentKind::AlphaThresholdVsN: return "alpha_threshold_vs_n";
    case ExperimentKind::DepthPotentials: return "depth_potentials";
    case ExperimentKind::ExplicitVsImplicit: return "explicit_vs_implicit";
    case ExperimentKind::WidthPhaseDiagram: return "width_phase_diagram";
    case ExperimentKind::LogisticMarginPath: return "logistic_margin_path";
    case ExperimentKind::OptimizerOracleTable: return "optimizer_oracle_table";
  }
  return "?";
}

namespace {

std::optional<ExperimentKind> kind_from_string(const std::string& name) {
  for (const ExperimentKind k :
       {ExperimentKind::SparseRegressionSweep, ExperimentKind::AlphaThresholdVsN,
        ExperimentKind::DepthPotentials, ExperimentKind::ExplicitVsImplicit,
        ExperimentKind::WidthPhaseDiagram, ExperimentKind::LogisticMarginPath,
        ExperimentKind::OptimizerOracleTable}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

double pnum(const json& p, const char* key, double def) {
  return p.contains(key) ? p.at(key).get<double>() : def;
}

long pint(const json& p, const char* key, long def) {
  return p.contains(key) ? p.at(key).get<long>() : def;
}

std::vector<double> pvec(const json& p, const char* key) {
  return p.at(key).get<std::vector<double>>();
}

std::vector<std::uint64_t> pseeds(const json& p) {
  return p.at("seeds").get<std::vector<std::uint64_t>>();
}

// ---------------------------------------------------------------------------
// Validation

void require(std::vector<std::string>& out, bool ok, const std::string& what) {
  if (!ok) out.push_back(what);
}

bool is_pos_number_array(const json& j, bool strictly = false) {
  if (!j.is_array() || j.empty()) return false;
  for (const auto& v : j) {
    if (!v.is_number()) return false;
    if (strictly && !(v.get<double>() > 0.0)) return false;
  }
  return true;
}

}  // namespace

std::vector<std::string> validate(const json& config_json) {
  std::vector<std::string> v;
  if (!config_json.is_object()) {
    v.push_back("config must be a JSON object");
    return v;
  }
  if (!config_json.contains("experiment") ||
      !config_json.at("experiment").is_string()) {
    v.push_back("experiment: required string field");
    return v;
  }
  const auto kind = kind_from_string(config_json.at("experiment"));
  if (!kind) {
    v.push_back("experiment: unknown name '" +
                config_json.at("experiment").get<std::string>() + "'");
    return v;
  }
  require(v,
          config_json.contains("output_dir") &&
              config_json.at("output_dir").is_string(),
          "output_dir: required string field");
  if (!config_json.contains("params") || !config_json.at("params").is_object()) {
    v.push_back("params: required object field");
    return v;
  }
  const json& p = config_json.at("params");

  const auto need_seeds = [&] {
    require(v, p.contains("seeds") && is_pos_number_array(p.at("seeds")),
            "seeds required (nonempty array of unsigned integers)");
  };

  switch (*kind) {
    case ExperimentKind::SparseRegressionSweep: {
      need_seeds();
      require(v, p.contains("alpha_grid") &&
                     is_pos_number_array(p.at("alpha_grid"), true),
              "alpha_grid: nonempty array of positive scales required");
      require(v, pint(p, "d", 1000) > 0, "d must be positive");
      require(v, pint(p, "n", 100) > 0, "n must be positive");
      require(v, pint(p, "k_true", 5) >= 0, "k_true must be >= 0");
      require(v, pnum(p, "noise_std", 0.1) >= 0.0, "noise_std must be >= 0");
      require(v, pint(p, "holdout", 100000) > 0, "holdout must be positive");
      break;
    }
    case ExperimentKind::AlphaThresholdVsN: {
      need_seeds();
      require(v, p.contains("n_grid") && is_pos_number_array(p.at("n_grid"), true),
              "n_grid: nonempty array of positive sample counts required");
      require(v, pnum(p, "target_loss", 0.025) > 0, "target_loss must be > 0");
      require(v, pnum(p, "alpha_min", 1e-4) > 0, "alpha_min must be > 0");
      require(v, pnum(p, "alpha_max", 100.0) > pnum(p, "alpha_min", 1e-4),
              "alpha_max must exceed alpha_min");
      break;
    }
    case ExperimentKind::DepthPotentials: {
      if (!p.contains("D_list") || !is_pos_number_array(p.at("D_list"))) {
        v.push_back("D_list: nonempty array of depths required");
      } else {
        for (const auto& D : p.at("D_list")) {
          require(v, D.get<long>() >= 2, "depth >= 2 required in D_list");
        }
      }
      require(v, pint(p, "z_count", 161) >= 2, "z_count must be >= 2");
      break;
    }
    case ExperimentKind::ExplicitVsImplicit:
      require(v, pint(p, "z_count", 161) >= 2, "z_count must be >= 2");
      require(v, pnum(p, "z_max", 10.0) > 0.0, "z_max must be > 0");
      break;
    case ExperimentKind::WidthPhaseDiagram: {
      need_seeds();
      require(v, p.contains("k_list") && is_pos_number_array(p.at("k_list"), true),
              "k_list: nonempty array of widths required");
      if (!p.contains("sigma_rule") || !p.at("sigma_rule").is_object() ||
          !p.at("sigma_rule").contains("kind") ||
          !p.at("sigma_rule").contains("value")) {
        v.push_back("sigma_rule: object {kind, value} required");
      } else {
        const std::string kindname = p.at("sigma_rule").at("kind");
        require(v,
                kindname == "sigma_const" || kindname == "effective_const" ||
                    kindname == "mu2_const",
                "sigma_rule.kind must be sigma_const|effective_const|mu2_const");
        require(v, p.at("sigma_rule").at("value").get<double>() >= 0.0,
                "sigma_rule.value must be >= 0");
      }
      require(v, pint(p, "d", 6) > 1, "d must be > 1");
      require(v, pint(p, "n", 3) > 0, "n must be positive");
      break;
    }
    case ExperimentKind::LogisticMarginPath: {
      need_seeds();
      if (!p.contains("eps_list") || !is_pos_number_array(p.at("eps_list"), true)) {
        v.push_back("eps_list: nonempty array of positive losses required");
      } else {
        const auto eps = p.at("eps_list").get<std::vector<double>>();
        for (std::size_t i = 1; i < eps.size(); ++i) {
          require(v, eps[i] < eps[i - 1], "eps_list must be strictly decreasing");
        }
      }
      require(v, pnum(p, "alpha", 2.0) > 0, "alpha must be > 0");
      require(v, pint(p, "depth", 2) >= 2, "depth >= 2");
      break;
    }
    case ExperimentKind::OptimizerOracleTable:
      need_seeds();
      require(v, pnum(p, "alpha", 0.5) > 0, "alpha must be > 0");
      require(v, pnum(p, "tol", 1e-6) > 0, "tol must be > 0");
      break;
  }
  return v;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  const auto violations = validate(j);
  if (!violations.empty()) {
    std::string msg = "invalid experiment config:";
    for (const auto& violation : violations) msg += "\n  - " + violation;
    throw ValidationError(msg);
  }
  ExperimentConfig cfg;
  cfg.experiment = *kind_from_string(j.at("experiment"));
  cfg.output_dir = j.at("output_dir").get<std::string>();
  cfg.params = j.at("params");
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const fs::path& path) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open config file: " + path.string());
  json j;
  try {
    file >> j;
  } catch (const json::parse_error& err) {
    throw ValidationError(std::string("config parse error: ") + err.what());
  }
  return from_json(j);
}

namespace {

// ---------------------------------------------------------------------------
// Shared helpers

struct CellResult {
  std::string name;
  std::string status = "ok";
};

struct ExperimentOutput {
  std::vector<std::pair<std::string, CsvTable>> tables;
  std::vector<CellResult> cells;
};

void run_parallel(int workers, std::vector<std::function<void()>>& tasks) {
  if (workers <= 1 || tasks.size() <= 1) {
    for (auto& task : tasks) task();
    return;
  }
  std::atomic<std::size_t> next{0};
  const int count = std::min<int>(workers, static_cast<int>(tasks.size()));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        tasks[i]();
      }
    });
  }
  for (auto& th : pool) th.join();
}

struct SparseInstance {
  Matrix X;
  Vector y;
  Vector beta_star;
};

SparseInstance make_sparse_instance(Eigen::Index d, Eigen::Index n,
                                    Eigen::Index k_true, double noise_std,
                                    RngStream& rng) {
  SparseInstance inst;
  inst.X = gaussian_matrix(n, d, 0.0, 1.0, rng);
  inst.beta_star = Vector::Zero(d);
  Eigen::Index placed = 0;
  while (placed < std::min(k_true, d)) {
    auto idx = static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(d));
    if (idx >= d) idx = d - 1;
    if (inst.beta_star(idx) != 0.0) continue;
    inst.beta_star(idx) = rng.uniform() < 0.5 ? -1.0 : 1.0;
    ++placed;
  }
  inst.y = inst.X * inst.beta_star + gaussian_vector(n, 0.0, noise_std, rng);
  return inst;
}

struct PopulationErrors {
  std::vector<double> errors;  // one per predictor column
  double null_risk = 0.0;
};

// Streamed fresh-holdout estimate of E[(⟨β,x⟩−y)²] for each predictor column
// of `betas`, plus the null predictor's risk. The stream is fully determined
// by `seed`, so repeated calls see the identical holdout.
PopulationErrors population_error(const Matrix& betas, const Vector& beta_star,
                                  double noise_std, long holdout,
                                  std::uint64_t seed) {
  const Eigen::Index d = beta_star.size();
  const Eigen::Index m = betas.cols();
  Matrix deltas = betas;
  deltas.colwise() -= beta_star;
  RngStream rng(seed);
  Vector sse = Vector::Zero(m);
  double sse_null = 0.0;
  const Eigen::Index block = 512;
  long remaining = holdout;
  while (remaining > 0) {
    const Eigen::Index b = static_cast<Eigen::Index>(
        std::min<long>(remaining, static_cast<long>(block)));
    const Matrix Xh = gaussian_matrix(b, d, 0.0, 1.0, rng);
    const Vector noise = gaussian_vector(b, 0.0, noise_std, rng);
    const Matrix pred_delta = Xh * deltas;  // b×m, ⟨β−β*, x⟩
    const Vector truth = Xh * beta_star + noise;
    for (Eigen::Index j = 0; j < m; ++j) {
      sse(j) += (pred_delta.col(j) - noise).squaredNorm();
    }
    sse_null += truth.squaredNorm();
    remaining -= b;
  }
  PopulationErrors out;
  out.errors.resize(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < m; ++j) {
    out.errors[static_cast<std::size_t>(j)] =
        sse(j) / static_cast<double>(holdout);
  }
  out.null_risk = sse_null / static_cast<double>(holdout);
  return out;
}

constexpr std::uint64_t kHoldoutSeedMask = 0x5050;

// ---------------------------------------------------------------------------
// E1: sparse regression sweep (kernel vs rich generalization)

ExperimentOutput run_sparse_regression_sweep(const json& p, int workers) {
  const auto d = static_cast<Eigen::Index>(pint(p, "d", 1000));
  const auto n = static_cast<Eigen::Index>(pint(p, "n", 100));
  const auto k_true = static_cast<Eigen::Index>(pint(p, "k_true", 5));
  const double noise_std = pnum(p, "noise_std", 0.1);
  const long holdout = pint(p, "holdout", 100000);
  const double tol = pnum(p, "tol", 1e-9);
  const auto alphas = pvec(p, "alpha_grid");
  const auto seeds = pseeds(p);

  struct SeedRows {
    std::vector<std::vector<CsvCell>> rows;
    std::string status = "ok";
  };
  std::vector<SeedRows> per_seed(seeds.size());

  std::vector<std::function<void()>> tasks;
  for (std::size_t si = 0; si < seeds.size(); ++si) {
    tasks.push_back([&, si] {
      const std::uint64_t seed = seeds[si];
      SeedRows& out = per_seed[si];
      try {
        RngStream rng(seed);
        const SparseInstance inst =
            make_sparse_instance(d, n, k_true, noise_std, rng);
        const OracleSolution l1 = min_l1_interpolator(inst.X, inst.y, 1e-8);
        const OracleSolution l2 = min_l2_interpolator(inst.X, inst.y);

        Matrix betas(d, static_cast<Eigen::Index>(alphas.size()));
        for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
          betas.col(static_cast<Eigen::Index>(ai)) =
              min_Q_alpha_interpolator(inst.X, inst.y, alphas[ai], tol).point;
        }
        const PopulationErrors pop = population_error(
            betas, inst.beta_star, noise_std, holdout, seed ^ kHoldoutSeedMask);

        for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
          const Vector beta = betas.col(static_cast<Eigen::Index>(ai));
          out.rows.push_back({static_cast<double>(seed), alphas[ai],
                              pop.errors[ai],
                              beta.lpNorm<1>() / l1.point.lpNorm<1>() - 1.0,
                              beta.squaredNorm() / l2.point.squaredNorm() - 1.0,
                              pop.null_risk});
        }
      } catch (const std::exception& err) {
        out.status = err.what();
      }
    });
  }
  run_parallel(workers, tasks);

  ExperimentOutput out;
  CsvTable table;
  table.columns = {"seed",      "alpha",     "population_error",
                   "l1_excess", "l2_excess", "null_risk"};
  for (std::size_t si = 0; si < seeds.size(); ++si) {
    for (auto& row : per_seed[si].rows) table.add_row(std::move(row));
    out.cells.push_back({"seed=" + std::to_string(seeds[si]),
                         per_seed[si].status});
  }
  out.tables.emplace_back("sparse_regression_sweep.csv", std::move(table));
  return out;
}

// ---------------------------------------------------------------------------
// E2: threshold scale vs sample count

ExperimentOutput run_alpha_threshold_vs_n(const json& p, int workers) {
  const auto d = static_cast<Eigen::Index>(pint(p, "d", 200));
  const auto k_true = static_cast<Eigen::Index>(pint(p, "k_true", 5));
  const double noise_std = pnum(p, "noise_std", 0.1);
  const double target = pnum(p, "target_loss", 0.025);
  const double alpha_min = pnum(p, "alpha_min", 1e-4);
  const double alpha_max = pnum(p, "alpha_max", 100.0);
  const long holdout = pint(p, "holdout", 20000);
  const long bisection_steps = pint(p, "bisection_steps", 14);
  const auto n_grid = pvec(p, "n_grid");
  const auto seeds = pseeds(p);

  struct Cell {
    std::vector<CsvCell> row;
    std::string name;
    std::string status = "ok";
  };
  std::vector<Cell> cells(seeds.size() * n_grid.size());

  std::vector<std::function<void()>> tasks;
  for (std::size_t si = 0; si < seeds.size(); ++si) {
    for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
      tasks.push_back([&, si, ni] {
        Cell& cell = cells[si * n_grid.size() + ni];
        const std::uint64_t seed = seeds[si];
        const auto n = static_cast<Eigen::Index>(n_grid[ni]);
        cell.name = "seed=" + std::to_string(seed) + ",n=" + std::to_string(n);
        try {
          RngStream rng = RngStream(seed).derive(static_cast<std::uint64_t>(n));
          const SparseInstance inst =
              make_sparse_instance(d, n, k_true, noise_std, rng);
          const auto pop_loss = [&](double alpha) -> double {
            const Vector beta =
                min_Q_alpha_interpolator(inst.X, inst.y, alpha, 1e-9).point;
            Matrix betas(d, 1);
            betas.col(0) = beta;
            return population_error(betas, inst.beta_star, noise_std, holdout,
                                    seed ^ kHoldoutSeedMask)
                .errors[0];
          };

          std::string status = "ok";
          double threshold = std::numeric_limits<double>::quiet_NaN();
          if (pop_loss(alpha_min) > target) {
            status = "infeasible";
          } else if (pop_loss(alpha_max) <= target) {
            status = "saturated";
            threshold = alpha_max;
          } else {
            // Largest feasible scale by bisection in log alpha.
            double lo = std::log(alpha_min);
            double hi = std::log(alpha_max);
            for (long it = 0; it < bisection_steps; ++it) {
              const double mid = 0.5 * (lo + hi);
              if (pop_loss(std::exp(mid)) <= target) {
                lo = mid;
              } else {
                hi = mid;
              }
            }
            threshold = std::exp(lo);
          }
          cell.row = {static_cast<double>(seed), static_cast<double>(n),
                      threshold, status};
        } catch (const std::exception& err) {
          cell.status = err.what();
          cell.row = {static_cast<double>(seed), n_grid[ni],
                      std::numeric_limits<double>::quiet_NaN(),
                      std::string("error")};
        }
      });
    }
  }
  run_parallel(workers, tasks);

  ExperimentOutput out;
  CsvTable table;
  table.columns = {"seed", "n", "alpha_threshold", "status"};
  for (auto& cell : cells) {
    table.add_row(std::move(cell.row));
    out.cells.push_back({cell.name, cell.status});
  }
  out.tables.emplace_back("alpha_threshold_vs_n.csv", std::move(table));
  return out;
}

// ---------------------------------------------------------------------------
// E3: depth potentials on a z grid

std::vector<double> z_grid_from(const json& p) {
  const double z_min = pnum(p, "z_min", -10.0);
  const double z_max = pnum(p, "z_max", 10.0);
  const long count = pint(p, "z_count", 161);
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    grid.push_back(z_min + (z_max - z_min) * static_cast<double>(i) /
                              static_cast<double>(count - 1));
  }
  return grid;
}

ExperimentOutput run_depth_potentials(const json& p, int /*workers*/) {
  const auto D_list = p.at("D_list").get<std::vector<int>>();
  const auto grid = z_grid_from(p);

  ExperimentOutput out;
  CsvTable combined;
  combined.columns = {"depth", "z", "q_depth"};
  for (const int D : D_list) {
    CsvTable curve;
    curve.columns = {"z", "q_depth"};
    for (const double z : grid) {
      const double value = q_depth(z, D);
      curve.add_row({z, value});
      combined.add_row({static_cast<double>(D), z, value});
    }
    out.tables.emplace_back(
        "depth_potentials_D" + std::to_string(D) + ".csv", std::move(curve));
    out.cells.push_back({"D=" + std::to_string(D), "ok"});
  }
  out.tables.emplace_back("depth_potentials.csv", std::move(combined));
  return out;
}

// ---------------------------------------------------------------------------
// E4: explicit vs implicit regularizer shapes

ExperimentOutput run_explicit_vs_implicit(const json& p, int /*workers*/) {
  const auto grid = z_grid_from(p);
  double q_ref = 0.0, r_ref = 0.0;
  for (const double z : grid) {
    q_ref = std::max(q_ref, std::abs(q(z)));
    r_ref = std::max(r_ref, std::abs(r_explicit(z)));
  }
  if (q_ref == 0.0) q_ref = 1.0;
  if (r_ref == 0.0) r_ref = 1.0;

  ExperimentOutput out;
  CsvTable table;
  table.columns = {"z", "q", "r", "q_normalized", "r_normalized"};
  double max_gap = 0.0;
  for (const double z : grid) {
    const double qv = q(z);
    const double rv = r_explicit(z);
    table.add_row({z, qv, rv, qv / q_ref, rv / r_ref});
    max_gap = std::max(max_gap, std::abs(qv / q_ref - rv / r_ref));
  }
  out.tables.emplace_back("explicit_vs_implicit.csv", std::move(table));
  out.cells.push_back(
      {"max_normalized_gap", std::to_string(max_gap)});
  return out;
}

// ---------------------------------------------------------------------------
// E5: width phase diagram

ExperimentOutput run_width_phase_diagram(const json& p, int /*workers*/) {
  const auto d = static_cast<Eigen::Index>(pint(p, "d", 6));
  const auto n = static_cast<Eigen::Index>(pint(p, "n", 3));
  const auto k_raw = pvec(p, "k_list");
  std::vector<Eigen::Index> k_list;
  for (const double k : k_raw) k_list.push_back(static_cast<Eigen::Index>(k));
  const auto seeds = pseeds(p);
  const auto instance_seed =
      static_cast<std::uint64_t>(pint(p, "instance_seed", 24601));

  SigmaRule rule;
  const std::string kindname = p.at("sigma_rule").at("kind");
  rule.value = p.at("sigma_rule").at("value").get<double>();
  rule.kind = kindname == "sigma_const"      ? SigmaRuleKind::Const
              : kindname == "effective_const" ? SigmaRuleKind::EffectiveConst
                                               : SigmaRuleKind::Mu2Const;

  FlowOptions options;
  options.rel_tol = pnum(p, "rel_tol", 1e-9);
  options.max_time = pnum(p, "max_time", 1e5);
  const WidthSweepResult sweep =
      width_sweep(d, k_list, rule, n, seeds, instance_seed, options);

  ExperimentOutput out;
  CsvTable table;
  table.columns = {"k",      "seed",   "sigma", "effective_scale",
                   "l1_gap", "l2_gap", "status"};
  for (const WidthSweepRow& row : sweep.rows) {
    table.add_row({static_cast<double>(row.k), static_cast<double>(row.seed),
                   row.sigma, row.effective_scale, row.l1_gap, row.l2_gap,
                   row.status});
    out.cells.push_back({"k=" + std::to_string(row.k) +
                             ",seed=" + std::to_string(row.seed),
                         row.status});
  }
  out.tables.emplace_back("width_phase_diagram.csv", std::move(table));
  return out;
}

// ---------------------------------------------------------------------------
// E6: logistic margin path vs the constrained-Q oracle path

ExperimentOutput run_logistic_margin_path(const json& p, int workers) {
  const auto d = static_cast<Eigen::Index>(pint(p, "d", 6));
  const auto n = static_cast<Eigen::Index>(pint(p, "n", 12));
  const double margin = pnum(p, "margin", 0.5);
  const double alpha = pnum(p, "alpha", 2.0);
  const int depth = static_cast<int>(pint(p, "depth", 2));
  const double tol = pnum(p, "tol", 1e-9);
  const auto eps_list = pvec(p, "eps_list");
  const auto seeds = pseeds(p);

  struct SeedRows {
    std::vector<std::vector<CsvCell>> rows;
    std::string status = "ok";
  };
  std::vector<SeedRows> per_seed(seeds.size());

  std::vector<std::function<void()>> tasks;
  for (std::size_t si = 0; si < seeds.size(); ++si) {
    tasks.push_back([&, si] {
      SeedRows& out = per_seed[si];
      try {
        const SeparableDataset data = gen_separable(d, n, margin, seeds[si]);
        FlowOptions options;
        options.max_time = pnum(p, "max_time", 1e8);
        const auto snaps =
            diag_logistic_flow(data, alpha, depth, eps_list, options);
        for (const auto& snap : snaps) {
          const double alpha_eff =
              alpha / std::sqrt(std::log(1.0 / snap.eps));
          const OracleSolution path =
              min_Q_margin(data.X, data.y, alpha_eff, tol);
          const double cosine =
              snap.beta_normalized.normalized().dot(path.point.normalized());
          out.rows.push_back({static_cast<double>(seeds[si]), snap.eps,
                              alpha_eff, cosine, snap.margin, snap.time,
                              path.certificate.comp_slack_resid});
        }
      } catch (const std::exception& err) {
        out.status = err.what();
      }
    });
  }
  run_parallel(workers, tasks);

  ExperimentOutput out;
  CsvTable table;
  table.columns = {"seed",        "eps",       "alpha_eff",
                   "cosine",      "flow_margin", "flow_time",
                   "oracle_comp_slack"};
  for (std::size_t si = 0; si < seeds.size(); ++si) {
    for (auto& row : per_seed[si].rows) table.add_row(std::move(row));
    out.cells.push_back({"seed=" + std::to_string(seeds[si]),
                         per_seed[si].status});
  }
  out.tables.emplace_back("logistic_margin_path.csv", std::move(table));
  return out;
}

// ---------------------------------------------------------------------------
// E7: optimizer endpoints vs oracles, with certificates

struct TableRow {
  std::uint64_t seed;
  std::string name;
  std::string metric;
  double value = std::numeric_limits<double>::quiet_NaN();
  double threshold = 0.0;
  Certificate cert;
  bool pass = false;
};

void push_table_row(CsvTable& table, const TableRow& row, double cert_tol) {
  table.add_row({static_cast<double>(row.seed), row.name, row.metric,
                 row.value, row.threshold, row.cert.stationarity_resid,
                 row.cert.feasibility_resid, row.cert.comp_slack_resid,
                 row.cert.duality_gap, cert_tol,
                 std::string(row.pass ? "pass" : "fail")});
}

bool cert_ok(const Certificate& cert, double tol) {
  return cert.stationarity_resid <= tol && cert.feasibility_resid <= tol &&
         cert.comp_slack_resid <= tol &&
         (std::isnan(cert.duality_gap) || cert.duality_gap <= tol);
}

ExperimentOutput run_optimizer_oracle_table(const json& p, int workers) {
  const auto d = static_cast<Eigen::Index>(pint(p, "d", 10));
  const auto n = static_cast<Eigen::Index>(pint(p, "n", 3));
  const double alpha = pnum(p, "alpha", 0.5);
  const double cert_tol = pnum(p, "tol", 1e-6);
  const auto seeds = pseeds(p);

  struct SeedRows {
    std::vector<TableRow> rows;
    std::string status = "ok";
  };
  std::vector<SeedRows> per_seed(seeds.size());

  std::vector<std::function<void()>> tasks;
  for (std::size_t si = 0; si < seeds.size(); ++si) {
    tasks.push_back([&, si] {
      SeedRows& out = per_seed[si];
      const std::uint64_t seed = seeds[si];
      try {
        RngStream rng(seed);
        const Matrix X = gaussian_matrix(n, d, 0.0, 1.0, rng);
        Vector w_feas(d);
        for (Eigen::Index i = 0; i < d; ++i) {
          w_feas(i) = 0.5 + rng.uniform();
        }
        const Vector y = X * w_feas;
        Dataset data{X, y, std::nullopt, seed};

        const auto objective = [&](const Vector& w) {
          return 0.5 * (X * w - y).squaredNorm();
        };
        const auto gradient = [&](const Vector& w) -> Vector {
          return X.transpose() * (X * w - y);
        };
        const double eta = default_square_loss_step(X);
        StopRule stop;
        stop.max_iters = 400000;
        stop.grad_tol = 1e-11;

        {  // discrete GD from zero against the min-norm oracle
          const OracleSolution oracle = min_l2_interpolator(X, y);
          const Trajectory traj = gd(objective, gradient, Vector::Zero(d),
                                     constant_step(eta), stop);
          TableRow row{seed, "gd_vs_min_l2", "rel_l2_distance"};
          row.value = (traj.endpoint().w - oracle.point).norm() /
                      oracle.point.norm();
          row.threshold = 1e-6;
          row.cert = oracle.certificate;
          row.pass = row.value <= row.threshold && cert_ok(row.cert, cert_tol);
          out.rows.push_back(row);
        }
        {  // entropic mirror descent against the Bregman projection
          const Potential psi = Potential::Entropic(d);
          const Vector w0 = Vector::Ones(d) / static_cast<double>(d);
          const OracleSolution oracle =
              min_bregman_interpolator(psi, w0, X, y, 1e-11);
          StopRule md_stop = stop;
          md_stop.grad_tol = 1e-12;
          const Trajectory traj = mirror_descent(
              psi, objective, gradient, w0, constant_step(0.5 * eta), md_stop);
          TableRow row{seed, "md_entropic_vs_bregman", "rel_l2_distance"};
          row.value = (traj.endpoint().w - oracle.point).norm() /
                      oracle.point.norm();
          row.threshold = 1e-4;
          row.cert = oracle.certificate;
          row.pass = row.value <= row.threshold && cert_ok(row.cert, cert_tol);
          out.rows.push_back(row);
        }
        {  // hypentropy mirror descent against the sinh-manifold oracle
          const Potential psi = Potential::Hypentropy(d, alpha);
          const OracleSolution oracle =
              min_Q_alpha_interpolator(X, y, alpha, 1e-11);
          StopRule md_stop = stop;
          md_stop.grad_tol = 1e-12;
          const Trajectory traj =
              mirror_descent(psi, objective, gradient, Vector::Zero(d),
                             constant_step(0.5 * eta), md_stop);
          TableRow row{seed, "md_hypentropy_vs_min_q_alpha", "rel_l2_distance"};
          row.value = (traj.endpoint().w - oracle.point).norm() /
                      oracle.point.norm();
          row.threshold = 1e-4;
          row.cert = oracle.certificate;
          row.pass = row.value <= row.threshold && cert_ok(row.cert, cert_tol);
          out.rows.push_back(row);
        }
        for (const int depth : {2, 3}) {  // diagonal-net flows vs manifolds
          const Parametrization net = Parametrization::DiagSigned(d, depth);
          StopRule flow_stop;
          flow_stop.residual_inf_tol = 1e-10;
          FlowOptions options;
          options.max_time = 1e6;
          const Trajectory traj =
              param_flow(net, data, LossKind::Square,
                         net.scaled_ones_init(alpha), flow_stop, options);
          const OracleSolution oracle =
              min_Q_depth_interpolator(X, y, alpha, depth, 1e-11);
          TableRow row{seed,
                       "flow_diag" + std::to_string(depth) + "_vs_min_q",
                       "rel_l2_distance"};
          row.value = (traj.endpoint().beta - oracle.point).norm() /
                      oracle.point.norm();
          row.threshold = 1e-5;
          row.cert = oracle.certificate;
          row.pass = row.value <= row.threshold && cert_ok(row.cert, cert_tol);
          out.rows.push_back(row);
        }
        {  // logistic descent direction vs the hard-margin oracle
          const SeparableDataset sep = gen_separable(d, 2 * d, 0.4, seed);
          const auto reports =
              logistic_gd_direction(sep, 0.1, {1e-8}, 400000);
          const OracleSolution oracle = max_margin(sep.X, sep.y, 1e-10);
          TableRow row{seed, "logistic_gd_vs_max_margin", "one_minus_cosine"};
          if (!reports.empty()) {
            row.value = 1.0 - reports.back().cosine_to_oracle;
          }
          row.threshold = 1e-3;
          row.cert = oracle.certificate;
          row.pass = row.value <= row.threshold && cert_ok(row.cert, cert_tol);
          out.rows.push_back(row);
        }
      } catch (const std::exception& err) {
        out.status = err.what();
      }
    });
  }
  run_parallel(workers, tasks);

  ExperimentOutput out;
  CsvTable table;
  table.columns = {"seed",        "row",        "metric",
                   "value",       "threshold",  "stationarity",
                   "feasibility", "comp_slack", "duality_gap",
                   "cert_tol",    "pass"};
  for (std::size_t si = 0; si < seeds.size(); ++si) {
    for (const TableRow& row : per_seed[si].rows) {
      push_table_row(table, row, cert_tol);
    }
    out.cells.push_back({"seed=" + std::to_string(seeds[si]),
                         per_seed[si].status});
  }
  out.tables.emplace_back("optimizer_oracle_table.csv", std::move(table));
  return out;
}

}  // namespace

json RunManifest::to_json() const {
  json j;
  j["config"] = config_echo;
  j["library_version"] = library_version;
  j["wall_time_seconds"] = wall_time_seconds;
  json cells = json::array();
  for (const auto& [name, status] : cell_status) {
    cells.push_back({{"cell", name}, {"status", status}});
  }
  j["cells"] = cells;
  json files = json::object();
  for (const auto& [name, checksum] : file_checksums) files[name] = checksum;
  j["files"] = files;
  return j;
}

RunManifest run(const ExperimentConfig& config, const RunOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();

  ExperimentConfig cfg = config;
  if (options.seed_override) {
    cfg.params["seeds"] = json::array({*options.seed_override});
  }
  if (options.out_override) cfg.output_dir = *options.out_override;
  {
    json echo;
    echo["experiment"] = to_string(cfg.experiment);
    echo["output_dir"] = cfg.output_dir.string();
    echo["params"] = cfg.params;
    const auto violations = validate(echo);
    if (!violations.empty()) {
      std::string msg = "invalid experiment config:";
      for (const auto& violation : violations) msg += "\n  - " + violation;
      throw ValidationError(msg);
    }
  }

  const int workers = std::max(1, options.workers);
  ExperimentOutput result;
  switch (cfg.experiment) {
    case ExperimentKind::SparseRegressionSweep:
      result = run_sparse_regression_sweep(cfg.params, workers);
      break;
    case ExperimentKind::AlphaThresholdVsN:
      result = run_alpha_threshold_vs_n(cfg.params, workers);
      break;
    case ExperimentKind::DepthPotentials:
      result = run_depth_potentials(cfg.params, workers);
      break;
    case ExperimentKind::ExplicitVsImplicit:
      result = run_explicit_vs_implicit(cfg.params, workers);
      break;
    case ExperimentKind::WidthPhaseDiagram:
      result = run_width_phase_diagram(cfg.params, workers);
      break;
    case ExperimentKind::LogisticMarginPath:
      result = run_logistic_margin_path(cfg.params, workers);
      break;
    case ExperimentKind::OptimizerOracleTable:
      result = run_optimizer_oracle_table(cfg.params, workers);
      break;
  }

  RunManifest manifest;
  manifest.config_echo = {{"experiment", to_string(cfg.experiment)},
                          {"output_dir", cfg.output_dir.string()},
                          {"params", cfg.params}};
  manifest.library_version = kLibraryVersion;
  for (const CellResult& cell : result.cells) {
    manifest.cell_status.emplace_back(cell.name, cell.status);
  }

  // Stage everything in a sibling temp dir, then rename into place.
  const fs::path out_dir = cfg.output_dir;
  if (fs::exists(out_dir)) {
    throw IoError("output_dir already exists: " + out_dir.string());
  }
  fs::path tmp_dir = out_dir;
  tmp_dir += ".partial";
  std::error_code ec;
  fs::remove_all(tmp_dir, ec);
  if (!fs::create_directories(tmp_dir)) {
    throw IoError("cannot create staging dir: " + tmp_dir.string());
  }
  try {
    for (const auto& [name, table] : result.tables) {
      const std::string bytes = to_csv_string(table);
      std::ofstream file(tmp_dir / name, std::ios::binary);
      if (!file) throw IoError("cannot write " + (tmp_dir / name).string());
      file << bytes;
      file.close();
      manifest.file_checksums.emplace_back(name, fnv1a_hex(bytes));
    }
    manifest.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      t_start)
            .count();
    std::ofstream mf(tmp_dir / "manifest.json", std::ios::binary);
    if (!mf) throw IoError("cannot write manifest.json");
    mf << manifest.to_json().dump(2) << "\n";
    mf.close();
    fs::rename(tmp_dir, out_dir);
  } catch (...) {
    fs::remove_all(tmp_dir, ec);
    throw;
  }
  manifest.output_dir = out_dir;
  return manifest;
}

}  // namespace biaslab
