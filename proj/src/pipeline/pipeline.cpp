#include "pipeline/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "common/text.hpp"
#include "ensemble/ensemble.hpp"
#include "mdn/mdn.hpp"

namespace fairgen {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point& mark) {
  const auto now = Clock::now();
  const double s = std::chrono::duration<double>(now - mark).count();
  mark = now;
  return s;
}

json point_list(std::span<const Point2> pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back({p.x, p.y});
  return a;
}

}  // namespace

json IterationRecord::to_json() const {
  return {{"iteration", iteration},   {"seed", seed},
          {"sc_before", sc_before},   {"sc_after", sc_after},
          {"targets", point_list(targets)},
          {"su_targets", su_targets}, {"objective", objective},
          {"generated", generated},   {"infeasible_rejected", infeasible},
          {"outlier_rejected", outliers},
          {"appended", appended},     {"dataset_size", dataset_size}};
}

IterationRecord IterationRecord::from_json(const json& j) {
  IterationRecord r;
  try {
    r.iteration = j.at("iteration").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.sc_before = j.at("sc_before").get<double>();
    r.sc_after = j.at("sc_after").get<double>();
    for (const auto& t : j.at("targets")) r.targets.push_back({t.at(0).get<double>(), t.at(1).get<double>()});
    r.su_targets = j.at("su_targets").get<double>();
    r.objective = j.at("objective").get<double>();
    r.generated = j.at("generated").get<std::size_t>();
    r.infeasible = j.at("infeasible_rejected").get<std::size_t>();
    r.outliers = j.at("outlier_rejected").get<std::size_t>();
    r.appended = j.at("appended").get<std::size_t>();
    r.dataset_size = j.at("dataset_size").get<std::size_t>();
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("malformed iteration record: ") + e.what());
  }
  return r;
}

json IterationRecord::timings_json() const {
  return {{"iteration", iteration},     {"train_s", times.train},       {"match_s", times.match},
          {"optimize_s", times.optimize}, {"generate_s", times.generate}, {"simulate_s", times.simulate}};
}

std::uint64_t iteration_seed(std::uint64_t master_seed, std::size_t iteration) {
  return master_seed ^ static_cast<std::uint64_t>(iteration);
}

IterationRecord run_iteration(Dataset& data, const RunConfig& config, std::size_t iteration,
                              std::uint64_t seed, IterationArtifacts* artifacts) {
  return run_iteration(problem_by_name(data.problem_id), data, config, iteration, seed, artifacts);
}

IterationRecord run_iteration(const ProblemSpec& problem, Dataset& data, const RunConfig& config,
                              std::size_t iteration, std::uint64_t seed, IterationArtifacts* artifacts) {
  config.validate();
  require(data.feasible_count() >= 1, ErrorCode::InvalidArgument, "dataset has no feasible records");
  const CoverageConfig& cov = config.coverage;

  IterationRecord rec;
  rec.iteration = iteration;
  rec.seed = seed;
  const std::vector<Point2> points = property_points(data);
  rec.sc_before = coverage_score(points, cov);

  auto mark = Clock::now();
  const auto X = mdn::to_matrix(data.feasible_std_properties());
  const auto Y = mdn::to_matrix(data.feasible_shapes());
  const auto ens = ensemble::train_ensemble(X, Y, config.mdn, config.ensemble_size, derive_seed(seed, "ensemble"),
                                            config.parallel);
  rec.times.train = seconds_since(mark);
  const auto corr = ensemble::match_components(ens, X);
  rec.times.match = seconds_since(mark);

  bo::BoConfig bo_config = config.bo;
  bo_config.seed = derive_seed(seed, "bo");
  bo::BoResult bo_result = bo::optimize_targets(points, ens, corr, bo_config, cov);
  rec.targets = bo::unflatten(bo_result.best_x);
  rec.su_targets = bo_result.best.uncertainty;
  rec.objective = bo_result.best.f;
  rec.times.optimize = seconds_since(mark);

  std::vector<ShapeVector> candidates;
  for (std::size_t t = 0; t < rec.targets.size(); ++t) {
    const std::vector<double> target{rec.targets[t].x, rec.targets[t].y};
    for (std::size_t m = 0; m < ens.size(); ++m) {
      auto shapes = mdn::sample_shapes(ens.members[m], target, config.samples_per_target_per_model,
                                       derive_seed(seed, "generate", t * ens.size() + m), problem.shape_bounds);
      for (auto& s : shapes) candidates.push_back(std::move(s));
    }
  }
  rec.generated = candidates.size();
  rec.times.generate = seconds_since(mark);

  std::vector<DesignRecord> fresh;
  const std::string tag = iteration_provenance(iteration);
  for (auto& shape : candidates) {
    if (!problem.feasible(shape)) {
      ++rec.infeasible;
      continue;
    }
    PropertyVector raw = problem.evaluate(shape);
    PropertyVector std_props = data.standardizer.apply(raw);
    if (!cov.box.contains({std_props[0], std_props[1]})) {
      ++rec.outliers;
      continue;
    }
    fresh.push_back({std::move(shape), std::move(raw), std::move(std_props), tag, true});
  }
  rec.times.simulate = seconds_since(mark);

  std::vector<Point2> after = points;
  std::vector<Point2> appended;
  for (auto& r : fresh) {
    appended.push_back({r.std_properties[0], r.std_properties[1]});
    data.records.push_back(std::move(r));
  }
  after.insert(after.end(), appended.begin(), appended.end());
  rec.appended = appended.size();
  rec.sc_after = appended.empty() ? rec.sc_before : coverage_score(after, cov);
  rec.dataset_size = data.size();

  if (artifacts != nullptr) {
    artifacts->bo = std::move(bo_result);
    artifacts->previous_points = points;
    artifacts->appended_points = std::move(appended);
  }
  return rec;
}

namespace {

// Configuration fields that must match for a run directory to be resumed.
json resumable_subset(json j) {
  j.erase("run.iterations");
  j.erase("run.emit_plots");
  j.erase("run.parallel");
  return j;
}

std::vector<IterationRecord> read_ledger(const fs::path& path) {
  std::vector<IterationRecord> records;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) break;  // torn final line from an interrupted write
    IterationRecord r = IterationRecord::from_json(j);
    if (r.iteration != records.size() + 1)
      fail(ErrorCode::Parse, path.string() + ": iteration indices are not contiguous");
    records.push_back(std::move(r));
  }
  return records;
}

void rewrite_lines(const fs::path& path, std::span<const json> lines) {
  std::string text;
  for (const auto& j : lines) text += j.dump() + "\n";
  write_file_atomic(path, text);
}

void append_line(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::app);
  out << j.dump() << '\n';
  out.flush();
  if (!out) fail(ErrorCode::Io, "cannot append to " + path.string());
}

}  // namespace

RunLedger run(const RunConfig& config, const fs::path& out_dir, std::optional<Dataset> initial,
              const IterationCallback& on_iteration, std::size_t max_samples) {
  config.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + out_dir.string() + ": " + ec.message());

  const fs::path dataset_path = out_dir / "dataset.csv";
  const fs::path ledger_path = out_dir / "ledger.jsonl";
  const fs::path timings_path = out_dir / "timings.jsonl";
  const fs::path config_path = out_dir / "config.json";

  RunLedger ledger;
  ledger.config = config_to_json(config);
  Dataset data;

  if (fs::exists(ledger_path) && fs::exists(dataset_path) && fs::exists(config_path)) {
    const json previous = json::parse(read_file(config_path), nullptr, false);
    if (previous.is_discarded() || resumable_subset(previous) != resumable_subset(ledger.config))
      fail(ErrorCode::InvalidArgument,
           out_dir.string() + " holds a run with a different configuration; use a fresh output directory");
    ledger.records = read_ledger(ledger_path);
    data = load_dataset(dataset_path);
    // Drop designs persisted by an iteration whose ledger line never landed.
    const std::size_t done = ledger.records.size();
    std::erase_if(data.records, [&](const DesignRecord& r) {
      const auto it = provenance_iteration(r.provenance);
      return it.has_value() && *it > done;
    });
    ledger.resumed_from = done;
    std::vector<json> lines;
    for (const auto& r : ledger.records) lines.push_back(r.to_json());
    rewrite_lines(ledger_path, lines);
  } else {
    data = initial ? std::move(*initial)
                   : initialize_dataset(problem_by_name(config.problem), config.init_sampler, config.init_size,
                                        config.seed);
    write_file_atomic(config_path, ledger.config.dump(2) + "\n");
    save_dataset(data, dataset_path);
    write_file_atomic(ledger_path, "");
    write_file_atomic(timings_path, "");
  }

  for (std::size_t i = ledger.records.size() + 1; i <= config.iterations; ++i) {
    if (max_samples > 0 && data.size() >= max_samples) break;
    IterationArtifacts art;
    IterationRecord rec = run_iteration(data, config, i, iteration_seed(config.seed, i), &art);
    if (config.emit_plots) {
      write_file_atomic(out_dir / ("bo_trace_" + std::to_string(i) + ".csv"), bo::trace_csv(art.bo));
      write_file_atomic(out_dir / ("coverage_" + std::to_string(i) + ".svg"), iteration_svg(art, rec, config.coverage));
    }
    save_dataset(data, dataset_path);
    append_line(ledger_path, rec.to_json());
    append_line(timings_path, rec.timings_json());
    ledger.records.push_back(rec);
    if (on_iteration) on_iteration(rec);
  }
  ledger.dataset = std::move(data);
  return ledger;
}

namespace {

// Standardized property points of the feasible designs among the first
// `count` shapes, under a fixed standardizer.
class PrefixScorer {
 public:
  PrefixScorer(const ProblemSpec& problem, std::span<const ShapeVector> shapes, const Standardizer& standardizer) {
    for (const auto& s : shapes) {
      if (!problem.feasible(s)) {
        points_.push_back(std::nullopt);
        continue;
      }
      const auto z = standardizer.apply(problem.evaluate(s));
      points_.push_back(Point2{z[0], z[1]});
    }
  }

  double score(std::size_t count, const CoverageConfig& cov) const {
    require(count <= points_.size(), ErrorCode::InvalidArgument, "sample count exceeds the baseline design");
    std::vector<Point2> active;
    for (std::size_t i = 0; i < count; ++i)
      if (points_[i]) active.push_back(*points_[i]);
    return active.empty() ? 0.0 : coverage_score(active, cov);
  }

 private:
  std::vector<std::optional<Point2>> points_;
};

}  // namespace

SamplerComparison compare_samplers(const RunConfig& config, std::size_t budget, const fs::path& work_dir,
                                   const IterationCallback& on_iteration) {
  config.validate();
  require(budget >= config.init_size, ErrorCode::InvalidArgument, "budget must be at least the initial size");
  const ProblemSpec& problem = problem_by_name(config.problem);
  // FairGen may overshoot the budget by at most one iteration's candidates.
  const std::size_t capacity = budget + config.candidates_per_iteration();
  const auto grid = shuffled_grid(grid_levels_covering(capacity, problem.d), derive_seed(config.seed, "compare-grid"),
                                  problem.d);
  const auto lhs = lhs_sample(capacity, derive_seed(config.seed, "compare-lhs"), problem.d);

  const std::span<const ShapeVector> init(grid.data(), config.init_size);
  Dataset start = build_initial_dataset(problem, init, init_provenance("grid"), config.seed);
  const Standardizer standardizer = start.standardizer;

  SamplerComparison cmp;
  cmp.fairgen = run(config, work_dir / "fairgen", std::move(start), on_iteration, budget);

  std::vector<std::pair<std::size_t, double>> fairgen_curve;
  if (!cmp.fairgen.records.empty()) {
    fairgen_curve.emplace_back(config.init_size, cmp.fairgen.records.front().sc_before);
    for (const auto& r : cmp.fairgen.records) fairgen_curve.emplace_back(r.dataset_size, r.sc_after);
  } else {
    fairgen_curve.emplace_back(config.init_size, coverage_score(cmp.fairgen.dataset, config.coverage));
  }

  const PrefixScorer grid_scorer(problem, grid, standardizer);
  const PrefixScorer lhs_scorer(problem, lhs, standardizer);
  for (const auto& [count, score] : fairgen_curve) {
    cmp.points.push_back({count, "fairgen", score});
    cmp.points.push_back({count, "grid", grid_scorer.score(count, config.coverage)});
    cmp.points.push_back({count, "lhs", lhs_scorer.score(count, config.coverage)});
  }
  return cmp;
}

std::string curves_csv(std::span<const CurvePoint> points) {
  std::ostringstream out;
  out << "sample_count,method,score\n";
  for (const auto& p : points) out << p.samples << ',' << p.method << ',' << format_double(p.score) << '\n';
  return out.str();
}

GenerativeEvaluation evaluate_generative(const std::vector<std::pair<std::string, Dataset>>& datasets,
                                         const EvaluationOptions& options) {
  require(!datasets.empty(), ErrorCode::InvalidArgument, "evaluation needs at least one dataset");
  require(options.n_test >= 1 && options.shapes_per_test >= 1, ErrorCode::InvalidArgument,
          "test and shape counts must be >= 1");
  options.mdn.validate();
  options.coverage.validate();
  const CoverageConfig& cov = options.coverage;
  const ProblemSpec& problem = problem_by_name(datasets.front().second.problem_id);
  const Standardizer& ref = datasets.front().second.standardizer;

  std::vector<Eigen::MatrixXd> inputs, outputs;
  std::vector<Point2> union_points;
  for (const auto& [label, data] : datasets) {
    require(data.problem_id == problem.name, ErrorCode::InvalidArgument,
            "dataset '" + label + "' belongs to a different problem");
    std::vector<PropertyVector> props;
    std::vector<ShapeVector> shapes;
    for (const auto& r : data.records) {
      if (!r.feasible) continue;
      props.push_back(ref.apply(r.raw_properties));
      shapes.push_back(r.shape);
      union_points.push_back({props.back()[0], props.back()[1]});
    }
    require(!props.empty(), ErrorCode::InvalidArgument, "dataset '" + label + "' has no feasible records");
    inputs.push_back(mdn::to_matrix(props));
    outputs.push_back(mdn::to_matrix(shapes));
  }

  GenerativeEvaluation eval;
  Rng rng(derive_seed(options.seed, "eval-test"));
  const auto max_draws = static_cast<std::size_t>(std::ceil(static_cast<double>(options.n_test) / 0.001));
  std::size_t draws = 0;
  while (eval.test_points.size() < options.n_test) {
    if (draws >= max_draws)
      fail(ErrorCode::DegenerateData, "covered region too small: rejection sampling accepted under 0.1% of draws");
    ++draws;
    const Point2 q{rng.uniform(cov.box.xmin, cov.box.xmax), rng.uniform(cov.box.ymin, cov.box.ymax)};
    if (is_covered(q, union_points, cov.rho, cov.k)) eval.test_points.push_back(q);
  }

  mdn::MdnConfig mcfg = options.mdn;
  mcfg.seed = derive_seed(options.seed, "eval-mdn");
  for (std::size_t di = 0; di < datasets.size(); ++di) {
    const auto model = mdn::train(inputs[di], outputs[di], mcfg).model;
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t t = 0; t < eval.test_points.size(); ++t) {
      const Point2 q = eval.test_points[t];
      const std::vector<double> target{q.x, q.y};
      const auto shapes = mdn::sample_shapes(model, target, options.shapes_per_test,
                                             derive_seed(options.seed, "eval-sample", t), problem.shape_bounds);
      for (const auto& s : shapes) {
        const auto z = ref.apply(problem.evaluate(s));
        PairError e{di, t, q, {z[0], z[1]}, std::abs(z[0] - q.x), std::abs(z[1] - q.y)};
        total += 0.5 * (e.abs_p1 + e.abs_p2);
        ++pairs;
        eval.errors.push_back(e);
      }
    }
    eval.rows.push_back({datasets[di].first, datasets[di].second.size(), total / static_cast<double>(pairs)});
  }
  return eval;
}

std::string mae_csv(const GenerativeEvaluation& eval) {
  std::ostringstream out;
  out << "label,samples,mae\n";
  for (const auto& r : eval.rows) out << r.label << ',' << r.samples << ',' << format_double(r.mae) << '\n';
  return out.str();
}

std::string errors_csv(const GenerativeEvaluation& eval) {
  std::ostringstream out;
  out << "label,test,target_p1,target_p2,achieved_p1,achieved_p2,abs_p1,abs_p2\n";
  for (const auto& e : eval.errors) {
    out << eval.rows[e.dataset].label << ',' << e.test << ',' << format_double(e.target.x) << ','
        << format_double(e.target.y) << ',' << format_double(e.achieved.x) << ',' << format_double(e.achieved.y)
        << ',' << format_double(e.abs_p1) << ',' << format_double(e.abs_p2) << '\n';
  }
  return out.str();
}

}  // namespace fairgen
