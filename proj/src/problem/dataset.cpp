#include "problem/dataset.hpp"

#include <charconv>
#include <sstream>

#include <json.hpp>

#include "common/error.hpp"
#include "common/text.hpp"

namespace fairgen {

using nlohmann::json;

std::size_t Dataset::feasible_count() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.feasible ? 1 : 0;
  return n;
}

std::vector<PropertyVector> Dataset::feasible_std_properties() const {
  std::vector<PropertyVector> out;
  out.reserve(records.size());
  for (const auto& r : records)
    if (r.feasible) out.push_back(r.std_properties);
  return out;
}

std::vector<ShapeVector> Dataset::feasible_shapes() const {
  std::vector<ShapeVector> out;
  out.reserve(records.size());
  for (const auto& r : records)
    if (r.feasible) out.push_back(r.shape);
  return out;
}

void Dataset::append(const ProblemSpec& problem, ShapeVector shape, std::string provenance) {
  require(problem.feasible(shape), ErrorCode::Domain, "infeasible shapes cannot enter the dataset");
  DesignRecord rec;
  rec.raw_properties = problem.evaluate(shape);
  rec.std_properties = standardizer.apply(rec.raw_properties);
  rec.shape = std::move(shape);
  rec.provenance = std::move(provenance);
  rec.feasible = true;
  records.push_back(std::move(rec));
}

std::string init_provenance(std::string_view sampler) { return "init-" + std::string(sampler); }

std::string iteration_provenance(std::size_t iteration) { return "fairgen-iter-" + std::to_string(iteration); }

std::optional<std::size_t> provenance_iteration(std::string_view tag) {
  constexpr std::string_view prefix = "fairgen-iter-";
  if (tag.substr(0, prefix.size()) != prefix) return std::nullopt;
  auto digits = tag.substr(prefix.size());
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) return std::nullopt;
  return value;
}

Dataset build_initial_dataset(const ProblemSpec& problem, std::span<const ShapeVector> shapes,
                              const std::string& provenance, std::uint64_t seed) {
  Dataset data;
  data.problem_id = problem.name;
  data.d = problem.d;
  data.p = problem.p;
  data.seed = seed;
  data.records.reserve(shapes.size());
  std::vector<PropertyVector> feasible_raw;
  for (const auto& x : shapes) {
    DesignRecord rec;
    rec.shape = x;
    rec.raw_properties = problem.evaluate(x);
    rec.feasible = problem.feasible(x);
    rec.provenance = provenance;
    if (rec.feasible) feasible_raw.push_back(rec.raw_properties);
    data.records.push_back(std::move(rec));
  }
  data.standardizer = Standardizer::fit(feasible_raw);
  for (auto& rec : data.records) rec.std_properties = data.standardizer.apply(rec.raw_properties);
  return data;
}

Dataset initialize_dataset(const ProblemSpec& problem, std::string_view sampler, std::size_t n, std::uint64_t seed) {
  require(n >= 1, ErrorCode::InvalidArgument, "initial dataset size must be >= 1");
  std::vector<ShapeVector> shapes;
  if (sampler == "grid") {
    shapes = grid_sample(grid_levels_nearest(n, problem.d), problem.d);
  } else if (sampler == "lhs") {
    shapes = lhs_sample(n, seed, problem.d);
  } else {
    fail(ErrorCode::InvalidArgument, "unknown sampler '" + std::string(sampler) + "' (expected grid or lhs)");
  }
  return build_initial_dataset(problem, shapes, init_provenance(sampler), seed);
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  return p;
}

std::string dataset_csv(const Dataset& data) {
  std::ostringstream out;
  for (std::size_t j = 1; j <= data.d; ++j) out << 'x' << j << ',';
  for (std::size_t j = 1; j <= data.p; ++j) out << 'p' << j << "_raw,";
  for (std::size_t j = 1; j <= data.p; ++j) out << 'p' << j << ',';
  out << "provenance,feasible\n";
  for (const auto& r : data.records) {
    for (double v : r.shape) out << format_double(v) << ',';
    for (double v : r.raw_properties) out << format_double(v) << ',';
    for (double v : r.std_properties) out << format_double(v) << ',';
    out << r.provenance << ',' << (r.feasible ? "true" : "false") << '\n';
  }
  return out.str();
}

void save_dataset(const Dataset& data, const std::filesystem::path& csv_path) {
  json meta;
  meta["problem"] = data.problem_id;
  meta["d"] = data.d;
  meta["p"] = data.p;
  meta["seed"] = data.seed;
  meta["standardizer"] = {{"mean", data.standardizer.mean()}, {"std", data.standardizer.stddev()}};
  write_file_atomic(sidecar_path(csv_path), meta.dump(2) + "\n");
  write_file_atomic(csv_path, dataset_csv(data));
}

namespace {

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  fail(ErrorCode::Parse, path.string() + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& csv_path) {
  Dataset data;
  const auto meta_path = sidecar_path(csv_path);
  try {
    json meta = json::parse(read_file(meta_path));
    data.problem_id = meta.at("problem").get<std::string>();
    data.d = meta.at("d").get<std::size_t>();
    data.p = meta.at("p").get<std::size_t>();
    data.seed = meta.value("seed", std::uint64_t{0});
    data.standardizer = Standardizer(meta.at("standardizer").at("mean").get<std::vector<double>>(),
                                     meta.at("standardizer").at("std").get<std::vector<double>>());
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, meta_path.string() + ": " + e.what());
  }
  require(data.standardizer.dim() == data.p, ErrorCode::Parse, meta_path.string() + ": standardizer dimension mismatch");

  std::istringstream in(read_file(csv_path));
  std::string line;
  std::size_t line_no = 0;
  const std::size_t ncols = data.d + 2 * data.p + 2;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cols = split(line, ',');
    if (cols.size() != ncols)
      parse_fail(csv_path, line_no, "expected " + std::to_string(ncols) + " columns, found " + std::to_string(cols.size()));
    if (!header_seen) {
      header_seen = true;
      if (trim(cols[0]) != "x1") parse_fail(csv_path, line_no, "missing header row");
      continue;
    }
    DesignRecord rec;
    auto read_block = [&](std::size_t offset, std::size_t count, std::vector<double>& dst) {
      dst.resize(count);
      for (std::size_t j = 0; j < count; ++j)
        if (!parse_double(cols[offset + j], dst[j]))
          parse_fail(csv_path, line_no, "bad number '" + cols[offset + j] + "' in column " + std::to_string(offset + j + 1));
    };
    read_block(0, data.d, rec.shape);
    read_block(data.d, data.p, rec.raw_properties);
    read_block(data.d + data.p, data.p, rec.std_properties);
    rec.provenance = std::string(trim(cols[ncols - 2]));
    auto feas = trim(cols[ncols - 1]);
    if (feas == "true" || feas == "1") rec.feasible = true;
    else if (feas == "false" || feas == "0") rec.feasible = false;
    else parse_fail(csv_path, line_no, "bad feasible flag '" + std::string(feas) + "'");
    data.records.push_back(std::move(rec));
  }
  if (!header_seen) parse_fail(csv_path, line_no, "empty dataset file");
  return data;
}

}  // namespace fairgen
