#include "pipeline/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>

#include "common/error.hpp"
#include "common/text.hpp"
#include "problem/problem.hpp"

namespace fairgen {

void RunConfig::validate() const {
  problem_by_name(problem);
  require(init_sampler == "grid" || init_sampler == "lhs", ErrorCode::InvalidArgument,
          "init sampler must be grid or lhs, got '" + init_sampler + "'");
  require(init_size >= 1, ErrorCode::InvalidArgument, "init size must be >= 1");
  require(iterations >= 1, ErrorCode::InvalidArgument, "iterations must be >= 1");
  require(ensemble_size >= 1, ErrorCode::InvalidArgument, "ensemble size must be >= 1");
  require(samples_per_target_per_model >= 1, ErrorCode::InvalidArgument, "samples per target per model must be >= 1");
  mdn.validate();
  bo.validate();
  coverage.validate();
}

namespace {

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    fail(ErrorCode::InvalidArgument, std::string(key) + ": expected a non-negative integer, got '" + std::string(text) + "'");
  return v;
}

double parse_real(std::string_view key, std::string_view text) {
  double v = 0.0;
  if (!parse_double(trim(text), v) || !std::isfinite(v))
    fail(ErrorCode::InvalidArgument, std::string(key) + ": expected a number, got '" + std::string(text) + "'");
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  fail(ErrorCode::InvalidArgument, std::string(key) + ": expected true or false, got '" + std::string(text) + "'");
}

std::string unquote(std::string_view text) {
  text = trim(text);
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') text = text.substr(1, text.size() - 2);
  return std::string(text);
}

std::string box_text(const Box& b) {
  return format_double_short(b.xmin) + "," + format_double_short(b.ymin) + "," + format_double_short(b.xmax) + "," +
         format_double_short(b.ymax);
}

Box parse_box(std::string_view key, std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') fail(ErrorCode::InvalidArgument, std::string(key) + ": unterminated array");
    text = text.substr(1, text.size() - 2);
  }
  const auto parts = split(text, ',');
  if (parts.size() != 4) fail(ErrorCode::InvalidArgument, std::string(key) + ": expected xmin,ymin,xmax,ymax");
  return {parse_real(key, parts[0]), parse_real(key, parts[1]), parse_real(key, parts[2]), parse_real(key, parts[3])};
}

struct Field {
  std::function<void(RunConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename Member>
Field count_field(Member member) {
  return {[member](RunConfig& c, std::string_view k, std::string_view v) {
            std::invoke(member, c) = static_cast<std::size_t>(parse_unsigned(k, v));
          },
          [member](const RunConfig& c) { return std::to_string(std::invoke(member, c)); }};
}

template <typename Member>
Field real_field(Member member) {
  return {[member](RunConfig& c, std::string_view k, std::string_view v) { std::invoke(member, c) = parse_real(k, v); },
          [member](const RunConfig& c) { return format_double_short(std::invoke(member, c)); }};
}

const std::map<std::string, Field, std::less<>>& fields() {
  static const std::map<std::string, Field, std::less<>> table = [] {
    std::map<std::string, Field, std::less<>> t;
    t["run.problem"] = {[](RunConfig& c, std::string_view, std::string_view v) { c.problem = unquote(v); },
                        [](const RunConfig& c) { return c.problem; }};
    t["run.init_sampler"] = {[](RunConfig& c, std::string_view, std::string_view v) { c.init_sampler = unquote(v); },
                             [](const RunConfig& c) { return c.init_sampler; }};
    t["run.init_size"] = count_field([](auto& c) -> auto& { return c.init_size; });
    t["run.iterations"] = count_field([](auto& c) -> auto& { return c.iterations; });
    t["run.ensemble_size"] = count_field([](auto& c) -> auto& { return c.ensemble_size; });
    t["run.samples_per_target_per_model"] =
        count_field([](auto& c) -> auto& { return c.samples_per_target_per_model; });
    t["run.seed"] = {[](RunConfig& c, std::string_view k, std::string_view v) { c.seed = parse_unsigned(k, v); },
                     [](const RunConfig& c) { return std::to_string(c.seed); }};
    t["run.emit_plots"] = {[](RunConfig& c, std::string_view k, std::string_view v) { c.emit_plots = parse_bool(k, v); },
                           [](const RunConfig& c) { return std::string(c.emit_plots ? "true" : "false"); }};
    t["run.parallel"] = {[](RunConfig& c, std::string_view k, std::string_view v) { c.parallel = parse_bool(k, v); },
                         [](const RunConfig& c) { return std::string(c.parallel ? "true" : "false"); }};
    t["mdn.hidden_layers"] = count_field([](auto& c) -> auto& { return c.mdn.hidden_layers; });
    t["mdn.hidden_width"] = count_field([](auto& c) -> auto& { return c.mdn.hidden_width; });
    t["mdn.components"] = count_field([](auto& c) -> auto& { return c.mdn.components; });
    t["mdn.epochs"] = count_field([](auto& c) -> auto& { return c.mdn.epochs; });
    t["mdn.learning_rate"] = real_field([](auto& c) -> auto& { return c.mdn.learning_rate; });
    t["mdn.variance_floor"] = real_field([](auto& c) -> auto& { return c.mdn.variance_floor; });
    t["bo.n_targets"] = count_field([](auto& c) -> auto& { return c.bo.n_targets; });
    t["bo.iterations"] = count_field([](auto& c) -> auto& { return c.bo.iterations; });
    t["bo.random_walks"] = count_field([](auto& c) -> auto& { return c.bo.random_walks; });
    t["bo.init_batches"] = count_field([](auto& c) -> auto& { return c.bo.init_batches; });
    t["bo.candidates"] = count_field([](auto& c) -> auto& { return c.bo.candidates; });
    t["bo.psi"] = real_field([](auto& c) -> auto& { return c.bo.psi; });
    t["coverage.rho"] = real_field([](auto& c) -> auto& { return c.coverage.rho; });
    t["coverage.k"] = {[](RunConfig& c, std::string_view k, std::string_view v) {
                         const auto n = parse_unsigned(k, v);
                         require(n <= 1'000'000, ErrorCode::InvalidArgument, "coverage.k is out of range");
                         c.coverage.k = static_cast<unsigned>(n);
                       },
                       [](const RunConfig& c) { return std::to_string(c.coverage.k); }};
    t["coverage.raster_pitch"] = real_field([](auto& c) -> auto& { return c.coverage.raster_pitch; });
    t["coverage.box"] = {[](RunConfig& c, std::string_view k, std::string_view v) { c.coverage.box = parse_box(k, v); },
                         [](const RunConfig& c) { return box_text(c.coverage.box); }};
    return t;
  }();
  return table;
}

const Field& field(std::string_view key) {
  const auto& t = fields();
  const auto it = t.find(key);
  if (it == t.end()) fail(ErrorCode::InvalidArgument, "unknown configuration key '" + std::string(key) + "'");
  return it->second;
}

// Drops a trailing comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

}  // namespace

void set_config_value(RunConfig& config, std::string_view key, std::string_view value) {
  field(key).set(config, key, value);
}

std::string get_config_value(const RunConfig& config, std::string_view key) { return field(key).get(config); }

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, f] : fields()) keys.push_back(k);
  return keys;
}

void apply_toml(RunConfig& config, std::string_view text, std::string_view source) {
  std::string section;
  std::size_t line_no = 0;
  auto where = [&] { return std::string(source) + ":" + std::to_string(line_no) + ": "; };
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    ++line_no;
    const std::string_view line = trim(strip_comment(text.substr(start, end - start)));
    start = end + 1;
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) fail(ErrorCode::Parse, where() + "malformed table header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section != "run" && section != "mdn" && section != "bo" && section != "coverage")
        fail(ErrorCode::Parse, where() + "unknown table [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(ErrorCode::Parse, where() + "expected key = value");
    std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) fail(ErrorCode::Parse, where() + "expected key = value");
    if (key.find('.') == std::string::npos) {
      if (section.empty()) fail(ErrorCode::Parse, where() + "key '" + key + "' outside a table");
      key = section + "." + key;
    }
    try {
      set_config_value(config, key, value);
    } catch (const Error& e) {
      fail(ErrorCode::Parse, where() + e.what());
    }
  }
}

void apply_toml_file(RunConfig& config, const std::filesystem::path& path) {
  apply_toml(config, read_file(path), path.string());
}

std::optional<std::uint64_t> seed_from_environment() {
  const char* env = std::getenv("FAIRGEN_SEED");
  if (env == nullptr || *env == '\0') return std::nullopt;
  return parse_unsigned("FAIRGEN_SEED", env);
}

nlohmann::json config_to_json(const RunConfig& config) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, f] : fields()) j[key] = f.get(config);
  return j;
}

}  // namespace fairgen
