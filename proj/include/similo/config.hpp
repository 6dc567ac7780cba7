#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "similo/capture.hpp"
#include "similo/detail/text.hpp"
#include "similo/evaluation.hpp"
#include "similo/multilocator.hpp"

namespace similo {

enum class OutputFormat { Table, Json };

// Everything the command line can set. A config file uses one `key = value`
// per line; '#' starts a comment. Keys:
//
//   weight.<param>          per-parameter weight (param names as in kParamNames)
//   threshold               minimum accepted Similo score
//   neighbor_radius         pixels, neighbor-text gathering
//   location_radius         pixels, location similarity falloff
//   string_normalization    max_length | ned2
//   generator.max_depth | generator.max_attribute_set | generator.search_budget
//   generator.priority      comma-separated attribute names
//   generator.blacklist     comma-separated attribute names
//   voting.variant          worst_order | best_order | weighted | theoretical_limit
//   voting.weight.<kind>    locator kind weight for weighted voting
//   voting.kind_order       tie-break ranking of the five locator kinds
//   repeats | top_k | jobs  positive integers
//   format                  table | json
//   approaches              comma-separated approach names
struct Config {
  EvaluationConfig eval;
  VotingVariant variant = VotingVariant::Weighted;
  OutputFormat format = OutputFormat::Table;
  std::size_t top_k = 10;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline double parse_double(std::string_view key, std::string_view v) {
  std::string s(trim(v));
  std::size_t used = 0;
  double d = 0;
  try {
    d = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(d))
    throw ConfigError(std::string(key) + ": expected a number, got '" + s + "'");
  return d;
}

inline std::size_t parse_count(std::string_view key, std::string_view v) {
  auto s = trim(v);
  std::size_t n = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc{} || p != s.data() + s.size() || n == 0)
    throw ConfigError(std::string(key) + ": expected a positive integer, got '" + std::string(s) + "'");
  return n;
}

inline std::vector<std::string> parse_list(std::string_view v) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    auto end = v.find(',', start);
    if (end == std::string_view::npos) end = v.size();
    auto item = trim(v.substr(start, end - start));
    if (!item.empty()) out.emplace_back(item);
    start = end + 1;
  }
  return out;
}

}  // namespace detail

// Applies one setting; throws ConfigError on unknown keys or bad values.
inline void apply_setting(Config& c, std::string_view key, std::string_view value) {
  using namespace detail;
  auto& e = c.eval;
  value = trim(value);
  if (key.starts_with("weight.")) {
    auto p = param_from_name(key.substr(7));
    if (!p) throw ConfigError("unknown parameter in key '" + std::string(key) + "'");
    double w = parse_double(key, value);
    if (w < 0) throw ConfigError(std::string(key) + ": weights must be non-negative");
    e.scoring.weights[*p] = w;
  } else if (key == "threshold") {
    e.threshold = parse_double(key, value);
  } else if (key == "neighbor_radius") {
    e.extraction.neighbor_radius = parse_double(key, value);
  } else if (key == "location_radius") {
    double r = parse_double(key, value);
    if (r <= 0) throw ConfigError("location_radius must be positive");
    e.scoring.location_radius = r;
  } else if (key == "string_normalization") {
    if (value == "max_length")
      e.scoring.normalization = StringNormalization::MaxLength;
    else if (value == "ned2")
      e.scoring.normalization = StringNormalization::Ned2;
    else
      throw ConfigError("string_normalization: expected max_length or ned2");
  } else if (key == "generator.max_depth") {
    e.generator.max_depth = parse_count(key, value);
  } else if (key == "generator.max_attribute_set") {
    e.generator.max_attribute_set = parse_count(key, value);
  } else if (key == "generator.search_budget") {
    e.generator.search_budget = parse_count(key, value);
  } else if (key == "generator.priority") {
    e.generator.priority = parse_list(value);
  } else if (key == "generator.blacklist") {
    e.generator.blacklist = parse_list(value);
  } else if (key == "voting.variant") {
    auto v = voting_variant_from_name(value);
    if (!v) throw ConfigError("voting.variant: unknown variant '" + std::string(value) + "'");
    c.variant = *v;
  } else if (key.starts_with("voting.weight.")) {
    auto k = locator_kind_from_name(key.substr(14));
    if (!k) throw ConfigError("unknown locator kind in key '" + std::string(key) + "'");
    double w = parse_double(key, value);
    if (w <= 0) throw ConfigError(std::string(key) + ": must be positive");
    e.voting.weights[*k] = w;
  } else if (key == "voting.kind_order") {
    auto list = parse_list(value);
    std::array<LocatorKind, 5> order{};
    if (list.size() != order.size()) throw ConfigError("voting.kind_order: expected all five locator kinds");
    for (std::size_t i = 0; i < list.size(); ++i) {
      auto k = locator_kind_from_name(list[i]);
      if (!k) throw ConfigError("voting.kind_order: unknown locator kind '" + list[i] + "'");
      if (std::find(order.begin(), order.begin() + i, *k) != order.begin() + i)
        throw ConfigError("voting.kind_order: duplicate kind '" + list[i] + "'");
      order[i] = *k;
    }
    e.voting.kind_order = order;
  } else if (key == "repeats") {
    e.repeats = parse_count(key, value);
  } else if (key == "jobs") {
    e.jobs = parse_count(key, value);
  } else if (key == "top_k") {
    c.top_k = parse_count(key, value);
  } else if (key == "format") {
    if (value == "table")
      c.format = OutputFormat::Table;
    else if (value == "json")
      c.format = OutputFormat::Json;
    else
      throw ConfigError("format: expected table or json");
  } else if (key == "approaches") {
    auto list = parse_list(value);
    for (const auto& a : list)
      if (!is_approach(a)) throw ConfigError("approaches: unknown approach '" + a + "'");
    e.approaches = std::move(list);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

inline void apply_config_text(Config& c, std::string_view text, std::string_view origin = "config") {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    auto where = std::string(origin) + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    try {
      apply_setting(c, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& err) {
      throw ConfigError(where + err.what());
    }
    if (end == text.size()) break;
  }
}

inline Config load_config(const std::filesystem::path& path) {
  Config c;
  apply_config_text(c, detail::read_file(path), path.string());
  return c;
}

// `--weights` value: an optional preset (default, unit, zero) followed by
// comma-separated name=value overrides, e.g. "unit,id=0,visible_text=2".
inline WeightVector parse_weights(std::string_view spec, WeightVector base = WeightVector::defaults()) {
  auto items = detail::parse_list(spec);
  std::size_t i = 0;
  if (!items.empty() && items[0].find('=') == std::string::npos) {
    if (items[0] == "default")
      base = WeightVector::defaults();
    else if (items[0] == "unit")
      base = WeightVector::uniform(1.0);
    else if (items[0] == "zero")
      base = WeightVector::uniform(0.0);
    else
      throw ConfigError("--weights: unknown preset '" + items[0] + "'");
    i = 1;
  }
  for (; i < items.size(); ++i) {
    auto eq = items[i].find('=');
    if (eq == std::string::npos) throw ConfigError("--weights: expected name=value, got '" + items[i] + "'");
    auto name = detail::trim(std::string_view(items[i]).substr(0, eq));
    auto p = param_from_name(name);
    if (!p) throw ConfigError("--weights: unknown parameter '" + std::string(name) + "'");
    double w = detail::parse_double(name, std::string_view(items[i]).substr(eq + 1));
    if (w < 0) throw ConfigError("--weights: weights must be non-negative");
    base[*p] = w;
  }
  return base;
}

}  // namespace similo
