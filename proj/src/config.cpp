#include "bodyfit/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>

#include "bodyfit/error.hpp"
#include "text_util.hpp"

namespace bodyfit {

namespace {

struct Value {
  std::string text;
  int line = 0;
};

[[noreturn]] void fail(const std::string& what, int line) {
  throw ConfigError(what + " (line " + std::to_string(line) + ")");
}

double as_double(const Value& v) {
  const auto d = detail::parse_double(v.text);
  if (!d) fail("expected a number, got '" + v.text + "'", v.line);
  return *d;
}

long long as_int(const Value& v, long long lo, long long hi) {
  const double d = as_double(v);
  if (d != std::floor(d) || d < static_cast<double>(lo) || d > static_cast<double>(hi)) {
    fail("expected an integer in [" + std::to_string(lo) + ", " +
             std::to_string(hi) + "], got '" + v.text + "'",
         v.line);
  }
  return static_cast<long long>(d);
}

bool as_bool(const Value& v) {
  if (v.text == "true") return true;
  if (v.text == "false") return false;
  fail("expected true or false, got '" + v.text + "'", v.line);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

}  // namespace

void parse_config(std::istream& in, CliConfig& cfg) {
  std::map<std::string, Value> entries;
  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line{detail::trim(strip_comment(raw))};
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header", line_no);
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      if (section.empty()) fail("empty section name", line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value", line_no);
    const std::string key{detail::trim(line.substr(0, eq))};
    std::string value{detail::trim(line.substr(eq + 1))};
    if (key.empty() || value.empty()) fail("expected key = value", line_no);
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (section.empty()) fail("key '" + key + "' outside a section", line_no);
    const std::string full = section + "." + key;
    if (!entries.emplace(full, Value{value, line_no}).second) {
      fail("duplicate key '" + full + "'", line_no);
    }
  }

  using Setter = std::function<void(const Value&)>;
  auto weight = [](double& slot) {
    return [&slot](const Value& v) {
      const double w = as_double(v);
      if (!(w >= 0.0) || !std::isfinite(w)) fail("weights must be non-negative", v.line);
      slot = w;
    };
  };
  WeightConfig& w = cfg.eval.weights;
  std::map<std::string, Setter> setters;
  for (BodyPart p : kAllBodyParts) {
    setters["weights." + std::string(to_string(p))] = weight(w.part[index_of(p)]);
  }
  setters["weights.highest_point"] = weight(w.top);
  setters["weights.lowest_point"] = weight(w.bottom);
  setters["weights.front"] = weight(w.front);
  setters["weights.side"] = weight(w.side);
  setters["weights.height"] = [&](const Value& v) {
    double h = 0.0;
    weight(h)(v);
    if (!entries.count("weights.highest_point")) w.top = h;
    if (!entries.count("weights.lowest_point")) w.bottom = h;
  };

  GAConfig& ga = cfg.ga;
  auto size_setter = [](std::size_t& slot, long long lo, long long hi) {
    return [&slot, lo, hi](const Value& v) { slot = static_cast<std::size_t>(as_int(v, lo, hi)); };
  };
  setters["ga.population"] = size_setter(ga.population_size, 2, 100000);
  setters["ga.cull"] = size_setter(ga.cull_count, 0, 100000);
  setters["ga.mutants"] = size_setter(ga.mutant_count, 0, 100000);
  setters["ga.genes_per_mutant"] = size_setter(ga.genes_per_mutant, 0, kGeneCount);
  setters["ga.iterations"] = [&](const Value& v) {
    ga.max_iterations = static_cast<int>(as_int(v, 0, 1000000));
  };
  setters["ga.elitism"] = [&](const Value& v) { ga.elitism = as_bool(v); };
  setters["ga.mutation"] = [&](const Value& v) { ga.mutation = as_bool(v); };
  setters["ga.early_stop"] = [&](const Value& v) { ga.early_stop = as_bool(v); };
  setters["ga.seed"] = [&](const Value& v) {
    ga.seed = static_cast<std::uint64_t>(as_int(v, 0, (1LL << 53)));
  };
  setters["ga.threads"] = [&](const Value& v) {
    ga.threads = static_cast<unsigned>(as_int(v, 0, 1024));
  };

  setters["render.width"] = [&](const Value& v) {
    cfg.eval.render.width = static_cast<int>(as_int(v, 64, 16384));
  };
  setters["render.height"] = [&](const Value& v) {
    cfg.eval.render.height = static_cast<int>(as_int(v, 64, 16384));
  };

  RegistrationOptions& reg = cfg.eval.registration;
  setters["registration.max_iters"] = [&](const Value& v) {
    reg.max_iters = static_cast<int>(as_int(v, 0, 100000));
  };
  setters["registration.tol"] = [&](const Value& v) {
    reg.tol = as_double(v);
    if (!(reg.tol >= 0.0)) fail("tolerance must be non-negative", v.line);
  };
  setters["registration.rotation_search_deg"] = [&](const Value& v) {
    reg.rotation_search_deg = as_double(v);
    if (!(reg.rotation_search_deg >= 0.0 && reg.rotation_search_deg <= 180.0)) {
      fail("rotation search must lie in [0, 180]", v.line);
    }
  };
  setters["registration.rotation_step_deg"] = [&](const Value& v) {
    reg.rotation_step_deg = as_double(v);
    if (!(reg.rotation_step_deg > 0.0)) fail("rotation step must be positive", v.line);
  };
  setters["registration.rotation_refine_deg"] = [&](const Value& v) {
    reg.rotation_refine_deg = as_double(v);
    if (!(reg.rotation_refine_deg > 0.0)) fail("rotation refinement must be positive", v.line);
  };

  setters["eval.subjects"] = size_setter(cfg.subjects, 1, 100000);
  setters["eval.reference_height"] = [&](const Value& v) {
    cfg.reference_height = as_double(v);
    if (!(cfg.reference_height > 0.0)) fail("reference height must be positive", v.line);
  };

  for (const auto& [key, value] : entries) {
    const auto it = setters.find(key);
    if (it == setters.end()) fail("unknown key '" + key + "'", value.line);
    it->second(value);
  }
  try {
    cfg.ga.validate();
  } catch (const InvalidArgument& ex) {
    throw ConfigError(ex.what());
  }
}

void load_config(const std::filesystem::path& path, CliConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  parse_config(in, cfg);
}

void write_config(const CliConfig& cfg, std::ostream& out) {
  using detail::format_double;
  const WeightConfig& w = cfg.eval.weights;
  out << "[weights]\n";
  for (BodyPart p : kAllBodyParts) {
    out << to_string(p) << " = " << format_double(w.part[index_of(p)]) << '\n';
  }
  out << "highest_point = " << format_double(w.top) << '\n'
      << "lowest_point = " << format_double(w.bottom) << '\n'
      << "front = " << format_double(w.front) << '\n'
      << "side = " << format_double(w.side) << "\n\n";
  const GAConfig& ga = cfg.ga;
  auto b = [](bool v) { return v ? "true" : "false"; };
  out << "[ga]\n"
      << "population = " << ga.population_size << '\n'
      << "cull = " << ga.cull_count << '\n'
      << "mutants = " << ga.mutant_count << '\n'
      << "genes_per_mutant = " << ga.genes_per_mutant << '\n'
      << "iterations = " << ga.max_iterations << '\n'
      << "elitism = " << b(ga.elitism) << '\n'
      << "mutation = " << b(ga.mutation) << '\n'
      << "early_stop = " << b(ga.early_stop) << '\n'
      << "seed = " << ga.seed << '\n'
      << "threads = " << ga.threads << "\n\n";
  out << "[render]\nwidth = " << cfg.eval.render.width
      << "\nheight = " << cfg.eval.render.height << "\n\n";
  const RegistrationOptions& r = cfg.eval.registration;
  out << "[registration]\nmax_iters = " << r.max_iters
      << "\ntol = " << format_double(r.tol)
      << "\nrotation_search_deg = " << format_double(r.rotation_search_deg)
      << "\nrotation_step_deg = " << format_double(r.rotation_step_deg)
      << "\nrotation_refine_deg = " << format_double(r.rotation_refine_deg) << "\n\n";
  out << "[eval]\nsubjects = " << cfg.subjects
      << "\nreference_height = " << format_double(cfg.reference_height) << '\n';
}

}  // namespace bodyfit
