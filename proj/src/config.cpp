#include "ehrenfest/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ehrenfest/errors.hpp"
#include "text.hpp"

namespace ehrenfest {

namespace {

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
  bool used = false;
};

struct Section {
  std::string name;
  int line = 0;
  std::vector<Entry> entries;

  Entry* find(std::string_view key) {
    for (auto& e : entries) {
      if (e.key == key) {
        e.used = true;
        return &e;
      }
    }
    return nullptr;
  }

  Entry& require(std::string_view key) {
    Entry* e = find(key);
    if (!e) {
      throw ParseError(line, "missing required key '" + std::string(key) + "' in [" + name + "]");
    }
    return *e;
  }

  void reject_unused() const {
    for (const auto& e : entries) {
      if (!e.used) throw ParseError(e.line, "unknown key '" + e.key + "' in [" + name + "]");
    }
  }
};

double to_double(const Entry& e) {
  double v = 0.0;
  if (!text::parse_double(e.value, v) || !std::isfinite(v)) {
    throw ParseError(e.line, "'" + e.key + "' expects a number, got '" + e.value + "'");
  }
  return v;
}

long long to_integer(const Entry& e) {
  const double v = to_double(e);
  if (v != std::floor(v) || std::abs(v) > 1e15) {
    throw ParseError(e.line, "'" + e.key + "' expects an integer, got '" + e.value + "'");
  }
  return static_cast<long long>(v);
}

bool to_bool(const Entry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  throw ParseError(e.line, "'" + e.key + "' expects true or false, got '" + e.value + "'");
}

std::vector<double> to_list(const Entry& e) {
  std::vector<double> out;
  for (auto tok : text::split(e.value, ',')) {
    double v = 0.0;
    if (!text::parse_double(tok, v) || !std::isfinite(v)) {
      throw ParseError(e.line, "'" + e.key + "' expects a comma-separated list of numbers");
    }
    out.push_back(v);
  }
  return out;
}

void check(bool ok, const Entry& e, const std::string& what) {
  if (!ok) throw ParseError(e.line, "'" + e.key + "' " + what);
}

template <class T, class Fn>
void optional_key(Section& s, std::string_view key, T& target, Fn convert) {
  if (Entry* e = s.find(key)) target = convert(*e);
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += text::format_double(v[i]);
  }
  return out;
}

std::vector<Section> split_sections(std::string_view source) {
  std::vector<Section> sections;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    const auto end = source.find('\n', pos);
    std::string_view raw =
        source.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? source.size() + 1 : end + 1;
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    std::string_view line = text::trim(raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "malformed section header");
      std::string name(text::trim(line.substr(1, line.size() - 2)));
      static const char* known[] = {"sim", "potential", "packet.1", "packet.2", "experiment"};
      bool ok = false;
      for (const char* k : known) ok = ok || name == k;
      if (!ok) throw ParseError(line_no, "unknown section [" + name + "]");
      for (const auto& s : sections) {
        if (s.name == name) throw ParseError(line_no, "duplicate section [" + name + "]");
      }
      sections.push_back(Section{name, line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
    if (sections.empty()) throw ParseError(line_no, "key outside of any section");
    std::string key(text::trim(line.substr(0, eq)));
    std::string value(text::trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError(line_no, "empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    auto& sec = sections.back();
    for (const auto& e : sec.entries) {
      if (e.key == key) throw ParseError(line_no, "duplicate key '" + key + "'");
    }
    sec.entries.push_back(Entry{key, value, line_no, false});
  }
  return sections;
}

void parse_sim(Section& s, LabConfig& cfg) {
  SimConfig& sim = cfg.sim;
  {
    const Entry& e = s.require("epsilon");
    sim.epsilon = to_double(e);
    check(sim.epsilon > 0.0, e, "must be positive");
  }
  if (Entry* e = s.find("dimension")) {
    const auto d = to_integer(*e);
    check(d == 1 || d == 2, *e, "must be 1 or 2");
    sim.dimension = static_cast<int>(d);
  }
  if (Entry* e = s.find("sigma")) {
    const auto v = to_integer(*e);
    check(v >= 1 && v <= 8, *e, "must be an integer in [1, 8]");
    sim.sigma = static_cast<int>(v);
  }
  optional_key(s, "lambda", sim.lambda, to_double);
  sim.alpha_c = critical_alpha(sim.dimension, sim.sigma);
  cfg.alpha_critical = true;
  sim.alpha = sim.alpha_c;
  if (Entry* e = s.find("alpha")) {
    if (e->value != "critical") {
      sim.alpha = to_double(*e);
      cfg.alpha_critical = false;
    }
  }
  if (Entry* e = s.find("T")) {
    sim.horizon = to_double(*e);
    check(sim.horizon > 0.0, *e, "must be positive");
  }
  const auto positive_or_zero = [&](std::string_view key, double& target) {
    if (Entry* e = s.find(key)) {
      target = to_double(*e);
      check(target >= 0.0, *e, "must be nonnegative");
    }
  };
  const auto positive = [&](std::string_view key, double& target) {
    if (Entry* e = s.find(key)) {
      target = to_double(*e);
      check(target > 0.0, *e, "must be positive");
    }
  };
  positive_or_zero("dt", sim.dt);
  positive("dt_per_eps", sim.dt_per_eps);
  positive_or_zero("flow_dt", sim.flow_dt);
  positive("envelope_dt", sim.envelope_dt);
  positive("envelope_extent", sim.envelope_extent);
  if (Entry* e = s.find("envelope_points")) {
    const auto n = to_integer(*e);
    check(n >= 16 && (n & (n - 1)) == 0, *e, "must be a power of two >= 16");
    sim.envelope_points = static_cast<std::size_t>(n);
  }
  if (Entry* e = s.find("grid_points")) {
    const auto n = to_integer(*e);
    check(n == 0 || (n >= 16 && (n & (n - 1)) == 0), *e, "must be 0 or a power of two >= 16");
    sim.grid.points_override = static_cast<std::size_t>(n);
  }
  positive_or_zero("dispersion_allowance", sim.grid.dispersion_allowance);
  positive("margin_radii", sim.grid.margin_radii);
  positive("min_margin", sim.grid.min_margin);
  positive("refine", sim.grid.refine);
  optional_key(s, "dealias", sim.dealias, to_bool);
  s.reject_unused();
  try {
    sim.validate();
  } catch (const ConfigError& err) {
    throw ParseError(s.line, err.what());
  }
}

std::vector<double> vector_key(const Entry& e, int dim) {
  auto v = to_list(e);
  check(static_cast<int>(v.size()) == dim, e, "needs " + std::to_string(dim) + " component(s)");
  return v;
}

PacketEntry parse_packet(Section& s, int dim) {
  PacketEntry p;
  p.x0 = vector_key(s.require("x0"), dim);
  p.xi0.assign(static_cast<std::size_t>(dim), 0.0);
  p.center_offset.assign(static_cast<std::size_t>(dim), 0.0);
  if (Entry* e = s.find("xi0")) p.xi0 = vector_key(*e, dim);
  Entry* width = s.find("width");
  Entry* offset = s.find("center_offset");
  if (width) {
    p.width = to_double(*width);
    check(p.width > 0.0, *width, "must be positive");
  }
  if (offset) p.center_offset = vector_key(*offset, dim);
  optional_key(s, "amplitude", p.amplitude, to_double);
  optional_key(s, "phase", p.phase, to_double);
  if (Entry* e = s.find("profile_file")) {
    check(!e->value.empty(), *e, "must name a file");
    if (width || offset) {
      throw ParseError(e->line, "profile_file excludes width and center_offset");
    }
    p.profile_file = e->value;
  }
  s.reject_unused();
  return p;
}

void parse_experiment(Section& s, ExperimentParams& x) {
  if (Entry* e = s.find("epsilons")) {
    x.epsilons = to_list(*e);
    for (double v : x.epsilons) check(v > 0.0, *e, "values must be positive");
  }
  if (Entry* e = s.find("delta")) {
    x.delta = to_double(*e);
    check(x.delta > 0.0 && x.delta < 1.0, *e, "must lie in (0, 1)");
  }
  if (Entry* e = s.find("T_max")) {
    x.t_max = to_double(*e);
    check(x.t_max > 0.0, *e, "must be positive");
  }
  if (Entry* e = s.find("sample_dt")) {
    x.sample_dt = to_double(*e);
    check(x.sample_dt > 0.0, *e, "must be positive");
  }
  if (Entry* e = s.find("samples")) {
    const auto n = to_integer(*e);
    check(n >= 1, *e, "must be >= 1");
    x.samples = static_cast<std::size_t>(n);
  }
  if (Entry* e = s.find("gamma")) {
    x.gamma = to_double(*e);
    check(x.gamma > 0.0 && x.gamma < 0.5, *e, "must lie in (0, 1/2)");
  }
  if (Entry* e = s.find("tolerance")) {
    x.tolerance = to_double(*e);
    check(x.tolerance >= 0.0, *e, "must be nonnegative");
  }
  if (Entry* e = s.find("slope_tolerance")) {
    x.slope_tolerance = to_double(*e);
    check(x.slope_tolerance > 0.0, *e, "must be positive");
  }
  if (Entry* e = s.find("max_fit_residual")) {
    x.max_fit_residual = to_double(*e);
    check(x.max_fit_residual > 0.0, *e, "must be positive");
  }
  optional_key(s, "min_slope", x.min_slope, to_double);
  if (Entry* e = s.find("max_relative_residual")) {
    x.max_relative_residual = to_double(*e);
    check(x.max_relative_residual > 0.0, *e, "must be positive");
  }
  if (Entry* e = s.find("k_max")) {
    const auto k = to_integer(*e);
    check(k >= 0 && k <= 8, *e, "must lie in [0, 8]");
    x.k_max = static_cast<int>(k);
  }
  optional_key(s, "self_check", x.self_check, to_bool);
  if (Entry* e = s.find("norm")) {
    if (e->value == "l2") {
      x.norm = ErrorNorm::l2;
    } else if (e->value == "sigma_eps") {
      x.norm = ErrorNorm::sigma_eps;
    } else {
      throw ParseError(e->line, "'norm' must be l2 or sigma_eps");
    }
  }
  s.reject_unused();
}

}  // namespace

LabConfig parse_config(std::string_view source, const std::filesystem::path& base_dir) {
  auto sections = split_sections(source);
  const auto get = [&](std::string_view name) -> Section* {
    for (auto& s : sections) {
      if (s.name == name) return &s;
    }
    return nullptr;
  };
  LabConfig cfg;
  cfg.base_dir = base_dir;

  Section* sim = get("sim");
  if (!sim) throw ParseError(0, "missing section [sim] (required key 'epsilon')");
  parse_sim(*sim, cfg);

  Section* pot = get("potential");
  if (!pot) throw ParseError(0, "missing section [potential]");
  {
    Entry& e = pot->require("expr");
    try {
      cfg.potential = Potential::parse(e.value, cfg.sim.dimension);
    } catch (const ConfigError& err) {
      throw ParseError(e.line, err.what());
    }
    cfg.potential_expr = cfg.potential.to_string();
    pot->reject_unused();
  }

  Section* p1 = get("packet.1");
  Section* p2 = get("packet.2");
  if (!p1) throw ParseError(p2 ? p2->line : 0, "missing section [packet.1]");
  cfg.packets.push_back(parse_packet(*p1, cfg.sim.dimension));
  if (p2) cfg.packets.push_back(parse_packet(*p2, cfg.sim.dimension));

  if (Section* x = get("experiment")) parse_experiment(*x, cfg.experiment);
  return cfg;
}

LabConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

std::string serialize_config(const LabConfig& cfg) {
  const SimConfig& s = cfg.sim;
  std::ostringstream out;
  const auto num = [](double v) { return text::format_double(v); };
  out << "[sim]\n";
  out << "epsilon = " << num(s.epsilon) << '\n';
  out << "dimension = " << s.dimension << '\n';
  out << "sigma = " << s.sigma << '\n';
  out << "lambda = " << num(s.lambda) << '\n';
  out << "alpha = " << (cfg.alpha_critical ? std::string("critical") : num(s.alpha)) << '\n';
  out << "T = " << num(s.horizon) << '\n';
  out << "dt = " << num(s.dt) << '\n';
  out << "dt_per_eps = " << num(s.dt_per_eps) << '\n';
  out << "flow_dt = " << num(s.flow_dt) << '\n';
  out << "envelope_dt = " << num(s.envelope_dt) << '\n';
  out << "envelope_points = " << s.envelope_points << '\n';
  out << "envelope_extent = " << num(s.envelope_extent) << '\n';
  out << "grid_points = " << s.grid.points_override << '\n';
  out << "dispersion_allowance = " << num(s.grid.dispersion_allowance) << '\n';
  out << "margin_radii = " << num(s.grid.margin_radii) << '\n';
  out << "min_margin = " << num(s.grid.min_margin) << '\n';
  out << "refine = " << num(s.grid.refine) << '\n';
  out << "dealias = " << (s.dealias ? "true" : "false") << '\n';

  out << "\n[potential]\nexpr = " << cfg.potential_expr << '\n';

  for (std::size_t i = 0; i < cfg.packets.size(); ++i) {
    const PacketEntry& p = cfg.packets[i];
    out << "\n[packet." << i + 1 << "]\n";
    out << "x0 = " << join(p.x0) << '\n';
    out << "xi0 = " << join(p.xi0) << '\n';
    if (p.profile_file.empty()) {
      out << "width = " << num(p.width) << '\n';
      out << "center_offset = " << join(p.center_offset) << '\n';
    } else {
      out << "profile_file = " << p.profile_file << '\n';
    }
    out << "amplitude = " << num(p.amplitude) << '\n';
    out << "phase = " << num(p.phase) << '\n';
  }

  const ExperimentParams& x = cfg.experiment;
  out << "\n[experiment]\n";
  if (!x.epsilons.empty()) out << "epsilons = " << join(x.epsilons) << '\n';
  out << "delta = " << num(x.delta) << '\n';
  if (x.t_max > 0.0) out << "T_max = " << num(x.t_max) << '\n';
  out << "sample_dt = " << num(x.sample_dt) << '\n';
  out << "samples = " << x.samples << '\n';
  out << "gamma = " << num(x.gamma) << '\n';
  out << "tolerance = " << num(x.tolerance) << '\n';
  out << "slope_tolerance = " << num(x.slope_tolerance) << '\n';
  out << "max_fit_residual = " << num(x.max_fit_residual) << '\n';
  out << "min_slope = " << num(x.min_slope) << '\n';
  out << "max_relative_residual = " << num(x.max_relative_residual) << '\n';
  out << "k_max = " << x.k_max << '\n';
  out << "self_check = " << (x.self_check ? "true" : "false") << '\n';
  out << "norm = " << (x.norm == ErrorNorm::l2 ? "l2" : "sigma_eps") << '\n';
  return out.str();
}

PacketSpec LabConfig::packet(std::size_t index) const {
  if (index >= packets.size()) throw ConfigError("no packet " + std::to_string(index + 1));
  const PacketEntry& p = packets[index];
  PacketSpec spec;
  spec.dimension = sim.dimension;
  for (int i = 0; i < sim.dimension; ++i) {
    spec.x0[i] = p.x0[i];
    spec.xi0[i] = p.xi0[i];
  }
  spec.amplitude = std::polar(p.amplitude, p.phase);
  if (p.profile_file.empty()) {
    GaussianProfile g;
    g.width = p.width;
    for (int i = 0; i < sim.dimension; ++i) g.center_offset[i] = p.center_offset[i];
    spec.envelope = g;
  } else {
    std::filesystem::path path(p.profile_file);
    if (path.is_relative()) path = base_dir / path;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read profile file '" + path.string() + "'");
    WaveField table = read_field_binary(in);
    if (table.grid().dimension() != sim.dimension) {
      throw ConfigError("profile file dimension differs from config");
    }
    spec.envelope = std::move(table);
  }
  return spec;
}

std::vector<PacketSpec> LabConfig::packet_specs() const {
  std::vector<PacketSpec> out;
  for (std::size_t i = 0; i < packets.size(); ++i) out.push_back(packet(i));
  return out;
}

bool LabConfig::operator==(const LabConfig& o) const {
  return sim == o.sim && alpha_critical == o.alpha_critical &&
         potential_expr == o.potential_expr && packets == o.packets && experiment == o.experiment;
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"trajectory", "propagate", "compare",   "sweep",
                                                 "ehrenfest",  "superpose", "interaction"};
  return names;
}

}  // namespace ehrenfest
