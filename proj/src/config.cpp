#include "qkdsim/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <map>
#include <cstdio>
#include <set>
#include <sstream>
#include <vector>

namespace qkdsim {

namespace pt = boost::property_tree;

ConfigError::ConfigError(const std::string& message, std::optional<int> line, std::string key)
    : std::runtime_error(message), line_(line), key_(std::move(key)) {}

namespace {

[[noreturn]] void invalid(const std::string& key, const std::string& what) {
  throw ConfigError(key + ": " + what, std::nullopt, key);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(trim(std::string_view(text).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty()) invalid(key, "expected a number, got '" + text + "'");
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    invalid(key, "expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& values, F&& format) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format(values[i]);
  }
  return out;
}

/// Settings of one section, consumed key by key so leftovers can be reported.
class Section {
 public:
  Section(std::string name, const pt::ptree* tree) : name_(std::move(name)) {
    if (tree == nullptr) return;
    for (const auto& [key, node] : *tree) values_.emplace(key, node.data());
  }

  std::optional<std::string> take(const std::string& key) {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    std::string v = trim(it->second);
    values_.erase(it);
    return v;
  }

  std::string qualified(const std::string& key) const { return name_ + "." + key; }

  void number(const std::string& key, double& target) {
    if (auto v = take(key)) target = to_double(qualified(key), *v);
  }

  void reject_leftovers() const {
    if (!values_.empty()) invalid(qualified(values_.begin()->first), "unknown key");
  }

 private:
  std::string name_;
  std::map<std::string, std::string> values_;
};

void read_experiment(Section& s, ExperimentSpec& e) {
  if (auto v = s.take("kind")) {
    const auto kind = parse_experiment_kind(*v);
    if (!kind) invalid(s.qualified("kind"), "unknown experiment kind '" + *v + "'");
    e.kind = *kind;
  }
  if (auto v = s.take("fiber_length_km")) {
    e.fiber_length_km.clear();
    for (const auto& item : split_list(*v)) e.fiber_length_km.push_back(to_double(s.qualified("fiber_length_km"), item));
  }
  if (auto v = s.take("duration_ticks")) e.duration_ticks = to_uint(s.qualified("duration_ticks"), *v);
  s.number("dt_seconds", e.dt_seconds);
  if (auto v = s.take("disturbance_preset")) e.disturbance_preset = *v;
  if (auto v = s.take("seeds")) {
    e.seeds.clear();
    for (const auto& item : split_list(*v)) e.seeds.push_back(to_uint(s.qualified("seeds"), item));
  }
  if (auto v = s.take("sweep_samples")) {
    const auto n = to_uint(s.qualified("sweep_samples"), *v);
    if (n > 1'000'000) invalid(s.qualified("sweep_samples"), "too large");
    e.sweep_samples = static_cast<int>(n);
  }
  s.reject_leftovers();
}

void read_system(Section& s, SystemSpec& sys) {
  if (auto v = s.take("arms")) {
    const auto preset = arm_preset(*v);
    if (!preset) invalid(s.qualified("arms"), "unknown arm preset '" + *v + "' (expected smf or pm)");
    sys = *preset;
  }
  const std::pair<const char*, ArmSpec*> arms[] = {{"a1", &sys.a1}, {"a2", &sys.a2}, {"b1", &sys.b1}, {"b2", &sys.b2}};
  for (const auto& [name, arm] : arms) {
    const std::string prefix(name);
    s.number(prefix + "_theta", arm->theta);
    s.number(prefix + "_delta", arm->delta);
    s.number(prefix + "_phase", arm->phase);
  }
  s.number("arm_length_km", sys.arm_length_km);
  s.number("channel_phase", sys.channel_phase);
  s.number("segment_length_km", sys.segment_length_km);
  s.number("phi_a", sys.phi_a);
  s.number("phi_b", sys.phi_b);
  if (auto v = s.take("input_state")) {
    const auto items = split_list(*v);
    if (items.size() != 4) invalid(s.qualified("input_state"), "expected four numbers re_a, im_a, re_b, im_b");
    double x[4];
    for (int i = 0; i < 4; ++i) x[i] = to_double(s.qualified("input_state"), items[i]);
    sys.input_state = {complex{x[0], x[1]}, complex{x[2], x[3]}};
  }
  s.number("input_power", sys.input_power);
  s.reject_leftovers();
}

void read_disturbance(Section& s, DisturbanceSet& d) {
  const std::pair<const char*, DisturbanceProcess*> processes[] = {
      {"channel_birefringence", &d.channel_birefringence},
      {"arm_birefringence", &d.arm_birefringence},
      {"channel_phase", &d.channel_phase},
      {"arm_phase", &d.arm_phase}};
  for (const auto& [name, p] : processes) {
    const std::string prefix(name);
    s.number(prefix + "_correlation_s", p->correlation_time_s);
    s.number(prefix + "_rate", p->diffusion_rate);
  }
  s.reject_leftovers();
}

}  // namespace

Scenario parse_config(const std::string& text, ExperimentKind default_kind) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    const int line = static_cast<int>(e.line());
    throw ConfigError("line " + std::to_string(line) + ": " + e.message(), line, "");
  }

  const std::set<std::string> known{"experiment", "system", "disturbance"};
  for (const auto& [name, node] : tree) {
    if (!known.contains(name)) {
      if (node.empty()) invalid(name, "setting outside of a section");
      invalid(name, "unknown section");
    }
  }
  auto section = [&](const char* name) {
    const auto child = tree.get_child_optional(name);
    return Section(name, child ? &*child : nullptr);
  };

  Scenario scenario;
  scenario.experiment.kind = default_kind;
  Section experiment = section("experiment");
  read_experiment(experiment, scenario.experiment);

  Section system = section("system");
  read_system(system, scenario.system);

  const auto preset = disturbance_preset(scenario.experiment.disturbance_preset, scenario.experiment.dt_seconds);
  if (!preset) {
    invalid("experiment.disturbance_preset",
            "unknown preset '" + scenario.experiment.disturbance_preset + "' (expected paper-like or quiet)");
  }
  scenario.disturbance = *preset;
  Section disturbance = section("disturbance");
  read_disturbance(disturbance, scenario.disturbance);

  try {
    scenario.validate();
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    throw ConfigError(what, std::nullopt, what.substr(0, what.find(':')));
  }
  return scenario;
}

std::string serialize_config(const Scenario& scenario) {
  std::ostringstream os;
  const auto& e = scenario.experiment;
  os << "[experiment]\n"
     << "kind = " << to_string(e.kind) << '\n'
     << "fiber_length_km = " << join(e.fiber_length_km, fmt) << '\n'
     << "duration_ticks = " << e.duration_ticks << '\n'
     << "dt_seconds = " << fmt(e.dt_seconds) << '\n'
     << "disturbance_preset = " << e.disturbance_preset << '\n'
     << "seeds = " << join(e.seeds, [](std::uint64_t s) { return std::to_string(s); }) << '\n'
     << "sweep_samples = " << e.sweep_samples << "\n\n";

  const auto& s = scenario.system;
  os << "[system]\n";
  const std::pair<const char*, const ArmSpec*> arms[] = {{"a1", &s.a1}, {"a2", &s.a2}, {"b1", &s.b1}, {"b2", &s.b2}};
  for (const auto& [name, arm] : arms) {
    os << name << "_theta = " << fmt(arm->theta) << '\n'
       << name << "_delta = " << fmt(arm->delta) << '\n'
       << name << "_phase = " << fmt(arm->phase) << '\n';
  }
  os << "arm_length_km = " << fmt(s.arm_length_km) << '\n'
     << "channel_phase = " << fmt(s.channel_phase) << '\n'
     << "segment_length_km = " << fmt(s.segment_length_km) << '\n'
     << "phi_a = " << fmt(s.phi_a) << '\n'
     << "phi_b = " << fmt(s.phi_b) << '\n'
     << "input_state = " << fmt(s.input_state.a.real()) << ", " << fmt(s.input_state.a.imag()) << ", "
     << fmt(s.input_state.b.real()) << ", " << fmt(s.input_state.b.imag()) << '\n'
     << "input_power = " << fmt(s.input_power) << "\n\n";

  const auto& d = scenario.disturbance;
  os << "[disturbance]\n";
  const std::pair<const char*, const DisturbanceProcess*> processes[] = {
      {"channel_birefringence", &d.channel_birefringence},
      {"arm_birefringence", &d.arm_birefringence},
      {"channel_phase", &d.channel_phase},
      {"arm_phase", &d.arm_phase}};
  for (const auto& [name, p] : processes) {
    os << name << "_correlation_s = " << fmt(p->correlation_time_s) << '\n'
       << name << "_rate = " << fmt(p->diffusion_rate) << '\n';
  }
  return os.str();
}

}  // namespace qkdsim
