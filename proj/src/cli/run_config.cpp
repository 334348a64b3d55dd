#include "nlcoh/cli/run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "nlcoh/error.hpp"

namespace nlcoh {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T v{};
  auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
    throw InvalidInput("config key '" + key + "': bad number '" + value + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw InvalidInput("config key '" + key + "': expected true or false, got '" + value + "'");
}

std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

ForwardModelConfig RunConfig::forward_config() const {
  if (forward) return *forward;
  if (system.empty() || external()) return ForwardModelConfig{};
  return forward_preset(parse_system_kind(system));
}

void infer_system(RunConfig& c) {
  if (!c.system.empty() || c.data.empty() || !std::filesystem::exists(c.data / "manifest.json")) return;
  if (const auto kind = dataset_system(c.data)) c.system = system_kind_name(*kind);
}

SweepConfig RunConfig::sweep_config() const {
  SweepConfig s = sweep;
  s.schedule = schedule == "default" ? default_schedule() : read_schedule(schedule);
  if (sensitivity) s.run_to_end = true;
  return s;
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  auto fwd = [&]() -> ForwardModelConfig& {
    if (!c.forward) c.forward = c.forward_config();
    return *c.forward;
  };
  if (key == "data") c.data = value;
  else if (key == "out") c.out = value;
  else if (key == "system") {
    if (!value.empty() && value != "external") parse_system_kind(value);
    c.system = value;
  } else if (key == "noise") c.noise = parse_noise_level(value);
  else if (key == "noise_scale") c.noise_scale = parse_number<double>(key, value);
  else if (key == "frames") c.frames = parse_number<std::size_t>(key, value);
  else if (key == "length") c.length = parse_number<std::size_t>(key, value);
  else if (key == "lead_in") c.lead_in = parse_number<std::size_t>(key, value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "noise_seed") c.noise_seed = parse_number<std::uint64_t>(key, value);
  else if (key == "format") c.format = parse_frame_format(value);
  else if (key == "forward.kernel_width") fwd().kernel_width = parse_number<std::size_t>(key, value);
  else if (key == "forward.layers") fwd().layers = parse_number<std::size_t>(key, value);
  else if (key == "forward.features") fwd().features = parse_number<std::size_t>(key, value);
  else if (key == "forward.epochs") fwd().epochs = parse_number<std::size_t>(key, value);
  else if (key == "forward.learning_rate") fwd().learning_rate = parse_number<double>(key, value);
  else if (key == "forward.seed") fwd().seed = parse_number<std::uint64_t>(key, value);
  else if (key == "sweep.schedule") c.schedule = value;
  else if (key == "sweep.initial_epochs") c.sweep.initial_epochs = parse_number<std::size_t>(key, value);
  else if (key == "sweep.epochs_per_step") c.sweep.epochs_per_step = parse_number<std::size_t>(key, value);
  else if (key == "sweep.window") c.sweep.window = parse_number<std::size_t>(key, value);
  else if (key == "sweep.threshold") c.sweep.threshold = parse_number<double>(key, value);
  else if (key == "sweep.fallback_lambda") c.sweep.fallback_lambda = parse_number<double>(key, value);
  else if (key == "sweep.control_points") c.sweep.control_points = parse_number<std::size_t>(key, value);
  else if (key == "sweep.learning_rate") c.sweep.learning_rate = parse_number<double>(key, value);
  else if (key == "sweep.seed") c.sweep_seed = parse_number<std::uint64_t>(key, value);
  else if (key == "sweep.run_to_end") c.sweep.run_to_end = parse_bool(key, value);
  else if (key == "sweep.sensitivity") c.sensitivity = parse_bool(key, value);
  else throw InvalidInput("unknown config key '" + key + "'");
}

RunConfig parse_run_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw InvalidInput("config line " + std::to_string(number) + ": expected key = value");
    apply_setting(c, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return c;
}

RunConfig read_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string serialize(const RunConfig& c) {
  std::ostringstream o;
  o << "data = " << c.data.string() << '\n'
    << "out = " << c.out.string() << '\n'
    << "system = " << c.system << '\n'
    << "noise = " << noise_level_name(c.noise) << '\n'
    << "noise_scale = " << fmt(c.noise_scale) << '\n'
    << "frames = " << c.frames << '\n'
    << "length = " << c.length << '\n'
    << "lead_in = " << c.lead_in << '\n'
    << "seed = " << c.seed << '\n'
    << "noise_seed = " << c.noise_seed << '\n'
    << "format = " << frame_format_name(c.format) << '\n';
  const ForwardModelConfig f = c.forward_config();
  o << "forward.kernel_width = " << f.kernel_width << '\n'
    << "forward.layers = " << f.layers << '\n'
    << "forward.features = " << f.features << '\n'
    << "forward.epochs = " << f.epochs << '\n'
    << "forward.learning_rate = " << fmt(f.learning_rate) << '\n'
    << "forward.seed = " << f.seed << '\n';
  const SweepConfig& s = c.sweep;
  o << "sweep.schedule = " << c.schedule << '\n'
    << "sweep.initial_epochs = " << s.initial_epochs << '\n'
    << "sweep.epochs_per_step = " << s.epochs_per_step << '\n'
    << "sweep.window = " << s.window << '\n'
    << "sweep.threshold = " << fmt(s.threshold) << '\n'
    << "sweep.fallback_lambda = " << fmt(s.fallback_lambda) << '\n'
    << "sweep.control_points = " << s.control_points << '\n'
    << "sweep.learning_rate = " << fmt(s.learning_rate) << '\n'
    << "sweep.seed = " << c.sweep_seed << '\n'
    << "sweep.run_to_end = " << (s.run_to_end ? "true" : "false") << '\n'
    << "sweep.sensitivity = " << (c.sensitivity ? "true" : "false") << '\n';
  return o.str();
}

void write_run_config(const std::filesystem::path& path, const RunConfig& c) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << serialize(c);
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace nlcoh
