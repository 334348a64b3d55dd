#include <charconv>
#include <fstream>
#include <json.hpp>

#include "nlcoh/error.hpp"
#include "nlcoh/simulate/dataset.hpp"

namespace nlcoh {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kManifestVersion = 1;

json band_json(const Band& b) { return json::array({b.lo, b.hi}); }
Band band_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json oscillator_json(const OscillatorSpec& s) {
  return {{"kind", system_kind_name(s.kind)},
          {"zeta", s.zeta},
          {"alpha1", s.alpha1},
          {"alpha2", s.alpha2},
          {"alpha3", s.alpha3},
          {"tau", s.tau},
          {"dt", s.dt},
          {"band", band_json(s.band)},
          {"linear_stiffness", s.linear_stiffness},
          {"linear_damping", s.linear_damping},
          {"nonlinear", s.nonlinear}};
}

OscillatorSpec oscillator_from(const json& j) {
  OscillatorSpec s;
  s.kind = parse_system_kind(j.at("kind").get<std::string>());
  s.zeta = j.at("zeta");
  s.alpha1 = j.at("alpha1");
  s.alpha2 = j.at("alpha2");
  s.alpha3 = j.at("alpha3");
  s.tau = j.at("tau");
  s.dt = j.at("dt");
  s.band = band_from(j.at("band"));
  s.linear_stiffness = j.value("linear_stiffness", 0.0);
  s.linear_damping = j.value("linear_damping", 0.0);
  s.nonlinear = j.value("nonlinear", true);
  return s;
}

json manifest_json(const FramedDataset& ds) {
  const DatasetManifest& m = ds.manifest;
  json j = {{"version", kManifestVersion},
            {"M", m.length},
            {"dt", m.dt},
            {"N", m.frames},
            {"n_train", m.split.n_train},
            {"n_val", m.split.n_val},
            {"seed", m.seed},
            {"lead_in", m.lead_in},
            {"format", frame_format_name(m.format)},
            {"source", m.source},
            {"noise_scale", m.noise_scale}};
  std::vector<std::string> signals = {"x", "y_n"};
  if (ds.has_ground_truth()) {
    signals.push_back("y");
    signals.push_back("noise");
  }
  if (ds.has_forward_prediction()) signals.push_back("y_z");
  j["signals"] = signals;
  if (m.oscillator) j["oscillator"] = oscillator_json(*m.oscillator);
  if (m.noise)
    j["noise"] = {{"level", noise_level_name(m.noise->level)},
                  {"scale", m.noise->scale},
                  {"band", band_json(m.noise->band)},
                  {"seed", m.noise->seed}};
  if (m.forward_capture) j["forward_capture"] = *m.forward_capture;
  return j;
}

fs::path signal_path(const fs::path& dir, std::string_view name, FrameFormat f) {
  return dir / (std::string(name) + std::string(frame_format_extension(f)));
}

void write_true_coherence(const fs::path& path, const RealCurve& c) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << "frequency,gamma2_true\n";
  char a[64], b[64];
  for (std::size_t k = 0; k < c.size(); ++k) {
    auto ra = std::to_chars(a, a + 64, c.frequency(k));
    auto rb = std::to_chars(b, b + 64, c.values[k]);
    out.write(a, ra.ptr - a);
    out.put(',');
    out.write(b, rb.ptr - b);
    out.put('\n');
  }
}

RealCurve read_true_coherence(const fs::path& path, double df) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  RealCurve c{{}, df};
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw DataError(path.string() + ": malformed row");
    double v = 0.0;
    auto res = std::from_chars(line.data() + comma + 1, line.data() + line.size(), v);
    if (res.ec != std::errc()) throw DataError(path.string() + ": bad value");
    c.values.push_back(v);
  }
  return c;
}

json read_manifest(const fs::path& dir) {
  const fs::path path = dir / "manifest.json";
  std::ifstream in(path);
  if (!in) throw DataError("no dataset manifest at " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_manifest(const fs::path& dir, const FramedDataset& ds) {
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw DataError("cannot write manifest in " + dir.string());
  out << manifest_json(ds).dump(2) << '\n';
}

}  // namespace

void save_dataset(const fs::path& dir, const FramedDataset& ds) {
  fs::create_directories(dir);
  const FrameFormat f = ds.manifest.format;
  write_manifest(dir, ds);
  write_frames(signal_path(dir, "x", f), ds.x, f);
  write_frames(signal_path(dir, "y_n", f), ds.y_n, f);
  if (ds.has_ground_truth()) {
    write_frames(signal_path(dir, "y", f), ds.y, f);
    write_frames(signal_path(dir, "noise", f), ds.noise, f);
  }
  if (ds.has_forward_prediction()) write_frames(signal_path(dir, "y_z", f), ds.y_z, f);
  if (ds.true_coherence) write_true_coherence(dir / "true_coherence.csv", *ds.true_coherence);
}

void save_forward_prediction(const fs::path& dir, const FramedDataset& ds) {
  if (!ds.has_forward_prediction()) throw InvalidInput("dataset has no forward prediction to save");
  write_manifest(dir, ds);
  write_frames(signal_path(dir, "y_z", ds.manifest.format), ds.y_z, ds.manifest.format);
}

std::optional<SystemKind> dataset_system(const fs::path& dir) {
  const json j = read_manifest(dir);
  if (!j.contains("oscillator")) return std::nullopt;
  try {
    return oscillator_from(j["oscillator"]).kind;
  } catch (const json::exception& e) {
    throw DataError("malformed manifest in " + dir.string() + ": " + e.what());
  }
}

FramedDataset load_dataset(const fs::path& dir) {
  const json j = read_manifest(dir);
  FramedDataset ds;
  DatasetManifest& m = ds.manifest;
  try {
    m.length = j.at("M");
    m.dt = j.at("dt");
    m.frames = j.at("N");
    m.split.n_train = j.value("n_train", std::size_t{10});
    m.split.n_val = j.value("n_val", std::size_t{10});
    m.seed = j.value("seed", std::uint64_t{0});
    m.lead_in = j.value("lead_in", std::size_t{1000});
    m.format = parse_frame_format(j.value("format", std::string("binary")));
    m.source = j.value("source", std::string("external"));
    m.noise_scale = j.value("noise_scale", 0.0);
    if (j.contains("oscillator")) m.oscillator = oscillator_from(j["oscillator"]);
    if (j.contains("noise")) {
      const json& n = j["noise"];
      m.noise = NoiseSpec{parse_noise_level(n.at("level").get<std::string>()), n.at("scale"),
                          band_from(n.at("band")), n.at("seed")};
    }
    if (j.contains("forward_capture")) m.forward_capture = j["forward_capture"].get<double>();
  } catch (const json::exception& e) {
    throw DataError("malformed manifest in " + dir.string() + ": " + e.what());
  }
  if (m.length < 2 || !(m.dt > 0.0) || m.frames == 0) throw DataError("manifest has invalid M, dt or N");
  if (m.frames < m.split.minimum_frames())
    throw DataError("dataset has " + std::to_string(m.frames) + " frames; its split needs at least " +
                    std::to_string(m.split.minimum_frames()));

  const FrameFormat f = m.format;
  auto load = [&](std::string_view name) {
    return read_frames(signal_path(dir, name, f), m.frames, m.length, m.dt, f);
  };
  ds.x = load("x");
  ds.y_n = load("y_n");
  if (fs::exists(signal_path(dir, "y", f))) {
    ds.y = load("y");
    ds.noise = fs::exists(signal_path(dir, "noise", f)) ? load("noise") : FrameSet();
  }
  if (fs::exists(signal_path(dir, "y_z", f))) ds.y_z = load("y_z");
  if (fs::exists(dir / "true_coherence.csv"))
    ds.true_coherence = read_true_coherence(dir / "true_coherence.csv", ds.df());
  return ds;
}

}  // namespace nlcoh
