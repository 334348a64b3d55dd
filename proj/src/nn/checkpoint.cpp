#include "nlcoh/nn/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "nlcoh/error.hpp"

namespace nlcoh {
namespace {

constexpr char kMagic[8] = {'N', 'L', 'C', 'N', 'E', 'T', '0', '1'};

std::uint64_t little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xFFu) << (8 * (7 - i));
  return r;
}

class Writer {
 public:
  explicit Writer(const std::filesystem::path& p) : out_(p, std::ios::binary | std::ios::trunc) {
    if (!out_) throw DataError("cannot write checkpoint " + p.string());
  }
  void u64(std::uint64_t v) {
    v = little_endian(v);
    out_.write(reinterpret_cast<const char*>(&v), 8);
  }
  void f64(double d) { u64(std::bit_cast<std::uint64_t>(d)); }
  void bytes(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
  void finish(const std::filesystem::path& p) {
    out_.flush();
    if (!out_) throw DataError("write failed for checkpoint " + p.string());
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& p) : in_(p, std::ios::binary), path_(p) {
    if (!in_) throw DataError("cannot open checkpoint " + p.string());
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    in_.read(reinterpret_cast<char*>(&v), 8);
    if (!in_) throw DataError("truncated checkpoint " + path_.string());
    return little_endian(v);
  }
  double f64() { return std::bit_cast<double>(u64()); }
  void bytes(char* p, std::size_t n) {
    in_.read(p, static_cast<std::streamsize>(n));
    if (!in_) throw DataError("truncated checkpoint " + path_.string());
  }

 private:
  std::ifstream in_;
  std::filesystem::path path_;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Conv1dNet& net, const AdamState* opt) {
  Writer w(path);
  w.bytes(kMagic, sizeof kMagic);
  w.u64(net.padding() == Padding::same ? 0 : 1);
  w.u64(net.layers().size());
  for (const LayerSpec& l : net.layers()) {
    w.u64(l.in_features);
    w.u64(l.out_features);
    w.u64(l.kernel_width);
    w.u64(l.dilation);
    w.u64(static_cast<std::uint64_t>(l.activation));
  }
  w.u64(net.parameter_count());
  for (double p : net.parameters()) w.f64(p);
  w.u64(opt ? 1 : 0);
  if (opt) {
    w.f64(opt->config.learning_rate);
    w.f64(opt->config.beta1);
    w.f64(opt->config.beta2);
    w.f64(opt->config.epsilon);
    w.u64(opt->step);
    w.u64(opt->m.size());
    for (double v : opt->m) w.f64(v);
    for (double v : opt->v) w.f64(v);
  }
  w.finish(path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  Reader r(path);
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw DataError(path.string() + " is not a network checkpoint");
  const std::uint64_t pad = r.u64();
  if (pad > 1) throw DataError(path.string() + ": unknown padding code");
  const std::uint64_t n_layers = r.u64();
  if (n_layers == 0 || n_layers > 1024) throw DataError(path.string() + ": bad layer count");
  std::vector<LayerSpec> layers;
  for (std::uint64_t i = 0; i < n_layers; ++i) {
    LayerSpec l;
    l.in_features = r.u64();
    l.out_features = r.u64();
    l.kernel_width = r.u64();
    l.dilation = r.u64();
    const std::uint64_t act = r.u64();
    if (act > 2) throw DataError(path.string() + ": unknown activation code");
    l.activation = static_cast<Activation>(act);
    layers.push_back(l);
  }
  Checkpoint cp{Conv1dNet(std::move(layers), pad == 0 ? Padding::same : Padding::causal), std::nullopt};
  if (r.u64() != cp.net.parameter_count())
    throw DataError(path.string() + ": parameter count does not match the architecture");
  for (double& p : cp.net.parameters()) p = r.f64();
  if (r.u64() == 1) {
    AdamConfig cfg;
    cfg.learning_rate = r.f64();
    cfg.beta1 = r.f64();
    cfg.beta2 = r.f64();
    cfg.epsilon = r.f64();
    const std::uint64_t step = r.u64();
    const std::uint64_t size = r.u64();
    if (size > (1u << 28)) throw DataError(path.string() + ": bad optimizer size");
    AdamState s(size, cfg);
    s.step = step;
    for (double& v : s.m) v = r.f64();
    for (double& v : s.v) v = r.f64();
    cp.optimizer = std::move(s);
  }
  return cp;
}

}  // namespace nlcoh
