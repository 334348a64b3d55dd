#include "nlcoh/signals/frame_io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "nlcoh/error.hpp"

namespace nlcoh {
namespace {

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xFFu) << (8 * (7 - i));
  return r;
}

void write_binary(const std::filesystem::path& path, const FrameSet& set) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  std::vector<std::uint64_t> words(set.data().size());
  for (std::size_t i = 0; i < words.size(); ++i)
    words[i] = to_little_endian(std::bit_cast<std::uint64_t>(set.data()[i]));
  out.write(reinterpret_cast<const char*>(words.data()),
            static_cast<std::streamsize>(words.size() * sizeof(std::uint64_t)));
  if (!out) throw DataError("write failed for " + path.string());
}

FrameSet read_binary(const std::filesystem::path& path, std::size_t frames, std::size_t length,
                     double dt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  const auto bytes = std::filesystem::file_size(path);
  if (bytes != frames * length * sizeof(double))
    throw DataError(path.string() + ": expected " + std::to_string(frames * length * 8) +
                    " bytes for " + std::to_string(frames) + "x" + std::to_string(length) +
                    " frames, found " + std::to_string(bytes));
  FrameSet set(frames, length, dt);
  std::vector<std::uint64_t> words(frames * length);
  in.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(bytes));
  if (!in) throw DataError("read failed for " + path.string());
  for (std::size_t i = 0; i < words.size(); ++i)
    set.data()[i] = std::bit_cast<double>(to_little_endian(words[i]));
  return set;
}

void write_csv(const std::filesystem::path& path, const FrameSet& set) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  char buf[64];
  for (std::size_t i = 0; i < set.frames(); ++i) {
    auto row = set.frame(i);
    for (std::size_t t = 0; t < row.size(); ++t) {
      auto res = std::to_chars(buf, buf + sizeof buf, row[t]);
      if (t) out.put(',');
      out.write(buf, res.ptr - buf);
    }
    out.put('\n');
  }
  if (!out) throw DataError("write failed for " + path.string());
}

FrameSet read_csv(const std::filesystem::path& path, std::size_t frames, std::size_t length,
                  double dt) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  FrameSet set(frames, length, dt);
  std::string line;
  for (std::size_t i = 0; i < frames; ++i) {
    if (!std::getline(in, line))
      throw DataError(path.string() + ": expected " + std::to_string(frames) + " rows, found " +
                      std::to_string(i));
    auto row = set.frame(i);
    const char* p = line.data();
    const char* end = p + line.size();
    for (std::size_t t = 0; t < length; ++t) {
      while (p < end && (*p == ' ' || *p == ',')) ++p;
      auto res = std::from_chars(p, end, row[t]);
      if (res.ec != std::errc())
        throw DataError(path.string() + ": bad number in row " + std::to_string(i) + " column " +
                        std::to_string(t));
      p = res.ptr;
    }
    while (p < end && (*p == ' ' || *p == '\r')) ++p;
    if (p != end)
      throw DataError(path.string() + ": row " + std::to_string(i) + " has more than " +
                      std::to_string(length) + " values");
  }
  return set;
}

}  // namespace

FrameFormat parse_frame_format(std::string_view name) {
  if (name == "binary" || name == "bin") return FrameFormat::binary;
  if (name == "csv") return FrameFormat::csv;
  throw InvalidInput("unknown frame format '" + std::string(name) + "'");
}

std::string_view frame_format_name(FrameFormat format) {
  return format == FrameFormat::binary ? "binary" : "csv";
}

std::string_view frame_format_extension(FrameFormat format) {
  return format == FrameFormat::binary ? ".f64" : ".csv";
}

void write_frames(const std::filesystem::path& path, const FrameSet& set, FrameFormat format) {
  if (format == FrameFormat::binary)
    write_binary(path, set);
  else
    write_csv(path, set);
}

FrameSet read_frames(const std::filesystem::path& path, std::size_t frames, std::size_t length,
                     double dt, FrameFormat format) {
  if (!std::filesystem::exists(path)) throw DataError("missing frame file " + path.string());
  return format == FrameFormat::binary ? read_binary(path, frames, length, dt)
                                       : read_csv(path, frames, length, dt);
}

}  // namespace nlcoh
