#pragma once

#include <filesystem>

#include "nlcoh/signals/types.hpp"

// On-disk frame storage: either flat little-endian float64, frame-major with
// no header (shape comes from the dataset manifest), or CSV with one frame per
// row written at round-trip precision.
namespace nlcoh {

enum class FrameFormat { binary, csv };

FrameFormat parse_frame_format(std::string_view name);
std::string_view frame_format_name(FrameFormat format);
std::string_view frame_format_extension(FrameFormat format);

void write_frames(const std::filesystem::path& path, const FrameSet& set, FrameFormat format);
FrameSet read_frames(const std::filesystem::path& path, std::size_t frames, std::size_t length,
                     double dt, FrameFormat format);

}  // namespace nlcoh
