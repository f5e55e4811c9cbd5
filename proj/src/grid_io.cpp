// Copyright 2026 The roivos Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "roivos/grid_io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace roivos {

namespace {

constexpr std::size_t kHeaderBytes = 12;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(std::string_view in, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  }
  return v;
}

std::string header(const char* magic, int height, int width) {
  std::string out(magic, 4);
  put_u32(out, static_cast<std::uint32_t>(height));
  put_u32(out, static_cast<std::uint32_t>(width));
  return out;
}

struct Header {
  int height;
  int width;
};

Header check_header(std::string_view bytes, const char* magic, std::size_t cell_bytes) {
  if (bytes.size() < kHeaderBytes) throw FormatError("truncated header");
  if (bytes.substr(0, 4) != std::string_view(magic, 4)) {
    throw FormatError(std::string("bad magic, expected ") + magic);
  }
  const std::uint32_t h = get_u32(bytes, 4);
  const std::uint32_t w = get_u32(bytes, 8);
  if (h == 0 || w == 0 || h > (1u << 15) || w > (1u << 15)) {
    throw FormatError("implausible grid dimensions");
  }
  if (bytes.size() != kHeaderBytes + static_cast<std::size_t>(h) * w * cell_bytes) {
    throw FormatError("payload size does not match header");
  }
  return {static_cast<int>(h), static_cast<int>(w)};
}

std::string encode_floats(const char* magic, const Grid<float>& cells) {
  std::string out = header(magic, static_cast<int>(cells.rows()), static_cast<int>(cells.cols()));
  out.reserve(out.size() + cells.size() * 4);
  for (Eigen::Index i = 0; i < cells.size(); ++i) {
    put_u32(out, std::bit_cast<std::uint32_t>(cells.data()[i]));
  }
  return out;
}

Grid<float> decode_floats(std::string_view bytes, const char* magic) {
  const Header hd = check_header(bytes, magic, 4);
  Grid<float> cells(hd.height, hd.width);
  for (Eigen::Index i = 0; i < cells.size(); ++i) {
    cells.data()[i] = std::bit_cast<float>(get_u32(bytes, kHeaderBytes + 4 * i));
  }
  return cells;
}

template <typename T, typename Decode>
T read_with(const std::filesystem::path& path, Decode decode) {
  const std::string bytes = read_file(path);
  try {
    return decode(bytes);
  } catch (const std::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace

std::string encode_mask(const BinaryMask& mask) {
  std::string out = header("MSK1", mask.height(), mask.width());
  const auto& cells = mask.cells();
  out.append(reinterpret_cast<const char*>(cells.data()), static_cast<std::size_t>(cells.size()));
  return out;
}

std::string encode_probability_map(const ProbabilityMap& map) {
  return encode_floats("PMP1", map.cells());
}

std::string encode_distance_map(const DistanceMap& map) {
  return encode_floats("DST1", map.cells());
}

BinaryMask decode_mask(std::string_view bytes) {
  const Header hd = check_header(bytes, "MSK1", 1);
  Grid<std::uint8_t> cells(hd.height, hd.width);
  std::memcpy(cells.data(), bytes.data() + kHeaderBytes, static_cast<std::size_t>(cells.size()));
  try {
    return BinaryMask(std::move(cells));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

ProbabilityMap decode_probability_map(std::string_view bytes) {
  try {
    return ProbabilityMap(decode_floats(bytes, "PMP1"));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

DistanceMap decode_distance_map(std::string_view bytes) {
  try {
    return DistanceMap(decode_floats(bytes, "DST1"));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

void write_mask(const std::filesystem::path& path, const BinaryMask& mask) {
  write_file(path, encode_mask(mask));
}
void write_probability_map(const std::filesystem::path& path, const ProbabilityMap& map) {
  write_file(path, encode_probability_map(map));
}
void write_distance_map(const std::filesystem::path& path, const DistanceMap& map) {
  write_file(path, encode_distance_map(map));
}

BinaryMask read_mask(const std::filesystem::path& path) {
  return read_with<BinaryMask>(path, decode_mask);
}
ProbabilityMap read_probability_map(const std::filesystem::path& path) {
  return read_with<ProbabilityMap>(path, decode_probability_map);
}
DistanceMap read_distance_map(const std::filesystem::path& path) {
  return read_with<DistanceMap>(path, decode_distance_map);
}

void write_ppm(const std::filesystem::path& path, const Frame& frame) {
  if (frame.channels() != 3) throw std::invalid_argument("write_ppm: frame must have 3 channels");
  std::string out = "P6\n" + std::to_string(frame.width()) + " " +
                    std::to_string(frame.height()) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(frame.height()) * frame.width() * 3);
  for (int r = 0; r < frame.height(); ++r) {
    for (int c = 0; c < frame.width(); ++c) {
      for (int ch = 0; ch < 3; ++ch) {
        out.push_back(static_cast<char>(std::lround(frame(r, c, ch) * 255.0)));
      }
    }
  }
  write_file(path, out);
}

Frame read_ppm(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  std::istringstream in(bytes);
  std::string magic;
  int width = 0;
  int height = 0;
  int maxval = 0;
  in >> magic >> width >> height >> maxval;
  if (!in || magic != "P6" || maxval != 255 || width < 1 || height < 1) {
    throw FormatError(path.string() + ": unsupported PPM header");
  }
  in.get();  // single whitespace after maxval
  const auto offset = static_cast<std::size_t>(in.tellg());
  if (bytes.size() != offset + static_cast<std::size_t>(width) * height * 3) {
    throw FormatError(path.string() + ": PPM payload size mismatch");
  }
  std::vector<Grid<double>> planes(3, Grid<double>(height, width));
  std::size_t i = offset;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      for (int ch = 0; ch < 3; ++ch) {
        planes[ch](r, c) = static_cast<unsigned char>(bytes[i++]) / 255.0;
      }
    }
  }
  return Frame(std::move(planes));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string format_exact(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace roivos
