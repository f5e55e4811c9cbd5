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

// Binary grid formats. All three share a 12-byte header:
//   magic[4] | height:u32le | width:u32le
// followed by height*width row-major cells:
//   MSK1  u8 (0 or 1)
//   PMP1  f32le probability
//   DST1  f32le distance, +inf for "no source"
// Frames are written as binary 8-bit PPM (P6).

#pragma once

#include "roivos/frame.hpp"
#include "roivos/grid.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace roivos {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string encode_mask(const BinaryMask& mask);
std::string encode_probability_map(const ProbabilityMap& map);
std::string encode_distance_map(const DistanceMap& map);

BinaryMask decode_mask(std::string_view bytes);
ProbabilityMap decode_probability_map(std::string_view bytes);
DistanceMap decode_distance_map(std::string_view bytes);

void write_mask(const std::filesystem::path& path, const BinaryMask& mask);
void write_probability_map(const std::filesystem::path& path, const ProbabilityMap& map);
void write_distance_map(const std::filesystem::path& path, const DistanceMap& map);

BinaryMask read_mask(const std::filesystem::path& path);
ProbabilityMap read_probability_map(const std::filesystem::path& path);
DistanceMap read_distance_map(const std::filesystem::path& path);

/// 8-bit PPM; intensities are written as round(255 * v). Frames whose values
/// are multiples of 1/255 round-trip exactly. Only 3-channel frames.
void write_ppm(const std::filesystem::path& path, const Frame& frame);
Frame read_ppm(const std::filesystem::path& path);

// Small file helpers shared by the text formats.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// Decimal rendering with 17 significant digits; round-trips any double.
std::string format_exact(double value);

}  // namespace roivos
