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

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace roivos {

/// Ordered "key = value" store used by every plain-text config, manifest and
/// snapshot in the project. Lines starting with '#' and blank lines are
/// ignored when parsing; output is sorted by key.
class KeyValues {
 public:
  static KeyValues parse(std::string_view text);
  static KeyValues load(const std::string& path);

  [[nodiscard]] std::string format() const;

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value) { set(key, std::to_string(value)); }
  void set(const std::string& key, int value) { set(key, std::to_string(value)); }
  void set(const std::string& key, unsigned long long value) { set(key, std::to_string(value)); }
  void set(const std::string& key, const std::vector<double>& values);

  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
  [[nodiscard]] const std::string& get(const std::string& key) const;

  // Typed getters throw std::runtime_error naming the key on parse failure.
  [[nodiscard]] double get_double(const std::string& key) const;
  [[nodiscard]] long long get_int(const std::string& key) const;
  [[nodiscard]] unsigned long long get_uint(const std::string& key) const;
  [[nodiscard]] std::vector<double> get_doubles(const std::string& key) const;

  // Getters with a fallback when the key is absent.
  [[nodiscard]] double get_double(const std::string& key, double fallback) const;
  [[nodiscard]] long long get_int(const std::string& key, long long fallback) const;

  [[nodiscard]] const std::map<std::string, std::string>& entries() const { return values_; }

  /// Throws if any key is not in `known`; catches typos in config files.
  void require_known(const std::vector<std::string>& known) const;

  friend bool operator==(const KeyValues&, const KeyValues&) = default;

 private:
  std::map<std::string, std::string> values_;
};

double parse_double(std::string_view text);

}  // namespace roivos
