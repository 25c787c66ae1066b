/*
 * Copyright 2026 The mvmc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvmc {

struct ParamSlice {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
};

/// Named partition of a flat parameter vector.
class ParamLayout {
 public:
  std::size_t add(const std::string& name, std::size_t size) {
    slices_.push_back({name, total_, size});
    total_ += size;
    return slices_.size() - 1;
  }
  const ParamSlice& slice(const std::string& name) const {
    for (const auto& s : slices_)
      if (s.name == name) return s;
    throw std::out_of_range("unknown parameter slice: " + name);
  }
  bool has(const std::string& name) const {
    for (const auto& s : slices_)
      if (s.name == name) return true;
    return false;
  }
  const std::vector<ParamSlice>& slices() const { return slices_; }
  std::size_t total_size() const { return total_; }

 private:
  std::vector<ParamSlice> slices_;
  std::size_t total_ = 0;
};

/// Flat real parameter vector with a shared layout.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(const ParamLayout* layout)
      : layout_(layout), values_(layout->total_size(), 0.0) {}

  const ParamLayout& layout() const { return *layout_; }
  std::size_t size() const { return values_.size(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> slice(const std::string& name) {
    const ParamSlice& s = layout_->slice(name);
    return {values_.data() + s.offset, s.size};
  }
  std::span<const double> slice(const std::string& name) const {
    const ParamSlice& s = layout_->slice(name);
    return {values_.data() + s.offset, s.size};
  }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

 private:
  const ParamLayout* layout_ = nullptr;
  std::vector<double> values_;
};

}  // namespace mvmc
