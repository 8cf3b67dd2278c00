// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace fsi {

// Multiplication counts in exact units of 1/6 multiplication.
class FlopLedger {
 public:
  static constexpr std::int64_t kUnit = 6;

  void add(const std::string& kernel, std::int64_t sixths);
  void merge(const FlopLedger& other);

  std::int64_t sixths() const { return total_; }
  double multiplications() const { return static_cast<double>(total_) / kUnit; }
  std::int64_t sixths(const std::string& kernel) const;
  std::int64_t calls(const std::string& kernel) const;
  const std::map<std::string, std::int64_t>& breakdown() const { return by_kernel_; }

  bool operator==(const FlopLedger& o) const {
    return total_ == o.total_ && by_kernel_ == o.by_kernel_ && calls_ == o.calls_;
  }
  bool operator!=(const FlopLedger& o) const { return !(*this == o); }

 private:
  std::int64_t total_ = 0;
  std::map<std::string, std::int64_t> by_kernel_;
  std::map<std::string, std::int64_t> calls_;
};

}  // namespace fsi
