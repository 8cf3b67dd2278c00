// Copyright 2026 The findselinv Authors
// SPDX-License-Identifier: Apache-2.0
#include "flops.hpp"

#include "common.hpp"

namespace fsi {

void FlopLedger::add(const std::string& kernel, std::int64_t sixths) {
  if (sixths < 0) fail(ErrorCode::invalid_argument, "negative flop count for " + kernel);
  total_ += sixths;
  by_kernel_[kernel] += sixths;
  calls_[kernel] += 1;
}

void FlopLedger::merge(const FlopLedger& other) {
  total_ += other.total_;
  for (const auto& [k, v] : other.by_kernel_) by_kernel_[k] += v;
  for (const auto& [k, v] : other.calls_) calls_[k] += v;
}

std::int64_t FlopLedger::sixths(const std::string& kernel) const {
  auto it = by_kernel_.find(kernel);
  return it == by_kernel_.end() ? 0 : it->second;
}

std::int64_t FlopLedger::calls(const std::string& kernel) const {
  auto it = calls_.find(kernel);
  return it == calls_.end() ? 0 : it->second;
}

}  // namespace fsi
