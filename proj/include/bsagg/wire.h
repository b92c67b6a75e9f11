/*
 * Copyright 2026 The bsagg Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BSAGG_WIRE_H_
#define BSAGG_WIRE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace bsagg {

// Appends fixed-width little-endian integers to a growing byte buffer.
class ByteWriter {
 public:
  void PutU8(uint8_t v) { bytes_.push_back(v); }
  void PutU32(uint32_t v) { PutLittleEndian(v, 4); }
  void PutU64(uint64_t v) { PutLittleEndian(v, 8); }
  void PutF64(double v);

  const std::vector<uint8_t>& bytes() const { return bytes_; }
  std::vector<uint8_t> Release() && { return std::move(bytes_); }

 private:
  void PutLittleEndian(uint64_t v, int width);

  std::vector<uint8_t> bytes_;
};

// Reads fixed-width little-endian integers from a byte span. Every read is
// bounds-checked and reports truncation as kInvalidArgument.
class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  absl::StatusOr<uint8_t> ReadU8();
  absl::StatusOr<uint32_t> ReadU32();
  absl::StatusOr<uint64_t> ReadU64();
  absl::StatusOr<double> ReadF64();

  size_t remaining() const { return bytes_.size() - pos_; }
  // Fails unless the whole buffer was consumed.
  absl::Status ExpectEnd() const;

 private:
  absl::StatusOr<uint64_t> ReadLittleEndian(int width);

  std::span<const uint8_t> bytes_;
  size_t pos_ = 0;
};

}  // namespace bsagg

#endif  // BSAGG_WIRE_H_
