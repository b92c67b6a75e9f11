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

#include "bsagg/wire.h"

#include <bit>

#include "absl/strings/str_cat.h"

namespace bsagg {

void ByteWriter::PutLittleEndian(uint64_t v, int width) {
  for (int i = 0; i < width; ++i) {
    bytes_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
}

void ByteWriter::PutF64(double v) { PutU64(std::bit_cast<uint64_t>(v)); }

absl::StatusOr<uint64_t> ByteReader::ReadLittleEndian(int width) {
  if (remaining() < static_cast<size_t>(width)) {
    return absl::InvalidArgumentError(
        absl::StrCat("truncated buffer: need ", width, " bytes at offset ",
                     pos_, ", have ", remaining()));
  }
  uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<uint64_t>(bytes_[pos_ + i]) << (8 * i);
  }
  pos_ += width;
  return v;
}

absl::StatusOr<uint8_t> ByteReader::ReadU8() {
  absl::StatusOr<uint64_t> v = ReadLittleEndian(1);
  if (!v.ok()) return v.status();
  return static_cast<uint8_t>(*v);
}

absl::StatusOr<uint32_t> ByteReader::ReadU32() {
  absl::StatusOr<uint64_t> v = ReadLittleEndian(4);
  if (!v.ok()) return v.status();
  return static_cast<uint32_t>(*v);
}

absl::StatusOr<uint64_t> ByteReader::ReadU64() { return ReadLittleEndian(8); }

absl::StatusOr<double> ByteReader::ReadF64() {
  absl::StatusOr<uint64_t> v = ReadLittleEndian(8);
  if (!v.ok()) return v.status();
  return std::bit_cast<double>(*v);
}

absl::Status ByteReader::ExpectEnd() const {
  if (remaining() != 0) {
    return absl::InvalidArgumentError(
        absl::StrCat(remaining(), " trailing bytes after message"));
  }
  return absl::OkStatus();
}

}  // namespace bsagg
