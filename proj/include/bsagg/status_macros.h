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

#ifndef BSAGG_STATUS_MACROS_H_
#define BSAGG_STATUS_MACROS_H_

#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define BSAGG_RETURN_IF_ERROR(expr)            \
  do {                                         \
    const absl::Status _bsagg_status = (expr); \
    if (!_bsagg_status.ok()) {                 \
      return _bsagg_status;                    \
    }                                          \
  } while (0)

#define BSAGG_CONCAT_INNER_(a, b) a##b
#define BSAGG_CONCAT_(a, b) BSAGG_CONCAT_INNER_(a, b)

#define BSAGG_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                 \
  if (!statusor.ok()) {                                    \
    return statusor.status();                              \
  }                                                        \
  lhs = std::move(statusor).value()

#define BSAGG_ASSIGN_OR_RETURN(lhs, rexpr)                                     \
  BSAGG_ASSIGN_OR_RETURN_IMPL_(BSAGG_CONCAT_(_bsagg_statusor_, __LINE__), lhs, \
                               rexpr)

#endif  // BSAGG_STATUS_MACROS_H_
