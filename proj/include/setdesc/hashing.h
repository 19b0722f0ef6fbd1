// Copyright 2026 The setdesc Authors.
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

#ifndef SETDESC_HASHING_H_
#define SETDESC_HASHING_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace setdesc {

std::uint64_t Fnv1a64(std::string_view data);

// 16 lowercase hex digits of Fnv1a64.
std::string HashHex(std::string_view data);

// zlib CRC32.
std::uint32_t Crc32(std::span<const unsigned char> data);

}  // namespace setdesc

#endif  // SETDESC_HASHING_H_
