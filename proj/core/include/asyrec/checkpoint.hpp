/*
 * Copyright 2026 The asyrec Authors.
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

#pragma once

#include <filesystem>
#include <iosfwd>

#include "asyrec/model.hpp"

namespace asyrec {

// Text container, one named tensor per record, values as hexadecimal floats
// so a save/load round trip is bit-exact:
//   #asyrec-checkpoint v1
//   schema <name>
//   dim <d>
//   leaky_slope <hex>
//   epsilon <hex>
//   tensor <name> <rank> <extents...>
//   <values separated by spaces>
void write_checkpoint(std::ostream& out, const AsyrecParams& params);
AsyrecParams read_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& path, const AsyrecParams& params);
AsyrecParams load_checkpoint(const std::filesystem::path& path);

}  // namespace asyrec
