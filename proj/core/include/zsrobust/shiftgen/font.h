// Copyright 2026 The zsrobust Authors.
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

#ifndef ZSROBUST_SHIFTGEN_FONT_H_
#define ZSROBUST_SHIFTGEN_FONT_H_

#include <cstdint>

namespace zsrobust {

inline constexpr int kGlyphSize = 8;

// Bit 7 of each row byte is the leftmost pixel. Characters outside
// printable ASCII render as '?'.
std::uint8_t GlyphRow(char c, int row);
bool GlyphPixel(char c, int row, int col);

}  // namespace zsrobust

#endif  // ZSROBUST_SHIFTGEN_FONT_H_
