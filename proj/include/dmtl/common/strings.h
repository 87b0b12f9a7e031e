// include/dmtl/common/strings.h

// Copyright 2026  The dysarthria-mtl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef DMTL_COMMON_STRINGS_H_
#define DMTL_COMMON_STRINGS_H_

#include <string>
#include <string_view>
#include <vector>

namespace dmtl {

std::string Trim(std::string_view s);

// Splits on runs of spaces and tabs; no empty fields.
std::vector<std::string> SplitWhitespace(std::string_view s);

// Splits on a single delimiter character, keeping empty fields.
std::vector<std::string> SplitOn(std::string_view s, char delim);

// Strict numeric parsing: the whole field must be consumed.
bool ParseInt(std::string_view s, long long *out);
bool ParseDouble(std::string_view s, double *out);

// Shortest decimal text that round-trips to the same double.
std::string FormatDouble(double v);

// Fixed-point rendering with the given number of decimals.
std::string FormatFixed(double v, int decimals);

}  // namespace dmtl

#endif  // DMTL_COMMON_STRINGS_H_
