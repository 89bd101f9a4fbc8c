// Copyright 2026 The splitgauntlet Authors.
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

#ifndef SPLITGAUNTLET_SPLITGAUNTLET_HPP
#define SPLITGAUNTLET_SPLITGAUNTLET_HPP

#include "splitgauntlet/calendar.hpp"
#include "splitgauntlet/corpus.hpp"
#include "splitgauntlet/diagnostics.hpp"
#include "splitgauntlet/evalharness.hpp"
#include "splitgauntlet/features.hpp"
#include "splitgauntlet/jsonutil.hpp"
#include "splitgauntlet/metricspace.hpp"
#include "splitgauntlet/parallel.hpp"
#include "splitgauntlet/random.hpp"
#include "splitgauntlet/splitters.hpp"

#endif  // SPLITGAUNTLET_SPLITGAUNTLET_HPP
