// Copyright 2026 The GAP Authors
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


#ifndef GAP_GAP_HPP
#define GAP_GAP_HPP

#include "gap/baselines.hpp"
#include "gap/conjugate.hpp"
#include "gap/error.hpp"
#include "gap/geometry.hpp"
#include "gap/matops.hpp"
#include "gap/mc.hpp"
#include "gap/nelder_mead.hpp"
#include "gap/optimizer.hpp"
#include "gap/parallel.hpp"
#include "gap/random.hpp"
#include "gap/tangent.hpp"
#include "gap/targets.hpp"
#include "gap/types.hpp"

#endif
