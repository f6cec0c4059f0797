/*
 * Copyright 2026 The valspace Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "valspace/adaptive/adaptive.hpp"
#include "valspace/errors.hpp"
#include "valspace/format.hpp"
#include "valspace/lq/riccati.hpp"
#include "valspace/mdp/finite_mdp.hpp"
#include "valspace/mdp/io.hpp"
#include "valspace/mdp/lookahead.hpp"
#include "valspace/mdp/operators.hpp"
#include "valspace/mdp/random_mdp.hpp"
#include "valspace/random.hpp"
