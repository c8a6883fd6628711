// Copyright 2026 The czgec Authors
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

#pragma once

#include "czgec/corpus_io.hpp"
#include "czgec/error.hpp"
#include "czgec/m2_scorer.hpp"
#include "czgec/noise.hpp"
#include "czgec/pipeline.hpp"
#include "czgec/providers.hpp"
#include "czgec/rng.hpp"
#include "czgec/sampler.hpp"
#include "czgec/typical_errors.hpp"
#include "czgec/unicode.hpp"
