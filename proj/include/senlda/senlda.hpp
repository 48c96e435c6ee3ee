// Copyright 2026 The senlda Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "senlda/bench.hpp"
#include "senlda/classify.hpp"
#include "senlda/classify_io.hpp"
#include "senlda/corpus.hpp"
#include "senlda/corpus_io.hpp"
#include "senlda/error.hpp"
#include "senlda/evaluation.hpp"
#include "senlda/generator.hpp"
#include "senlda/math.hpp"
#include "senlda/model_io.hpp"
#include "senlda/rng.hpp"
#include "senlda/sampler.hpp"
