// Copyright 2026 The noisecm Authors.
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

#include "noisecm/error.hpp"
#include "noisecm/linalg.hpp"
#include "noisecm/text.hpp"
#include "noisecm/corpus.hpp"
#include "noisecm/distant_supervision.hpp"
#include "noisecm/embeddings.hpp"
#include "noisecm/clustering.hpp"
#include "noisecm/noise_model.hpp"
#include "noisecm/evaluation.hpp"
#include "noisecm/tagger.hpp"
#include "noisecm/pipeline.hpp"
#include "noisecm/benchmark.hpp"
