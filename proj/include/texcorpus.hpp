// Copyright 2026 The texcorpus Authors.
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

// Everything at once.

#include "texcorpus/bibres.hpp"
#include "texcorpus/classify.hpp"
#include "texcorpus/cli.hpp"
#include "texcorpus/corpus.hpp"
#include "texcorpus/document.hpp"
#include "texcorpus/error.hpp"
#include "texcorpus/ingest.hpp"
#include "texcorpus/parse.hpp"
#include "texcorpus/postprocess.hpp"
#include "texcorpus/schema.hpp"
#include "texcorpus/taskgen.hpp"
#include "texcorpus/text.hpp"
