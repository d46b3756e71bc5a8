// Copyright 2026 The mpsprep Authors
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

#include "mpsprep/baseline.hpp"
#include "mpsprep/blockdiag.hpp"
#include "mpsprep/canonical.hpp"
#include "mpsprep/charge.hpp"
#include "mpsprep/cost.hpp"
#include "mpsprep/givens.hpp"
#include "mpsprep/io.hpp"
#include "mpsprep/parallel.hpp"
#include "mpsprep/program.hpp"
#include "mpsprep/random.hpp"
#include "mpsprep/simulate.hpp"
#include "mpsprep/tensor.hpp"
