// Copyright 2026 The monge-kit Authors
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

// Everything in one include.

#include "monge/basis.hpp"
#include "monge/curve.hpp"
#include "monge/error.hpp"
#include "monge/families.hpp"
#include "monge/frames.hpp"
#include "monge/io.hpp"
#include "monge/mesh.hpp"
#include "monge/monge.hpp"
#include "monge/plane_family.hpp"
#include "monge/spine_synth.hpp"
