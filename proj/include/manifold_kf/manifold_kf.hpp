// Copyright 2026 manifold_kf contributors
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

// Umbrella header for the manifold_kf library.

#include "manifold_kf/angles.hpp"
#include "manifold_kf/chi2.hpp"
#include "manifold_kf/covariance.hpp"
#include "manifold_kf/csv.hpp"
#include "manifold_kf/errors.hpp"
#include "manifold_kf/group.hpp"
#include "manifold_kf/ini.hpp"
#include "manifold_kf/lgekf.hpp"
#include "manifold_kf/models.hpp"
#include "manifold_kf/simkit.hpp"
#include "manifold_kf/tracking.hpp"
#include "manifold_kf/version.hpp"
#include "manifold_kf/wrapped_ekf.hpp"
