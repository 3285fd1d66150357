// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The phit Authors

#pragma once

#include "phit/core.hpp"
#include "phit/estimates.hpp"
#include "phit/frames.hpp"
#include "phit/grid.hpp"
#include "phit/io.hpp"
#include "phit/lpdecomp.hpp"
#include "phit/maximal.hpp"
#include "phit/norms.hpp"
#include "phit/transforms.hpp"
