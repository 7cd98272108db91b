#pragma once

#include "ssaeld/datasets.hpp"
#include "ssaeld/errors.hpp"
#include "ssaeld/harness.hpp"
#include "ssaeld/model.hpp"
#include "ssaeld/repair.hpp"
#include "ssaeld/ssa.hpp"
