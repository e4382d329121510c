#pragma once

#include "core.hpp"
#include "decision.hpp"
#include "pipeline.hpp"
#include "stimulus.hpp"
#include "arena.hpp"
#include "io.hpp"
