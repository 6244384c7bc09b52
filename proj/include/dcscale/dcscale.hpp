#pragma once

#include "dcscale/core.hpp"
#include "dcscale/ingest.hpp"
#include "dcscale/dissect.hpp"
#include "dcscale/scaling.hpp"
#include "dcscale/synth.hpp"
#include "dcscale/agent.hpp"
