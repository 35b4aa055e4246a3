#pragma once

#include "coalign/distill.hpp"
#include "coalign/embedding.hpp"
#include "coalign/error.hpp"
#include "coalign/instance_gen.hpp"
#include "coalign/oracle.hpp"
#include "coalign/plan.hpp"
#include "coalign/playback.hpp"
#include "coalign/scheduler.hpp"
#include "coalign/timeline.hpp"
