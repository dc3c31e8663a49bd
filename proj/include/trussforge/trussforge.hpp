#pragma once

#include "trussforge/common.hpp"
#include "trussforge/truss.hpp"
#include "trussforge/statics.hpp"
#include "trussforge/actuator.hpp"
#include "trussforge/controller.hpp"
#include "trussforge/contact.hpp"
#include "trussforge/solver.hpp"
#include "trussforge/world.hpp"
#include "trussforge/configurations.hpp"
#include "trussforge/program.hpp"
#include "trussforge/scenes.hpp"
#include "trussforge/trace.hpp"
#include "trussforge/metrics.hpp"
#include "trussforge/runner.hpp"
#include "trussforge/scenario.hpp"
#include "trussforge/report.hpp"
#include "trussforge/plot.hpp"
#include "trussforge/sweep.hpp"
