#pragma once

#include "gridcomm/error.hpp"
#include "gridcomm/core.hpp"
#include "gridcomm/kmeans.hpp"
#include "gridcomm/hec.hpp"
#include "gridcomm/mec.hpp"
#include "gridcomm/lp.hpp"
#include "gridcomm/flow.hpp"
#include "gridcomm/sec.hpp"
#include "gridcomm/metrics.hpp"
#include "gridcomm/io.hpp"
#include "gridcomm/datagen.hpp"
#include "gridcomm/oracle.hpp"
#include "gridcomm/experiment.hpp"
