#pragma once

#include "streamgain/error.hpp"
#include "streamgain/time.hpp"
#include "streamgain/csv.hpp"
#include "streamgain/kvconfig.hpp"
#include "streamgain/seeds.hpp"
#include "streamgain/parallel.hpp"
#include "streamgain/core_data.hpp"
#include "streamgain/dataset_io.hpp"
#include "streamgain/features.hpp"
#include "streamgain/binarize.hpp"
#include "streamgain/labels.hpp"
#include "streamgain/glm.hpp"
#include "streamgain/experiments.hpp"
#include "streamgain/synthgen.hpp"
#include "streamgain/svg.hpp"
#include "streamgain/manifest.hpp"
#include "streamgain/report.hpp"
#include "streamgain/oracle.hpp"
