#pragma once

#include "chartdig/calib.hpp"
#include "chartdig/color.hpp"
#include "chartdig/error.hpp"
#include "chartdig/image.hpp"
#include "chartdig/layout.hpp"
#include "chartdig/pipeline.hpp"
#include "chartdig/plot.hpp"
#include "chartdig/preprocess.hpp"
#include "chartdig/raster.hpp"
#include "chartdig/stitch.hpp"
#include "chartdig/synth.hpp"
#include "chartdig/trace.hpp"
