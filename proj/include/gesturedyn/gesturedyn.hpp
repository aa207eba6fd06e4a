#pragma once

#include "gesturedyn/butterworth.hpp"
#include "gesturedyn/dynamics.hpp"
#include "gesturedyn/error.hpp"
#include "gesturedyn/fit.hpp"
#include "gesturedyn/io.hpp"
#include "gesturedyn/kinematics.hpp"
#include "gesturedyn/param_report.hpp"
#include "gesturedyn/pchip.hpp"
#include "gesturedyn/pipeline.hpp"
#include "gesturedyn/random.hpp"
#include "gesturedyn/report.hpp"
#include "gesturedyn/segment.hpp"
#include "gesturedyn/series.hpp"
#include "gesturedyn/signal.hpp"
#include "gesturedyn/stats.hpp"
#include "gesturedyn/synth.hpp"
#include "gesturedyn/whittaker.hpp"
