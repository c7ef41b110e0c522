#pragma once

#include "affectfuse/core.hpp"
#include "affectfuse/dsp.hpp"
#include "affectfuse/error.hpp"
#include "affectfuse/eval.hpp"
#include "affectfuse/features.hpp"
#include "affectfuse/fusion.hpp"
#include "affectfuse/io.hpp"
#include "affectfuse/lda.hpp"
#include "affectfuse/log.hpp"
#include "affectfuse/report.hpp"
#include "affectfuse/selection.hpp"
#include "affectfuse/synth.hpp"
