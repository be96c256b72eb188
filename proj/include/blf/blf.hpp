#pragma once

#include "core.hpp"
#include "polyfield.hpp"
#include "bisector.hpp"
#include "energy.hpp"
#include "optimizer.hpp"
#include "synth.hpp"
#include "image.hpp"
#include "ingest.hpp"
#include "render.hpp"
#include "model_io.hpp"
