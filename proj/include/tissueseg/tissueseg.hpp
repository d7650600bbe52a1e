#pragma once

#include "tissueseg/errors.hpp"
#include "tissueseg/image.hpp"
#include "tissueseg/image_io.hpp"
#include "tissueseg/metrics.hpp"
#include "tissueseg/pipeline.hpp"
#include "tissueseg/pixel_math.hpp"
#include "tissueseg/report.hpp"
#include "tissueseg/scene_io.hpp"
#include "tissueseg/synthgen.hpp"
#include "tissueseg/thresholding.hpp"
