#pragma once

#include "slicenormals/benchmark.hpp"
#include "slicenormals/clustering.hpp"
#include "slicenormals/evaluation.hpp"
#include "slicenormals/io.hpp"
#include "slicenormals/normals.hpp"
#include "slicenormals/scan.hpp"
#include "slicenormals/simulate.hpp"
