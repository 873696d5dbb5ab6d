#pragma once

// Umbrella header for the cupcf collaborative-filtering engine.

#include "cupcf/errors.hpp"
#include "cupcf/evaluate.hpp"
#include "cupcf/io.hpp"
#include "cupcf/predict.hpp"
#include "cupcf/ratings.hpp"
#include "cupcf/recommend.hpp"
#include "cupcf/report.hpp"
#include "cupcf/similarity.hpp"
#include "cupcf/split.hpp"
