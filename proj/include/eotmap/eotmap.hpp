#ifndef EOTMAP_EOTMAP_HPP
#define EOTMAP_EOTMAP_HPP

#include "baselines.hpp"
#include "diffusion.hpp"
#include "embedding.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "linalg.hpp"
#include "metrics.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "simulate.hpp"
#include "spectral_graph.hpp"
#include "transport.hpp"

#endif  // EOTMAP_EOTMAP_HPP
