#pragma once

#include "sparsegauss/numerics.hpp"
#include "sparsegauss/fourier_model.hpp"
#include "sparsegauss/grids.hpp"
#include "sparsegauss/fullgrid.hpp"
#include "sparsegauss/sparse_combination.hpp"
#include "sparsegauss/sigma_oracle.hpp"
