#pragma once

#include "modlab/convergence.hpp"
#include "modlab/dirichlet.hpp"
#include "modlab/error.hpp"
#include "modlab/format.hpp"
#include "modlab/geometry.hpp"
#include "modlab/modulus.hpp"
#include "modlab/ncms.hpp"
#include "modlab/network_io.hpp"
#include "modlab/orthodiagonal.hpp"
#include "modlab/plane_network.hpp"
#include "modlab/tiling.hpp"
