#pragma once

#include "nitsche/analysis.hpp"
#include "nitsche/assembly.hpp"
#include "nitsche/boundary_data.hpp"
#include "nitsche/cases.hpp"
#include "nitsche/error.hpp"
#include "nitsche/geometry.hpp"
#include "nitsche/io.hpp"
#include "nitsche/mesh.hpp"
#include "nitsche/quadrature.hpp"
#include "nitsche/reference_cell.hpp"
#include "nitsche/solver.hpp"
#include "nitsche/sparse.hpp"
