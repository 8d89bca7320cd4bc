#pragma once

// Everything at once.

#include "tehom/error.hpp"
#include "tehom/specfun.hpp"
#include "tehom/coeffs.hpp"
#include "tehom/linalg/sparse.hpp"
#include "tehom/linalg/arnoldi.hpp"
#include "tehom/linalg/svd.hpp"
#include "tehom/mesh.hpp"
#include "tehom/fem.hpp"
#include "tehom/homogenize.hpp"
#include "tehom/te/types.hpp"
#include "tehom/te/analytic.hpp"
#include "tehom/te/pencil.hpp"
#include "tehom/te/fourth_order.hpp"
#include "tehom/te/bracket.hpp"
#include "tehom/te/rate.hpp"
#include "tehom/scatter.hpp"
#include "tehom/recon.hpp"
#include "tehom/config.hpp"
#include "tehom/csv.hpp"
#include "tehom/tables.hpp"
#include "tehom/cli.hpp"
