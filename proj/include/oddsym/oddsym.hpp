#pragma once

// Exact calculus on odd symplectic supermanifolds: Grassmann polynomial
// algebra, Berezinians, the canonical odd Laplacian on half-densities, the
// Koszul homotopy and its spectral sequence, and the action of canonical
// transformations of Pi T*M on multivector densities and differential forms.

#include "oddsym/bv.hpp"
#include "oddsym/calculus.hpp"
#include "oddsym/chart.hpp"
#include "oddsym/coefficient.hpp"
#include "oddsym/error.hpp"
#include "oddsym/generators.hpp"
#include "oddsym/io.hpp"
#include "oddsym/linalg.hpp"
#include "oddsym/polynomial.hpp"
#include "oddsym/sampling.hpp"
#include "oddsym/spectral.hpp"
#include "oddsym/suites.hpp"
#include "oddsym/supermatrix.hpp"
#include "oddsym/transform.hpp"
