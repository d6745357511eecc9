#pragma once

// Umbrella header: generalized unitaries, correspondences and Picard groups
// over finite-dimensional C*-algebras.

#include "picmod/matrix.hpp"
#include "picmod/permutation.hpp"
#include "picmod/algebra.hpp"
#include "picmod/hilbert_module.hpp"
#include "picmod/correspondence.hpp"
#include "picmod/generalized_maps.hpp"
#include "picmod/representation.hpp"
#include "picmod/unitary_groups.hpp"
#include "picmod/harness.hpp"
#include "picmod/instance_io.hpp"
