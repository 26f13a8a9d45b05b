#pragma once

#include "ebamr/euler.hpp"
#include "ebamr/geometry.hpp"

namespace ebamr {

/// Fill the cells of U outside the physical domain from their images: walls mirror and flip
/// the normal momentum, outflow copies the nearest interior cell, periodic wraps around.
/// x ghosts are filled first (rows inside the domain), then y ghosts over all columns.
void fill_physical_bc(ConsField& U, const Box& domain, const DomainBc& bc);

}  // namespace ebamr
