#pragma once

#include "fisher_hydro/grid.hpp"

namespace fisher_hydro {

// In-place complex transforms over the full grid. inverse() includes the 1/size factor.
void fft_forward(ComplexField& data, const Grid& g);
void fft_inverse(ComplexField& data, const Grid& g);

}  // namespace fisher_hydro
