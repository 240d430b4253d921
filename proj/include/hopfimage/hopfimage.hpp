#pragma once

#include "hopfimage/build.hpp"
#include "hopfimage/dita.hpp"
#include "hopfimage/duality.hpp"
#include "hopfimage/errors.hpp"
#include "hopfimage/hadamard.hpp"
#include "hopfimage/io.hpp"
#include "hopfimage/linalg.hpp"
#include "hopfimage/magic.hpp"
#include "hopfimage/matrix_spec.hpp"
#include "hopfimage/spectra.hpp"
#include "hopfimage/svg.hpp"
