#pragma once

#include "rayleigh_ritz/errors.hpp"
#include "rayleigh_ritz/scalars.hpp"
#include "rayleigh_ritz/matrix.hpp"
#include "rayleigh_ritz/eigen.hpp"
#include "rayleigh_ritz/model.hpp"
#include "rayleigh_ritz/study.hpp"
#include "rayleigh_ritz/format.hpp"
