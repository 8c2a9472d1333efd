#pragma once

#include "pauli_mix/decoherence.hpp"
#include "pauli_mix/dynmaps.hpp"
#include "pauli_mix/error.hpp"
#include "pauli_mix/finite_field.hpp"
#include "pauli_mix/invertibility.hpp"
#include "pauli_mix/measure.hpp"
#include "pauli_mix/mub.hpp"
